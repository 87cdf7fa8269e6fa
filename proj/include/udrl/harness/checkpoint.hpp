#pragma once

// Checkpoint binary layout (version 1). All integers are little-endian;
// reals are IEEE-754 binary64 stored as their little-endian bit pattern;
// `str` is a u64 byte length followed by raw bytes; matrices are column-major.
//
//   magic         8 bytes "UDRLCKPT"
//   version       u32
//   env_id        str
//   config        str      canonical `key = value` text
//   spec          u64 obs_dim, u64 command_dim, u64 n_hidden, u64[n_hidden],
//                 u8 fast_net (0 gated, 1 bilinear), u8 head (0 categorical,
//                 1 gaussian), u64 head_size, u8 activation (0 relu, 1 tanh)
//   parameters    u64 count, then per parameter: str name, u64 rows, u64 cols,
//                 f64[rows*cols]
//   adam          f64 lr, f64 beta1, f64 beta2, f64 eps, u64 step_count, then
//                 per parameter f64[] first moment, f64[] second moment
//   replay        u64 capacity, u64 next_serial, u64 n_entries, then per entry:
//                 u64 serial, f64 total_return, u64 n_steps, then per step:
//                 u64 n_features, f64[], i64 state, i64 action_index,
//                 u64 n_values, f64[], f64 reward
//   scales        f64 return_scale, f64 horizon_scale
//   rng           str train, str explore, str eval   (engine text state)
//   env_steps     u64
//   exploratory   u8 present, f64 M, f64 S, i64 H
//   trailer       4 bytes "END."

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "udrl/error.hpp"
#include "udrl/trainer.hpp"

namespace udrl::harness {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[8] = {'U', 'D', 'R', 'L', 'C', 'K', 'P', 'T'};
inline constexpr char kCheckpointTrailer[4] = {'E', 'N', 'D', '.'};

class ByteWriter {
public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void reals(std::span<const double> xs) {
    for (double x : xs) f64(x);
  }
  const std::string& bytes() const { return bytes_; }

private:
  std::string bytes_;
};

class ByteReader {
public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string_view raw(std::size_t n) {
    need(n);
    auto v = bytes_.substr(pos_, n);
    pos_ += n;
    return v;
  }
  std::string str() { return std::string(raw(length())); }
  // A count that must fit in the remaining bytes at `unit` bytes per element.
  std::uint64_t length(std::size_t unit = 1) {
    const std::uint64_t n = u64();
    if (unit != 0 && n > (bytes_.size() - pos_) / unit) throw FormatError("checkpoint truncated");
    return n;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("checkpoint truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline void write_matrix_values(ByteWriter& w, const nn::Matrix& m) {
  w.reals(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

inline void read_matrix_values(ByteReader& r, nn::Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
}

inline std::string encode_checkpoint(const AgentState& a) {
  ByteWriter w;
  w.raw(kCheckpointMagic, sizeof kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.str(a.env_id);
  w.str(format_config(a.config));

  const nn::NetworkSpec& s = a.network.spec();
  w.u64(s.observation_dim);
  w.u64(s.command_dim);
  w.u64(s.hidden_sizes.size());
  for (auto h : s.hidden_sizes) w.u64(h);
  w.u8(s.fast_net == nn::FastNet::gated ? 0 : 1);
  w.u8(s.head == nn::HeadKind::categorical ? 0 : 1);
  w.u64(s.head_size);
  w.u8(s.activation == nn::Activation::relu ? 0 : 1);

  const auto& params = a.network.parameters();
  w.u64(params.size());
  for (const auto& p : params) {
    w.str(p.name);
    w.u64(static_cast<std::uint64_t>(p.value.rows()));
    w.u64(static_cast<std::uint64_t>(p.value.cols()));
    write_matrix_values(w, p.value);
  }

  w.f64(a.adam.learning_rate);
  w.f64(a.adam.beta1);
  w.f64(a.adam.beta2);
  w.f64(a.adam.epsilon);
  w.u64(a.adam.step_count);
  for (std::size_t i = 0; i < params.size(); ++i) {
    write_matrix_values(w, a.adam.first_moment[i]);
    write_matrix_values(w, a.adam.second_moment[i]);
  }

  w.u64(a.buffer.capacity());
  w.u64(a.buffer.next_serial());
  w.u64(a.buffer.entries().size());
  for (const auto& e : a.buffer.entries()) {
    w.u64(e.serial);
    w.f64(e.episode.total_return);
    w.u64(e.episode.steps.size());
    for (const auto& st : e.episode.steps) {
      w.u64(st.observation.features.size());
      w.reals(st.observation.features);
      w.i64(st.observation.state);
      w.i64(st.action.index);
      w.u64(st.action.values.size());
      w.reals(st.action.values);
      w.f64(st.reward);
    }
  }

  w.f64(a.scales.return_scale);
  w.f64(a.scales.horizon_scale);
  w.str(a.train_rng.state());
  w.str(a.explore_rng.state());
  w.str(a.eval_rng.state());
  w.u64(a.env_steps);
  w.u8(a.last_exploratory ? 1 : 0);
  const ExploratoryDistribution d = a.last_exploratory.value_or(ExploratoryDistribution{});
  w.f64(d.mean_return);
  w.f64(d.std_return);
  w.i64(d.horizon);
  w.raw(kCheckpointTrailer, sizeof kCheckpointTrailer);
  return w.bytes();
}

inline AgentState decode_checkpoint(std::string_view bytes) {
  ByteReader r(bytes);
  if (bytes.size() < sizeof kCheckpointMagic ||
      std::memcmp(bytes.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0)
    throw FormatError("not a checkpoint file (bad magic)");
  r.raw(sizeof kCheckpointMagic);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint version mismatch: file has version " + std::to_string(version) +
                      ", this build reads version " + std::to_string(kCheckpointVersion));

  AgentState a;
  a.env_id = r.str();
  try {
    a.config = parse_config(r.str());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config invalid: ") + e.what());
  }

  nn::NetworkSpec s;
  s.observation_dim = r.u64();
  s.command_dim = r.u64();
  const auto n_hidden = r.length(8);
  for (std::uint64_t i = 0; i < n_hidden; ++i) s.hidden_sizes.push_back(r.u64());
  const auto fast = r.u8(), head = r.u8();
  s.head_size = r.u64();
  const auto act = r.u8();
  if (fast > 1 || head > 1 || act > 1) throw FormatError("checkpoint: bad enum value in network spec");
  s.fast_net = fast == 0 ? nn::FastNet::gated : nn::FastNet::bilinear;
  s.head = head == 0 ? nn::HeadKind::categorical : nn::HeadKind::gaussian;
  s.activation = act == 0 ? nn::Activation::relu : nn::Activation::tanh;
  try {
    a.network = nn::Network::init(s, 0);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint network spec invalid: ") + e.what());
  }

  auto& params = a.network.parameters();
  if (r.u64() != params.size()) throw FormatError("checkpoint: parameter count mismatch");
  for (auto& p : params) {
    const std::string name = r.str();
    const auto rows = r.u64(), cols = r.u64();
    if (name != p.name || rows != static_cast<std::uint64_t>(p.value.rows()) ||
        cols != static_cast<std::uint64_t>(p.value.cols()))
      throw FormatError("checkpoint: parameter '" + name + "' does not match network spec");
    read_matrix_values(r, p.value);
  }

  a.adam = nn::AdamState::for_parameters(params, 0.0);
  a.adam.learning_rate = r.f64();
  a.adam.beta1 = r.f64();
  a.adam.beta2 = r.f64();
  a.adam.epsilon = r.f64();
  a.adam.step_count = r.u64();
  for (std::size_t i = 0; i < params.size(); ++i) {
    read_matrix_values(r, a.adam.first_moment[i]);
    read_matrix_values(r, a.adam.second_moment[i]);
  }

  const auto capacity = r.u64();
  const auto next_serial = r.u64();
  const auto n_entries = r.length(24);
  std::vector<ReplayBuffer::Entry> entries;
  entries.reserve(n_entries);
  for (std::uint64_t i = 0; i < n_entries; ++i) {
    ReplayBuffer::Entry e;
    e.serial = r.u64();
    const double stored_return = r.f64();
    const auto n_steps = r.length(40);
    for (std::uint64_t t = 0; t < n_steps; ++t) {
      Step st;
      st.observation.features.resize(r.length(8));
      for (auto& x : st.observation.features) x = r.f64();
      st.observation.state = static_cast<int>(r.i64());
      st.action.index = static_cast<int>(r.i64());
      st.action.values.resize(r.length(8));
      for (auto& x : st.action.values) x = r.f64();
      st.reward = r.f64();
      e.episode.append(std::move(st));
    }
    if (std::bit_cast<std::uint64_t>(e.episode.total_return) != std::bit_cast<std::uint64_t>(stored_return))
      throw FormatError("checkpoint: episode return does not match its rewards");
    entries.push_back(std::move(e));
  }
  if (capacity == 0) throw FormatError("checkpoint: zero replay capacity");
  a.buffer = ReplayBuffer::restore(capacity, std::move(entries), next_serial);

  a.scales.return_scale = r.f64();
  a.scales.horizon_scale = r.f64();
  a.train_rng.restore(r.str());
  a.explore_rng.restore(r.str());
  a.eval_rng.restore(r.str());
  a.env_steps = r.u64();
  const bool has_dist = r.u8() != 0;
  ExploratoryDistribution d;
  d.mean_return = r.f64();
  d.std_return = r.f64();
  d.horizon = r.i64();
  if (has_dist) a.last_exploratory = d;
  if (std::memcmp(r.raw(sizeof kCheckpointTrailer).data(), kCheckpointTrailer,
                  sizeof kCheckpointTrailer) != 0)
    throw FormatError("checkpoint: missing trailer");
  if (!r.at_end()) throw FormatError("checkpoint: trailing bytes after trailer");
  return a;
}

inline void save_checkpoint(const AgentState& a, const std::string& path) {
  const std::string bytes = encode_checkpoint(a);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write checkpoint " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing checkpoint " + path);
}

inline AgentState load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot read checkpoint " + path);
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace udrl::harness
