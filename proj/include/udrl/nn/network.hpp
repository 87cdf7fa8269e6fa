#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "udrl/error.hpp"
#include "udrl/nn/orthogonal.hpp"
#include "udrl/rng.hpp"

namespace udrl::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class FastNet { gated, bilinear };
enum class HeadKind { categorical, gaussian };
enum class Activation { relu, tanh };

inline std::string to_string(FastNet f) { return f == FastNet::gated ? "gated" : "bilinear"; }
inline std::string to_string(HeadKind h) {
  return h == HeadKind::categorical ? "categorical" : "gaussian";
}
inline std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

inline FastNet fast_net_from_string(std::string_view s) {
  if (s == "gated") return FastNet::gated;
  if (s == "bilinear") return FastNet::bilinear;
  throw ConfigError("fast_net_option", "expected gated or bilinear, got '" + std::string(s) + "'");
}
inline Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw ConfigError("activation", "expected relu or tanh, got '" + std::string(s) + "'");
}

// Shape of a behavior network. The first layer is always the fast-weight
// layer consuming (observation, command); the rest are dense.
struct NetworkSpec {
  std::size_t observation_dim = 0;
  std::size_t command_dim = 2;
  std::vector<std::size_t> hidden_sizes;
  FastNet fast_net = FastNet::gated;
  HeadKind head = HeadKind::categorical;
  // Number of classes for a categorical head, action dimension for a gaussian one.
  std::size_t head_size = 0;
  Activation activation = Activation::relu;

  std::size_t output_dim() const { return head == HeadKind::categorical ? head_size : 2 * head_size; }

  void validate() const {
    if (observation_dim == 0) throw ConfigError("observation_dim", "must be positive");
    if (command_dim == 0) throw ConfigError("command_dim", "must be positive");
    if (hidden_sizes.empty()) throw ConfigError("hidden_sizes", "need at least one hidden layer");
    for (auto h : hidden_sizes)
      if (h == 0) throw ConfigError("hidden_sizes", "zero-sized layer");
    if (head_size == 0) throw ConfigError("head_size", "must be positive");
  }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

// One minibatch. Columns are samples.
struct Batch {
  Matrix observations;             // observation_dim x B
  Matrix commands;                 // command_dim x B (already scaled)
  std::vector<int> target_classes; // categorical head
  Matrix target_actions;           // action_dim x B, gaussian head

  Eigen::Index size() const { return observations.cols(); }
};

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

// Stable softmax. Non-finite logits are rejected.
inline Vector softmax(const Eigen::Ref<const Vector>& logits) {
  if (!logits.allFinite()) throw NumericError("softmax: non-finite logit");
  const double mx = logits.maxCoeff();
  Vector e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

inline constexpr double kLogStdMin = -6.0;
inline constexpr double kLogStdMax = 2.0;

struct GaussianParams {
  Vector mean;
  Vector log_std;
};

// Squashes raw outputs: mean into (-1, 1) by tanh, log-std into (-6, 2) by a
// scaled sigmoid.
inline GaussianParams gaussian_head(const Eigen::Ref<const Vector>& raw_mean,
                                    const Eigen::Ref<const Vector>& raw_logstd) {
  if (!raw_mean.allFinite() || !raw_logstd.allFinite())
    throw NumericError("gaussian_head: non-finite input");
  GaussianParams g;
  g.mean = raw_mean.array().tanh().matrix();
  g.log_std.resize(raw_logstd.size());
  for (Eigen::Index i = 0; i < raw_logstd.size(); ++i)
    g.log_std(i) = kLogStdMin + (kLogStdMax - kLogStdMin) * sigmoid(raw_logstd(i));
  return g;
}

// Intermediates of a batched forward pass, consumed by Network::backward.
struct ForwardPass {
  bool valid = false;
  Matrix observations;
  Matrix commands;
  // Fast layer.
  Matrix fast_pre;   // gated: V o + q; bilinear: W o + b
  Matrix gate;       // gated only: sigmoid(U c + p)
  Matrix fast_act;   // gated only: f(fast_pre)
  Matrix fast_w;     // bilinear only: U c + p, (hidden*obs) x B
  // Per-layer outputs; layer_out[0] is the fast layer output.
  std::vector<Matrix> layer_pre;  // dense pre-activations (index aligned to layer_out, [0] unused)
  std::vector<Matrix> layer_out;
  Matrix output;  // raw head outputs
};

class Network {
public:
  Network() = default;

  // Orthogonal weights, zero biases, deterministic in `seed`.
  static Network init(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    Network net;
    net.spec_ = spec;
    Rng rng(seed);
    const auto o = static_cast<Eigen::Index>(spec.observation_dim);
    const auto c = static_cast<Eigen::Index>(spec.command_dim);
    const auto h0 = static_cast<Eigen::Index>(spec.hidden_sizes.front());

    auto add = [&net, &rng](std::string name, Eigen::Index rows, Eigen::Index cols, bool bias) {
      Parameter p;
      p.name = std::move(name);
      p.value = bias ? Matrix::Zero(rows, 1) : orthogonal_matrix(rows, cols, rng);
      p.grad = Matrix::Zero(p.value.rows(), p.value.cols());
      net.params_.push_back(std::move(p));
    };

    if (spec.fast_net == FastNet::gated) {
      add("fast.U", h0, c, false);
      add("fast.p", h0, 1, true);
      add("fast.V", h0, o, false);
      add("fast.q", h0, 1, true);
    } else {
      add("fast.U", h0 * o, c, false);
      add("fast.p", h0 * o, 1, true);
      add("fast.V", h0, c, false);
      add("fast.q", h0, 1, true);
    }
    for (std::size_t i = 1; i < spec.hidden_sizes.size(); ++i) {
      const auto in = static_cast<Eigen::Index>(spec.hidden_sizes[i - 1]);
      const auto out = static_cast<Eigen::Index>(spec.hidden_sizes[i]);
      add("dense" + std::to_string(i) + ".W", out, in, false);
      add("dense" + std::to_string(i) + ".b", out, 1, true);
    }
    const auto last = static_cast<Eigen::Index>(spec.hidden_sizes.back());
    const auto out = static_cast<Eigen::Index>(spec.output_dim());
    add("head.W", out, last, false);
    add("head.b", out, 1, true);
    return net;
  }

  const NetworkSpec& spec() const { return spec_; }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }

  Parameter& parameter(std::string_view name) {
    for (auto& p : params_)
      if (p.name == name) return p;
    throw UsageError("no parameter named " + std::string(name));
  }
  const Parameter& parameter(std::string_view name) const {
    return const_cast<Network*>(this)->parameter(name);
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

  void zero_grad() {
    for (auto& p : params_) p.grad.setZero();
  }

  ForwardPass forward(const Matrix& observations, const Matrix& commands) const {
    check_ready();
    const auto o = static_cast<Eigen::Index>(spec_.observation_dim);
    const auto c = static_cast<Eigen::Index>(spec_.command_dim);
    const auto h0 = static_cast<Eigen::Index>(spec_.hidden_sizes.front());
    if (observations.rows() != o)
      throw ShapeError("observation has " + std::to_string(observations.rows()) +
                       " rows, expected " + std::to_string(o));
    if (commands.rows() != c)
      throw ShapeError("command has " + std::to_string(commands.rows()) + " rows, expected " +
                       std::to_string(c));
    if (observations.cols() != commands.cols())
      throw ShapeError("observation and command batch sizes differ");
    const Eigen::Index batch = observations.cols();

    ForwardPass fp;
    fp.observations = observations;
    fp.commands = commands;
    const Matrix& U = params_[0].value;
    const Matrix& p = params_[1].value;
    const Matrix& V = params_[2].value;
    const Matrix& q = params_[3].value;

    Matrix y;
    if (spec_.fast_net == FastNet::gated) {
      // y = f(V o + q) * sigmoid(U c + p)
      fp.fast_pre = (V * observations).colwise() + q.col(0);
      fp.fast_act = activate(fp.fast_pre);
      Matrix gate_pre = (U * commands).colwise() + p.col(0);
      fp.gate = gate_pre.unaryExpr([](double v) { return sigmoid(v); });
      y = fp.fast_act.cwiseProduct(fp.gate);
    } else {
      // W = reshape(U c + p) with row-major layout W(j, k) = w[j * obs + k];
      // y = f(W o + V c + q)
      fp.fast_w = (U * commands).colwise() + p.col(0);
      fp.fast_pre = (V * commands).colwise() + q.col(0);
      for (Eigen::Index s = 0; s < batch; ++s) {
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            w(fp.fast_w.col(s).data(), h0, o);
        fp.fast_pre.col(s).noalias() += w * observations.col(s);
      }
      y = activate(fp.fast_pre);
    }

    fp.layer_pre.emplace_back();
    fp.layer_out.push_back(std::move(y));
    std::size_t idx = 4;
    for (std::size_t i = 1; i < spec_.hidden_sizes.size(); ++i, idx += 2) {
      Matrix pre = (params_[idx].value * fp.layer_out.back()).colwise() + params_[idx + 1].value.col(0);
      Matrix out = activate(pre);
      fp.layer_pre.push_back(std::move(pre));
      fp.layer_out.push_back(std::move(out));
    }
    fp.output = (params_[idx].value * fp.layer_out.back()).colwise() + params_[idx + 1].value.col(0);
    fp.valid = true;
    return fp;
  }

  // Raw head outputs for a single (observation, command) pair.
  Vector forward_one(const Vector& observation, const Vector& command) const {
    return forward(observation, command).output.col(0);
  }

  // Mean negative log-likelihood of the batch targets.
  double loss(const ForwardPass& fp, const Batch& batch) const {
    check_pass(fp, batch);
    const Eigen::Index n = fp.output.cols();
    double total = 0.0;
    if (spec_.head == HeadKind::categorical) {
      for (Eigen::Index s = 0; s < n; ++s) {
        const auto& z = fp.output.col(s);
        if (!z.allFinite()) throw NumericError("loss: non-finite logit");
        const double mx = z.maxCoeff();
        const double lse = mx + std::log((z.array() - mx).exp().sum());
        total += lse - z(batch.target_classes[static_cast<std::size_t>(s)]);
      }
    } else {
      const auto d = static_cast<Eigen::Index>(spec_.head_size);
      const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
      for (Eigen::Index s = 0; s < n; ++s) {
        const GaussianParams g = gaussian_head(fp.output.col(s).head(d), fp.output.col(s).tail(d));
        for (Eigen::Index k = 0; k < d; ++k) {
          const double z = (batch.target_actions(k, s) - g.mean(k)) * std::exp(-g.log_std(k));
          total += 0.5 * z * z + g.log_std(k) + half_log_2pi;
        }
      }
    }
    return total / static_cast<double>(n);
  }

  // Writes d(loss)/d(param) into every Parameter::grad (overwriting).
  void backward(const ForwardPass& fp, const Batch& batch) {
    check_pass(fp, batch);
    const Eigen::Index n = fp.output.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    Matrix d_out(fp.output.rows(), n);
    if (spec_.head == HeadKind::categorical) {
      for (Eigen::Index s = 0; s < n; ++s) {
        d_out.col(s) = softmax(fp.output.col(s));
        d_out(batch.target_classes[static_cast<std::size_t>(s)], s) -= 1.0;
      }
    } else {
      const auto d = static_cast<Eigen::Index>(spec_.head_size);
      for (Eigen::Index s = 0; s < n; ++s) {
        for (Eigen::Index k = 0; k < d; ++k) {
          const double mu = std::tanh(fp.output(k, s));
          const double sg = sigmoid(fp.output(d + k, s));
          const double log_std = kLogStdMin + (kLogStdMax - kLogStdMin) * sg;
          const double inv_var = std::exp(-2.0 * log_std);
          const double diff = batch.target_actions(k, s) - mu;
          const double d_mu = -diff * inv_var;
          const double d_logstd = 1.0 - diff * diff * inv_var;
          d_out(k, s) = d_mu * (1.0 - mu * mu);
          d_out(d + k, s) = d_logstd * (kLogStdMax - kLogStdMin) * sg * (1.0 - sg);
        }
      }
    }
    d_out *= inv_n;

    // Head and dense layers, walking backwards.
    std::size_t idx = params_.size() - 2;
    Matrix delta = d_out;
    for (std::size_t layer = fp.layer_out.size(); layer-- > 0;) {
      const Matrix& in = fp.layer_out[layer];
      params_[idx].grad.noalias() = delta * in.transpose();
      params_[idx + 1].grad = delta.rowwise().sum();
      Matrix d_in = params_[idx].value.transpose() * delta;
      if (layer == 0) {
        delta = std::move(d_in);
        break;
      }
      delta = d_in.cwiseProduct(activation_grad(fp.layer_pre[layer], fp.layer_out[layer]));
      idx -= 2;
    }

    // delta now holds d(loss)/d(fast layer output).
    const auto o = static_cast<Eigen::Index>(spec_.observation_dim);
    const auto h0 = static_cast<Eigen::Index>(spec_.hidden_sizes.front());
    Parameter& U = params_[0];
    Parameter& p = params_[1];
    Parameter& V = params_[2];
    Parameter& q = params_[3];
    if (spec_.fast_net == FastNet::gated) {
      Matrix d_pre = delta.cwiseProduct(fp.gate).cwiseProduct(
          activation_grad(fp.fast_pre, fp.fast_act));
      V.grad.noalias() = d_pre * fp.observations.transpose();
      q.grad = d_pre.rowwise().sum();
      Matrix d_gate_pre = delta.cwiseProduct(fp.fast_act)
                              .cwiseProduct(fp.gate.cwiseProduct((1.0 - fp.gate.array()).matrix()));
      U.grad.noalias() = d_gate_pre * fp.commands.transpose();
      p.grad = d_gate_pre.rowwise().sum();
    } else {
      Matrix act = activate(fp.fast_pre);
      Matrix d_pre = delta.cwiseProduct(activation_grad(fp.fast_pre, act));
      V.grad.noalias() = d_pre * fp.commands.transpose();
      q.grad = d_pre.rowwise().sum();
      Matrix d_w(h0 * o, n);
      for (Eigen::Index s = 0; s < n; ++s)
        for (Eigen::Index j = 0; j < h0; ++j)
          for (Eigen::Index k = 0; k < o; ++k) d_w(j * o + k, s) = d_pre(j, s) * fp.observations(k, s);
      U.grad.noalias() = d_w * fp.commands.transpose();
      p.grad = d_w.rowwise().sum();
    }
  }

private:
  Matrix activate(const Matrix& pre) const {
    if (spec_.activation == Activation::relu) return pre.cwiseMax(0.0);
    return pre.array().tanh().matrix();
  }

  Matrix activation_grad(const Matrix& pre, const Matrix& out) const {
    if (spec_.activation == Activation::relu)
      return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    return (1.0 - out.array().square()).matrix();
  }

  void check_ready() const {
    if (params_.empty()) throw UsageError("network is not initialized");
  }

  void check_pass(const ForwardPass& fp, const Batch& batch) const {
    check_ready();
    if (!fp.valid) throw UsageError("backward/loss called without a forward pass");
    const Eigen::Index n = fp.output.cols();
    if (n == 0) throw UsageError("empty batch");
    if (spec_.head == HeadKind::categorical) {
      if (static_cast<Eigen::Index>(batch.target_classes.size()) != n)
        throw ShapeError("target class count does not match batch");
      for (int t : batch.target_classes)
        if (t < 0 || static_cast<std::size_t>(t) >= spec_.head_size)
          throw ShapeError("target class out of range");
    } else {
      if (batch.target_actions.cols() != n ||
          batch.target_actions.rows() != static_cast<Eigen::Index>(spec_.head_size))
        throw ShapeError("target action matrix shape does not match batch");
    }
  }

  NetworkSpec spec_;
  std::vector<Parameter> params_;
};

// Forward + mean loss in one call.
inline double loss_batch(const Network& net, const Batch& batch) {
  return net.loss(net.forward(batch.observations, batch.commands), batch);
}

}  // namespace udrl::nn
