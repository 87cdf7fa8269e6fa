#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "udrl/error.hpp"
#include "udrl/trainer.hpp"

namespace udrl::harness {

inline constexpr const char* kMetricsHeader =
    "env_steps,eval_mean_return,eval_std_return,train_loss,wall_time_s";

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream os;
  os << kMetricsHeader << '\n';
  for (const auto& r : rows)
    os << r.env_steps << ',' << format_number(r.eval_mean_return) << ','
       << format_number(r.eval_std_return) << ',' << format_number(r.train_loss) << ','
       << format_number(r.wall_time_s) << '\n';
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("failed writing " + path);
}

}  // namespace udrl::harness
