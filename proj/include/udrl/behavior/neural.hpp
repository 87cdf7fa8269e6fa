#pragma once

#include <vector>

#include "udrl/error.hpp"
#include "udrl/nn/network.hpp"
#include "udrl/types.hpp"

namespace udrl::behavior {

inline nn::Vector command_input(const Command& cmd, const CommandScales& scales) {
  nn::Vector c(2);
  c(0) = cmd.desired_return * scales.return_scale;
  c(1) = static_cast<double>(cmd.desired_horizon) * scales.horizon_scale;
  return c;
}

inline ActionDistribution head_distribution(const nn::NetworkSpec& spec, const nn::Vector& raw) {
  ActionDistribution d;
  if (spec.head == nn::HeadKind::categorical) {
    const nn::Vector p = nn::softmax(raw);
    d.probs.assign(p.data(), p.data() + p.size());
  } else {
    const auto k = static_cast<Eigen::Index>(spec.head_size);
    const nn::GaussianParams g = nn::gaussian_head(raw.head(k), raw.tail(k));
    d.mean.assign(g.mean.data(), g.mean.data() + k);
    d.log_std.assign(g.log_std.data(), g.log_std.data() + k);
  }
  return d;
}

// B(s, c; theta): one forward pass on (observation, scaled command).
inline ActionDistribution neural_bf_predict(const nn::Network& net, const Observation& obs,
                                            const Command& cmd, const CommandScales& scales) {
  const auto& f = obs.features;
  nn::Vector o = Eigen::Map<const nn::Vector>(f.data(), static_cast<Eigen::Index>(f.size()));
  if (!o.allFinite()) throw NumericError("non-finite observation");
  return head_distribution(net.spec(), net.forward_one(o, command_input(cmd, scales)));
}

class NeuralBehavior {
public:
  NeuralBehavior(const nn::Network& net, CommandScales scales) : net_(&net), scales_(scales) {}

  ActionDistribution distribution(const Observation& obs, const Command& cmd) const {
    return neural_bf_predict(*net_, obs, cmd, scales_);
  }

private:
  const nn::Network* net_;
  CommandScales scales_;
};

}  // namespace udrl::behavior
