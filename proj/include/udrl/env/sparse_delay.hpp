#pragma once

#include <memory>

#include "udrl/env/env.hpp"

namespace udrl::env {

// Withholds every reward until the terminal step, which then pays the whole
// accumulated episode return. Total return is conserved exactly because the
// sum is accumulated in step order.
class SparseDelay final : public Env {
public:
  explicit SparseDelay(std::unique_ptr<Env> inner) : inner_(std::move(inner)) {
    if (!inner_) throw UsageError("SparseDelay: null environment");
    desc_ = inner_->descriptor();
    desc_.id = desc_.id + "-sparse";
  }

  const EnvDescriptor& descriptor() const override { return desc_; }
  std::vector<int> valid_actions() const override { return inner_->valid_actions(); }
  Env& inner() { return *inner_; }

protected:
  Observation do_reset(std::uint64_t seed) override {
    accumulated_ = 0.0;
    return inner_->reset(seed);
  }

  StepResult do_step(const Action& action) override {
    StepResult r = inner_->step(action);
    accumulated_ += r.reward;
    r.reward = r.done ? accumulated_ : 0.0;
    return r;
  }

private:
  std::unique_ptr<Env> inner_;
  EnvDescriptor desc_;
  double accumulated_ = 0.0;
};

}  // namespace udrl::env
