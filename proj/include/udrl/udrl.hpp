#pragma once

#include "udrl/behavior/neural.hpp"
#include "udrl/behavior/select.hpp"
#include "udrl/behavior/tabular.hpp"
#include "udrl/commands.hpp"
#include "udrl/config.hpp"
#include "udrl/env/registry.hpp"
#include "udrl/harness/checkpoint.hpp"
#include "udrl/harness/metrics.hpp"
#include "udrl/harness/stats.hpp"
#include "udrl/harness/sweep.hpp"
#include "udrl/nn/adam.hpp"
#include "udrl/nn/network.hpp"
#include "udrl/replay.hpp"
#include "udrl/rollout.hpp"
#include "udrl/trainer.hpp"
