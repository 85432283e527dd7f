#pragma once

// Umbrella header for the dppgd library: gradient-free distributed
// optimization over directed graphs via surplus-based consensus and
// two-point pseudo-gradients.

#include "dppgd/errors.hpp"
#include "dppgd/rng.hpp"
#include "dppgd/numfit.hpp"
#include "dppgd/graph.hpp"
#include "dppgd/weights.hpp"
#include "dppgd/spectral.hpp"
#include "dppgd/projection.hpp"
#include "dppgd/schedule.hpp"
#include "dppgd/oracle.hpp"
#include "dppgd/core.hpp"
#include "dppgd/problems.hpp"
#include "dppgd/baselines.hpp"
#include "dppgd/metrics.hpp"
#include "dppgd/config.hpp"
#include "dppgd/experiment.hpp"
