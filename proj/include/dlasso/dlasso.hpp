#pragma once

// Regularized regression with the differentiable dlasso penalty
// p(x, s) = x * erf(x / s): penalty kernels, the reweighted-ridge solver,
// tuning criteria, baselines and the simulation scenarios.

#include "dlasso/special_fn.hpp"
#include "dlasso/penalty.hpp"
#include "dlasso/scalar_threshold.hpp"
#include "dlasso/dataset.hpp"
#include "dlasso/csv.hpp"
#include "dlasso/baselines.hpp"
#include "dlasso/solver.hpp"
#include "dlasso/model_select.hpp"
#include "dlasso/simgen.hpp"
#include "dlasso/rng.hpp"
