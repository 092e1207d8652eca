#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlasso/dataset.hpp"
#include "dlasso/penalty.hpp"

namespace dlasso {

enum class InitKind { RidgeWarmStart, Zeros, Supplied };

struct FitConfig {
  PenaltyParams params{};
  double tol = 1e-8;             // sup-norm change stopping threshold
  int max_iter = 500;
  double zero_ratio_eps = 1e-8;  // below this magnitude the grad/beta ratio uses its limit
  // Reported-active-set threshold on the standardized scale. The smooth
  // penalty never produces exact zeros: de-selected coordinates settle on a
  // stationary plateau below ~0.53 s, so the threshold must sit above that
  // plateau for small s (0.53 * 0.001 < 1e-3) yet below genuine coefficients.
  double report_zero_tol = 1e-3;
  InitKind init = InitKind::RidgeWarmStart;
  Eigen::VectorXd supplied_init; // used when init == Supplied
};

struct FitResult {
  Eigen::VectorXd beta;
  std::vector<int> active_set;   // indices with |beta_i| > report_zero_tol
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;        // RSS + lambda * sum_i p(beta_i, s)
  int df_count = 0;
  double df_trace = 0.0;         // trace of the converged smoother hat matrix
  PenaltyParams params{};
};

/// Penalized least-squares objective (y - Xb)'(y - Xb) + lambda sum_i p(b_i, s).
inline double objective(const Dataset& data, const Eigen::VectorXd& beta,
                        const PenaltyParams& params) {
  validate(params);
  if (beta.size() != data.p()) {
    throw std::invalid_argument("objective: coefficient length does not match column count");
  }
  const double rss = (data.y - data.X * beta).squaredNorm();
  if (params.lambda == 0.0) return rss;
  double pen = 0.0;
  for (int j = 0; j < beta.size(); ++j) pen += dlasso_value(beta(j), params.s);
  return rss + params.lambda * pen;
}

/// Diagonal of the reweighting matrix: entry i is lambda * p'(b_i, s) / b_i,
/// replaced by its analytic limit lambda * 4 / (s sqrt(pi)) when |b_i| falls
/// below zero_ratio_eps. The ratio is finite at zero because the penalty is
/// differentiable there, so no coordinate ever has to be dropped. All entries
/// are nonnegative since p'(x) and x share sign.
inline Eigen::VectorXd sigma_diag(const Eigen::VectorXd& beta_prev, const PenaltyParams& params,
                                  double zero_ratio_eps = 1e-8) {
  validate(params);
  const double at_zero = params.lambda * 4.0 / (params.s * kSqrtPi);
  Eigen::VectorXd d(beta_prev.size());
  for (int j = 0; j < beta_prev.size(); ++j) {
    const double b = beta_prev(j);
    d(j) = std::fabs(b) < zero_ratio_eps ? at_zero
                                         : params.lambda * dlasso_grad(b, params.s) / b;
  }
  return d;
}

/// Sup-norm of the objective gradient -2 X'(y - Xb) + lambda p'(b) applied
/// elementwise; a stationarity certificate for converged fits.
inline double stationarity_residual(const Dataset& data, const Eigen::VectorXd& beta,
                                    const PenaltyParams& params) {
  Eigen::VectorXd g = -2.0 * (data.X.transpose() * (data.y - data.X * beta));
  for (int j = 0; j < beta.size(); ++j) g(j) += params.lambda * dlasso_grad(beta(j), params.s);
  return g.lpNorm<Eigen::Infinity>();
}

namespace detail {

// Effective reweighting used inside the iteration. The objective's gradient
// is -2X'(y - Xb) + lambda p'(b); matching the normal-equations form
// (X'X + D) b = X'y therefore needs D_ii = (lambda/2) p'(b_i)/b_i, i.e. the
// reported sigma_diag at half weight. With the full weight the fixed point
// would solve the problem at 2*lambda instead.
inline Eigen::VectorXd effective_sigma(const Eigen::VectorXd& beta, const PenaltyParams& params,
                                       double zero_ratio_eps) {
  PenaltyParams half = params;
  half.lambda = 0.5 * params.lambda;
  return sigma_diag(beta, half, zero_ratio_eps);
}

inline double trace_hat(const Eigen::MatrixXd& XtX, const Eigen::VectorXd& sigma_eff) {
  Eigen::MatrixXd A = XtX;
  A.diagonal() += sigma_eff;
  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  return llt.solve(XtX).trace();
}

}  // namespace detail

/// Fit the penalized problem by iteratively reweighted ridge updates
/// b <- (X'X + D(b_prev))^-1 X'y until the sup-norm change drops below tol.
///
/// The smooth penalty majorizes its own quadratic expansion, so the update
/// normally decreases the objective; if floating-point or a non-convex regime
/// breaks that, the step is halved toward the previous iterate up to 20 times
/// and the fit is flagged not converged when no decrease can be found.
/// Exact zeros never arise from the smooth penalty; the reported active set
/// thresholds |b_i| at report_zero_tol.
inline FitResult fit(const Dataset& data, const FitConfig& cfg) {
  validate(cfg.params);
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("fit: tol must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("fit: max_iter must be at least 1");

  const int p = data.p();
  const Eigen::MatrixXd XtX = data.X.transpose() * data.X;
  const Eigen::VectorXd Xty = data.X.transpose() * data.y;

  FitResult res;
  res.params = cfg.params;

  if (cfg.params.lambda == 0.0) {
    // unpenalized: the update is the normal equations in one step
    const Eigen::LLT<Eigen::MatrixXd> llt(XtX);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("fit: X'X is singular with lambda = 0");
    }
    res.beta = llt.solve(Xty);
    res.iterations = 1;
    res.converged = true;
  } else {
    Eigen::VectorXd beta;
    switch (cfg.init) {
      case InitKind::Zeros:
        beta = Eigen::VectorXd::Zero(p);
        break;
      case InitKind::Supplied:
        if (cfg.supplied_init.size() != p) {
          throw std::invalid_argument("fit: supplied initial vector has wrong length");
        }
        beta = cfg.supplied_init;
        break;
      case InitKind::RidgeWarmStart: {
        Eigen::MatrixXd A = XtX;
        A.diagonal().array() += cfg.params.lambda;
        const Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) {
          throw std::runtime_error("fit: ridge warm start system is singular");
        }
        beta = llt.solve(Xty);
        break;
      }
    }

    double obj_prev = objective(data, beta, cfg.params);
    for (int it = 1; it <= cfg.max_iter; ++it) {
      res.iterations = it;
      Eigen::MatrixXd A = XtX;
      A.diagonal() += detail::effective_sigma(beta, cfg.params, cfg.zero_ratio_eps);
      const Eigen::LLT<Eigen::MatrixXd> llt(A);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("fit: singular system at iteration " + std::to_string(it));
      }
      Eigen::VectorXd next = llt.solve(Xty);
      double obj_next = objective(data, next, cfg.params);

      const double slack = 1e-12 * (1.0 + std::fabs(obj_prev));
      if (obj_next > obj_prev + slack) {
        bool recovered = false;
        Eigen::VectorXd dir = next - beta;
        for (int h = 1; h <= 20; ++h) {
          dir *= 0.5;
          Eigen::VectorXd cand = beta + dir;
          const double obj_cand = objective(data, cand, cfg.params);
          if (obj_cand <= obj_prev + slack) {
            next = std::move(cand);
            obj_next = obj_cand;
            recovered = true;
            break;
          }
        }
        if (!recovered) {
          res.converged = false;
          break;  // keep the previous iterate; the objective never got worse
        }
      }

      const double delta = (next - beta).lpNorm<Eigen::Infinity>();
      beta = std::move(next);
      obj_prev = obj_next;
      if (delta < cfg.tol) {
        res.converged = true;
        break;
      }
    }
    res.beta = std::move(beta);
  }

  res.objective = objective(data, res.beta, cfg.params);
  for (int j = 0; j < p; ++j) {
    if (std::fabs(res.beta(j)) > cfg.report_zero_tol) res.active_set.push_back(j);
  }
  res.df_count = static_cast<int>(res.active_set.size());
  res.df_trace = detail::trace_hat(
      XtX, cfg.params.lambda == 0.0
               ? Eigen::VectorXd::Zero(p).eval()
               : detail::effective_sigma(res.beta, cfg.params, cfg.zero_ratio_eps));
  return res;
}

/// JSON document for a fit: coefficients keyed by feature name on both the
/// fitted (standardized) and original scales, plus the scalar diagnostics.
inline nlohmann::json fit_result_to_json(const FitResult& res, const Dataset& data) {
  nlohmann::json coef;
  for (int j = 0; j < data.p(); ++j) coef[data.feature_names[j]] = res.beta(j);
  const auto [orig, intercept] = original_scale_coefficients(data, res.beta);
  nlohmann::json coef_orig;
  for (int j = 0; j < data.p(); ++j) coef_orig[data.feature_names[j]] = orig(j);

  nlohmann::json j;
  j["coefficients"] = coef;
  j["coefficients_original"] = coef_orig;
  j["intercept_original"] = intercept;
  j["df_count"] = res.df_count;
  j["df_trace"] = res.df_trace;
  j["objective"] = res.objective;
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["params"] = {{"lambda", res.params.lambda}, {"s", res.params.s}};
  return j;
}

}  // namespace dlasso
