#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "dlasso/special_fn.hpp"

namespace dlasso {

/// Shape and weight of the penalty term lambda * sum_i p(beta_i, s) with
/// p(x, s) = x * erf(x / s). Small s makes p hug |x|; s = 2/sqrt(pi) makes it
/// behave like x^2 near the origin.
struct PenaltyParams {
  double s = 1.0;       // shape, same units as the coefficients
  double lambda = 0.0;  // regularization weight
};

inline void validate(const PenaltyParams& p) {
  if (!(p.s > 0.0) || !std::isfinite(p.s)) {
    throw std::invalid_argument("PenaltyParams: shape s must be positive and finite");
  }
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) {
    throw std::invalid_argument("PenaltyParams: lambda must be nonnegative and finite");
  }
}

/// Smooth stand-ins for |x| used in the approximation comparison.
enum class SmoothAbsKind { Dlasso, SqrtShift, LogExp };

namespace detail {

inline void require_shape(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("penalty: shape parameter s must be positive and finite");
  }
}

}  // namespace detail

/// p(x, s) = x * erf(x / s). Even in x, nonnegative, bounded by |x|.
inline double dlasso_value(double x, double s) {
  detail::require_shape(s);
  return x * erf_reference(x / s);
}

/// d/dx p(x, s) = erf(x/s) + 2 (x/s) phi(x/s, 0, 1/sqrt(2)). Odd, bounded by
/// 1 + 2/sqrt(2 e pi) in magnitude.
inline double dlasso_grad(double x, double s) {
  detail::require_shape(s);
  const double u = x / s;
  return erf_reference(u) + 2.0 * u * normal_pdf_halfvar(u);
}

// sup_x |d/dx p(x, s)|, attained at |x| = s. Used to bracket stationary
// points of scalar objectives built on the penalty.
inline constexpr double kDlassoGradSup = 1.2578075;

/// d^2/dx^2 p(x, s) = 4 phi(x/s, 0, 1/sqrt(2)) (1 - (x/s)^2) / s.
/// Positive exactly when |x| < s.
inline double dlasso_hess(double x, double s) {
  detail::require_shape(s);
  const double u = x / s;
  return 4.0 * normal_pdf_halfvar(u) * (1.0 - u * u) / s;
}

/// Gap |x| - p(x, s) together with its analytic bound 2 s phi(x/s, 0, 1/sqrt(2)).
/// Contract: 0 <= gap <= bound for every finite x and s > 0.
inline std::pair<double, double> abs_gap_bound(double x, double s) {
  detail::require_shape(s);
  const double gap = std::fabs(x) - dlasso_value(x, s);
  const double bound = 2.0 * s * normal_pdf_halfvar(x / s);
  return {gap, bound};
}

/// Smooth |x| approximations. LogExp is rearranged so the exponentials never
/// overflow: s log(2 + e^(-x/s) + e^(x/s)) = |x| + s log(1 + 2e^(-m) + e^(-2m))
/// with m = |x|/s.
inline double smooth_abs(SmoothAbsKind kind, double x, double s) {
  detail::require_shape(s);
  switch (kind) {
    case SmoothAbsKind::Dlasso:
      return dlasso_value(x, s);
    case SmoothAbsKind::SqrtShift:
      return std::sqrt(x * x + s * s);
    case SmoothAbsKind::LogExp: {
      const double m = std::fabs(x) / s;
      const double e = std::exp(-m);
      return std::fabs(x) + s * std::log1p(2.0 * e + e * e);
    }
  }
  throw std::invalid_argument("smooth_abs: unknown kind");
}

/// Lower-bound companion of SqrtShift: x^2 / sqrt(x^2 + s^2). Kept for the
/// approximation benchmark only; it is not a fit-able penalty.
inline double sqrt_shift_lower(double x, double s) {
  detail::require_shape(s);
  return x * x / std::sqrt(x * x + s * s);
}

/// Dlasso penalty with a selectable erf backend; the fast backend trades
/// ~1e-5 absolute accuracy for speed.
class DlassoPenalty {
 public:
  explicit DlassoPenalty(double s, bool fast_erf = false) : s_(s), fast_(fast_erf) {
    detail::require_shape(s);
  }

  double value(double x) const { return x * erf(x / s_); }
  double grad(double x) const {
    const double u = x / s_;
    return erf(u) + 2.0 * u * normal_pdf_halfvar(u);
  }
  double hess(double x) const {
    const double u = x / s_;
    return 4.0 * normal_pdf_halfvar(u) * (1.0 - u * u) / s_;
  }
  double shape() const { return s_; }
  bool fast() const { return fast_; }

 private:
  double erf(double u) const { return fast_ ? erf_tanh_fast(u) : erf_reference(u); }

  double s_;
  bool fast_;
};

}  // namespace dlasso
