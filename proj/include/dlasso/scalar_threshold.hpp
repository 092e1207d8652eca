#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dlasso/penalty.hpp"

namespace dlasso {

/// One observation of the identity-design model y = beta + eps.
struct ThresholdQuery {
  double y = 0.0;
  PenaltyParams params{};
};

/// Global minimizer of (y - b)^2 + lambda * p(b, s) over b.
///
/// The objective is non-convex for small s, so the stationarity equation
/// 2(b - y) + lambda p'(b, s) = 0 can have several roots. All sign-change
/// brackets on [-|y|-1, |y|+1] are collected at resolution min(s, 1)/100,
/// polished by bisection to 1e-12, and the objective is compared across the
/// roots plus b = 0 and b = y. Because |p'| <= kDlassoGradSup, every root
/// lies within lambda * kDlassoGradSup / 2 of y, which bounds the scan.
inline double scalar_estimate(const ThresholdQuery& q) {
  validate(q.params);
  if (!std::isfinite(q.y)) {
    throw std::domain_error("scalar_estimate: observation must be finite");
  }
  const double y = q.y;
  const double lam = q.params.lambda;
  const double s = q.params.s;

  const auto objective = [&](double b) { return (y - b) * (y - b) + lam * dlasso_value(b, s); };
  const auto stationarity = [&](double b) { return 2.0 * (b - y) + lam * dlasso_grad(b, s); };

  const double step = std::min(s, 1.0) / 100.0;
  const double radius = 0.5 * lam * kDlassoGradSup + 2.0 * step;
  const double lo = std::max(-std::fabs(y) - 1.0, y - radius);
  const double hi = std::min(std::fabs(y) + 1.0, y + radius);

  std::vector<double> candidates{0.0, y};
  double a = lo;
  double fa = stationarity(a);
  while (a < hi) {
    const double b = std::min(a + step, hi);
    const double fb = stationarity(b);
    if (fa == 0.0) {
      candidates.push_back(a);
    } else if (fa * fb < 0.0) {
      // bisect the bracket down to 1e-12
      double ra = a, rb = b, va = fa;
      for (int it = 0; it < 100 && rb - ra > 1e-12; ++it) {
        const double mid = 0.5 * (ra + rb);
        const double vm = stationarity(mid);
        if (vm == 0.0) { ra = rb = mid; break; }
        if (va * vm < 0.0) {
          rb = mid;
        } else {
          ra = mid;
          va = vm;
        }
      }
      candidates.push_back(0.5 * (ra + rb));
    }
    if (b >= hi) {
      if (fb == 0.0) candidates.push_back(b);
      break;
    }
    a = b;
    fa = fb;
  }

  double best = candidates.front();
  double best_obj = objective(best);
  for (double c : candidates) {
    const double o = objective(c);
    if (o < best_obj || (o == best_obj && std::fabs(c) < std::fabs(best))) {
      best = c;
      best_obj = o;
    }
  }
  // the minimizer always lies between 0 and y
  return std::clamp(best, std::min(0.0, y), std::max(0.0, y));
}

}  // namespace dlasso
