#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dlasso {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.77245385090551602730;  // sqrt(pi)
inline constexpr double kSqrt2 = 1.41421356237309504880;   // sqrt(2)

/// Evaluation kernels for the error function and the normal cdf.
/// Reference is the accurate double-precision route; the others are the
/// fast or partial approximations it is benchmarked against.
enum class ErfKernel {
  Reference,
  TaylorSmall,           // alternating Maclaurin series
  TaylorScaled,          // exp-scaled series, cancellation-free
  AsymptoticComplement,  // large-argument erfc expansion
  TanhFast,              // tanh/arctan composite
  PiecewiseSineCdf       // piecewise two-sine normal cdf
};

namespace detail {

inline void require_finite(double x, const char* where) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(where) + ": argument must be finite");
  }
}

// Alternating Maclaurin series; term magnitudes grow like x^2j/j! before
// decaying, so this route is only accurate for small |x|.
inline double erf_series_alternating(double x) {
  const double x2 = x * x;
  double power = x;   // (-1)^j x^(2j+1) / j!
  double sum = x;
  for (int j = 1; j < 200; ++j) {
    power *= -x2 / j;
    const double term = power / (2 * j + 1);
    sum += term;
    if (std::fabs(term) < 1e-17 * kSqrtPi / 2.0) break;
  }
  return (2.0 / kSqrtPi) * sum;
}

// Exp-scaled series with all-positive terms; no cancellation, usable for
// moderate |x| where the alternating form loses digits.
inline double erf_series_scaled(double x) {
  const double x2 = x * x;
  double term = 1.0;  // (2x^2)^j / (2j+1)!!
  double sum = 1.0;
  for (int j = 0; j < 500; ++j) {
    term *= 2.0 * x2 / (2 * j + 3);
    sum += term;
    if (term < 1e-17 * sum && 2.0 * x2 < 2 * j + 3) break;
  }
  return (2.0 * x * std::exp(-x2) / kSqrtPi) * sum;
}

// Complementary asymptotic expansion for x > 0. The series diverges, so we
// stop at the smallest-magnitude term (optimal truncation).
inline double erfc_asymptotic_pos(double x) {
  const double x2 = x * x;
  const double prefactor = std::exp(-x2) / (x * kSqrtPi);
  if (prefactor == 0.0) return 0.0;
  double term = 1.0;  // (-1)^j (2j)! / (j! (2x)^(2j))
  double sum = 1.0;
  for (int j = 0; j < 400; ++j) {
    const double next = term * -(2.0 * j + 1.0) / (2.0 * x2);
    if (std::fabs(next) >= std::fabs(term)) break;
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return prefactor * sum;
}

}  // namespace detail

/// erf(x) to absolute accuracy <= 1e-14: alternating series for |x| <= 1.5,
/// cancellation-free scaled series up to |x| = 4, complementary asymptotic
/// expansion beyond. Odd symmetry is exact by construction.
inline double erf_reference(double x) {
  detail::require_finite(x, "erf_reference");
  const double ax = std::fabs(x);
  double r;
  if (ax <= 1.5) {
    r = detail::erf_series_alternating(ax);
  } else if (ax <= 4.0) {
    r = detail::erf_series_scaled(ax);
  } else {
    r = 1.0 - detail::erfc_asymptotic_pos(ax);
  }
  return x < 0.0 ? -r : r;
}

/// 1 - erf(x), accurate in absolute terms (relative accuracy only for x > 4
/// where the asymptotic route applies).
inline double erfc_reference(double x) {
  detail::require_finite(x, "erfc_reference");
  if (x > 4.0) return detail::erfc_asymptotic_pos(x);
  if (x < -4.0) return 2.0 - detail::erfc_asymptotic_pos(-x);
  return 1.0 - erf_reference(x);
}

/// tanh/arctan composite approximation of erf.
inline double erf_tanh_fast(double x) {
  detail::require_finite(x, "erf_tanh_fast");
  return std::tanh(39.0 * x / (2.0 * kSqrtPi) -
                   (111.0 / 2.0) * std::atan(35.0 * x / (111.0 * kSqrtPi)));
}

/// Piecewise two-sine approximation of the standard normal cdf with
/// breakpoints at +-1.513859. The tails decay like exp(-1.78|x|).
inline double cdf_piecewise_sine(double x) {
  detail::require_finite(x, "cdf_piecewise_sine");
  constexpr double kBreak = 1.513859;
  if (x > kBreak) {
    return 1.0 - std::exp(-1.78 * x) + x * std::exp(-(x + 10.0));
  }
  if (x < -kBreak) {
    const double ax = -x;
    return std::exp(-1.78 * ax) - ax * std::exp(-(ax + 10.0));
  }
  return (std::sin(kPi * x / 10.0) + std::sin(x)) / (1.9 * kSqrtPi) + 0.5;
}

/// Density of N(0, 1/2) at x, i.e. exp(-x^2)/sqrt(pi).
inline double normal_pdf_halfvar(double x) { return std::exp(-x * x) / kSqrtPi; }

/// Standard normal cdf via the reference erf.
inline double normal_cdf(double x) {
  detail::require_finite(x, "normal_cdf");
  return 0.5 * erfc_reference(-x / kSqrt2);
}

/// cdf of N(0, 1/2) at x; equals Phi(x * sqrt(2), 0, 1).
inline double normal_cdf_halfvar(double x) {
  detail::require_finite(x, "normal_cdf_halfvar");
  return 0.5 * erfc_reference(-x);
}

/// Single-point kernel dispatch used by the benchmark command. For
/// PiecewiseSineCdf the value is a cdf, not an erf.
inline double eval_erf_kernel(ErfKernel kind, double x) {
  switch (kind) {
    case ErfKernel::Reference: return erf_reference(x);
    case ErfKernel::TaylorSmall: return detail::erf_series_alternating(x);
    case ErfKernel::TaylorScaled: return detail::erf_series_scaled(x);
    case ErfKernel::AsymptoticComplement: {
      const double r = 1.0 - detail::erfc_asymptotic_pos(std::fabs(x));
      return x < 0.0 ? -r : r;
    }
    case ErfKernel::TanhFast: return erf_tanh_fast(x);
    case ErfKernel::PiecewiseSineCdf: return cdf_piecewise_sine(x);
  }
  throw std::invalid_argument("eval_erf_kernel: unknown kernel");
}

inline const char* erf_kernel_name(ErfKernel kind) {
  switch (kind) {
    case ErfKernel::Reference: return "reference";
    case ErfKernel::TaylorSmall: return "taylor_small";
    case ErfKernel::TaylorScaled: return "taylor_scaled";
    case ErfKernel::AsymptoticComplement: return "asymptotic_complement";
    case ErfKernel::TanhFast: return "tanh_fast";
    case ErfKernel::PiecewiseSineCdf: return "piecewise_sine_cdf";
  }
  return "unknown";
}

}  // namespace dlasso
