#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dlasso/rng.hpp"
#include "dlasso/special_fn.hpp"
#include "oracles.hpp"

using namespace dlasso;

TEST_CASE("erf_reference basic values") {
  CHECK(erf_reference(0.0) == 0.0);
  // defining-integral oracle
  CHECK(std::fabs(erf_reference(1.0) - oracles::erf_quadrature(1.0)) < 1e-12);
  for (double x : {0.25, 0.5, 1.5, 2.0, 2.7, 3.3, 4.5}) {
    CAPTURE(x);
    CHECK(std::fabs(erf_reference(x) - oracles::erf_quadrature(x)) < 1e-12);
  }
}

TEST_CASE("erf_reference odd symmetry and accuracy contract") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double x = (rng.uniform() - 0.5) * 16.0;
    CHECK(erf_reference(x) + erf_reference(-x) == 0.0);
  }
  // libm as an independent cross-check of the 1e-14 absolute accuracy
  double max_err = 0.0;
  for (double x = -8.0; x <= 8.0; x += 1e-3) {
    max_err = std::max(max_err, std::fabs(erf_reference(x) - std::erf(x)));
  }
  CHECK(max_err < 1e-14);
}

TEST_CASE("erf_reference monotone and bounded") {
  double prev = erf_reference(-10.0);
  for (double x = -10.0; x <= 10.0; x += 1e-2) {
    const double v = erf_reference(x);
    CHECK(v >= prev);
    CHECK(std::fabs(v) <= 1.0);
    prev = v;
  }
}

TEST_CASE("erf_reference rejects non-finite input") {
  CHECK_THROWS_AS(erf_reference(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK_THROWS_AS(erf_reference(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("Taylor series forms agree on the overlap") {
  // the two expansions are housed here as independent long-double oracles
  for (double x = -2.0; x <= 2.0; x += 1e-2) {
    CHECK(std::fabs(oracles::erf_series_small_ld(x) - oracles::erf_series_scaled_ld(x)) < 1e-12);
    CHECK(std::fabs(erf_reference(x) - oracles::erf_series_scaled_ld(x)) < 1e-13);
  }
}

TEST_CASE("erf_tanh_fast") {
  CHECK(erf_tanh_fast(0.0) == 0.0);
  CHECK(std::fabs(erf_tanh_fast(10.0) - 1.0) < 1e-6);  // saturation

  // measured error bound of the composite, recorded from a grid scan
  double max_err = 0.0;
  for (double x = -5.0; x <= 5.0; x += 1e-3) {
    max_err = std::max(max_err, std::fabs(erf_tanh_fast(x) - erf_reference(x)));
  }
  CHECK(max_err < 1.3e-4);
  CHECK(max_err > 1.0e-4);  // regression band: the kernel is no better than this
}

TEST_CASE("cdf_piecewise_sine") {
  CHECK(cdf_piecewise_sine(0.0) == 0.5);

  SECTION("bounded in [0,1] and continuous at the breakpoints") {
    for (double x = -8.0; x <= 8.0; x += 1e-3) {
      const double v = cdf_piecewise_sine(x);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    const double b = 1.513859;
    CHECK(std::fabs(cdf_piecewise_sine(b - 1e-9) - cdf_piecewise_sine(b + 1e-9)) < 1e-4);
    CHECK(std::fabs(cdf_piecewise_sine(-b - 1e-9) - cdf_piecewise_sine(-b + 1e-9)) < 1e-4);
  }

  SECTION("central-branch symmetry") {
    for (double x = 0.0; x <= 1.513859; x += 1e-3) {
      CHECK(std::fabs(cdf_piecewise_sine(x) + cdf_piecewise_sine(-x) - 1.0) < 2e-4);
    }
  }

  SECTION("measured accuracy against the reference cdf") {
    // The stated 1e-4 bound does not hold for this functional form; the
    // grid-scan oracle measures ~6.0e-3 near |x| = 2.2 (see the acceptance
    // suite, criterion 4, for the bound as stated). Freeze the measurement.
    double max_err = 0.0;
    for (double x = -8.0; x <= 8.0; x += 1e-3) {
      max_err = std::max(max_err, std::fabs(cdf_piecewise_sine(x) - normal_cdf(x)));
    }
    CHECK(max_err < 6.1e-3);
    CHECK(max_err > 5.9e-3);
  }
}

TEST_CASE("normal_pdf_halfvar") {
  CHECK(normal_pdf_halfvar(0.0) == 1.0 / kSqrtPi);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double x = (rng.uniform() - 0.5) * 12.0;
    CHECK(normal_pdf_halfvar(x) == normal_pdf_halfvar(-x));
  }
  const double mass = oracles::integrate([](double t) { return normal_pdf_halfvar(t); }, -6.0,
                                         6.0, 1e-12);
  CHECK(std::fabs(mass - 1.0) < 1e-8);
}

TEST_CASE("normal cdf helpers") {
  CHECK(std::fabs(normal_cdf(0.0) - 0.5) < 1e-15);
  CHECK(std::fabs(normal_cdf(1.959963984540054) - 0.975) < 1e-9);
  // Phi(x, 0, 1/sqrt(2)) = Phi(x sqrt(2), 0, 1)
  for (double x : {-2.0, -0.3, 0.7, 1.9}) {
    CHECK(std::fabs(normal_cdf_halfvar(x) - normal_cdf(x * kSqrt2)) < 1e-14);
  }
}

TEST_CASE("kernel dispatch covers every kind") {
  for (ErfKernel k : {ErfKernel::Reference, ErfKernel::TaylorSmall, ErfKernel::TaylorScaled,
                      ErfKernel::TanhFast}) {
    CHECK(std::fabs(eval_erf_kernel(k, 0.5) - erf_reference(0.5)) < 2e-4);
    CHECK(eval_erf_kernel(k, 0.5) <= 1.0);
    CHECK(eval_erf_kernel(k, -0.5) >= -1.0);
  }
  CHECK(std::fabs(eval_erf_kernel(ErfKernel::AsymptoticComplement, 5.0) - erf_reference(5.0)) <
        1e-14);
  CHECK(eval_erf_kernel(ErfKernel::PiecewiseSineCdf, 0.0) == 0.5);
}
