#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dlasso/rng.hpp"
#include "dlasso/solver.hpp"

namespace dlasso {

/// Model selection rule for tuning (lambda, s).
struct SelectionCriterion {
  enum class Kind { AIC, BIC, GCV, CV };
  Kind kind = Kind::BIC;
  int folds = 10;           // CV only
  std::uint64_t seed = 0;   // CV fold assignment

  static SelectionCriterion aic() { return {Kind::AIC}; }
  static SelectionCriterion bic() { return {Kind::BIC}; }
  static SelectionCriterion gcv() { return {Kind::GCV}; }
  static SelectionCriterion cv(int k, std::uint64_t seed) {
    return {Kind::CV, k, seed};
  }
};

/// Candidate (lambda, s) values, evaluated exhaustively.
struct TuningGrid {
  std::vector<double> lambdas;
  std::vector<double> s_values;

  /// 25 log-spaced lambdas in [1e-3, 1e2] and a small spread of shapes from
  /// lasso-like (0.001) through ridge-like (2/sqrt(pi)) to near-OLS (100),
  /// including the 1/sqrt(n) rule of thumb.
  static TuningGrid defaults(int n) {
    TuningGrid g;
    g.lambdas.resize(25);
    for (int i = 0; i < 25; ++i) {
      g.lambdas[i] = std::pow(10.0, -3.0 + 5.0 * i / 24.0);
    }
    g.s_values = {0.001, 0.01, 1.0 / std::sqrt(static_cast<double>(n)),
                  0.1, 2.0 / kSqrtPi, 1.0, 10.0, 100.0};
    std::sort(g.s_values.begin(), g.s_values.end());
    return g;
  }
};

inline void validate(const TuningGrid& g) {
  if (g.lambdas.empty() || g.s_values.empty()) {
    throw std::invalid_argument("TuningGrid: empty grid");
  }
  for (double l : g.lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("TuningGrid: lambdas must be positive");
  }
  for (double s : g.s_values) {
    if (!(s > 0.0)) throw std::invalid_argument("TuningGrid: s values must be positive");
  }
}

/// Counting and trace degrees of freedom of a fit: the number of reported
/// nonzero coefficients and trace X (X'X + D)^-1 X' of the converged smoother.
inline std::pair<int, double> degrees_of_freedom(const Dataset& data, const FitResult& result,
                                                 const PenaltyParams& params,
                                                 double report_zero_tol = 1e-3) {
  validate(params);
  int count = 0;
  for (int j = 0; j < result.beta.size(); ++j) {
    if (std::fabs(result.beta(j)) > report_zero_tol) ++count;
  }
  const Eigen::MatrixXd XtX = data.X.transpose() * data.X;
  const Eigen::VectorXd sig =
      params.lambda == 0.0 ? Eigen::VectorXd::Zero(data.p()).eval()
                           : detail::effective_sigma(result.beta, params, 1e-8);
  return {count, detail::trace_hat(XtX, sig)};
}

/// Fold label per row: a seeded Fisher-Yates shuffle cut into k contiguous,
/// near-equal blocks.
inline std::vector<int> cv_fold_assignment(int n, int k, std::uint64_t seed) {
  if (k < 2 || k > n) throw std::invalid_argument("cv_fold_assignment: need 2 <= k <= n");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1))]);
  }
  std::vector<int> fold(n);
  for (int i = 0; i < n; ++i) {
    fold[order[i]] = static_cast<int>((static_cast<long long>(i) * k) / n);
  }
  return fold;
}

/// Score a fit under a criterion. AIC/BIC use the profile log-likelihood form
/// n log(RSS/n) plus the counting-df complexity term; GCV uses the trace df.
/// CV(k) refits with the same parameters per fold and averages the held-out
/// mean squared errors. Lower is better for all criteria.
inline double criterion_score(const Dataset& data, const FitResult& result,
                              const SelectionCriterion& crit) {
  const int n = data.n();
  const double rss = (data.y - data.X * result.beta).squaredNorm();

  switch (crit.kind) {
    case SelectionCriterion::Kind::AIC:
    case SelectionCriterion::Kind::BIC: {
      if (!(rss / n > 1e-300)) {
        std::cerr << "criterion_score: zero residual sum of squares, returning sentinel\n";
        return -std::numeric_limits<double>::max();
      }
      const double complexity =
          crit.kind == SelectionCriterion::Kind::AIC ? 2.0 : std::log(static_cast<double>(n));
      return n * std::log(rss / n) + complexity * result.df_count;
    }
    case SelectionCriterion::Kind::GCV: {
      if (result.df_trace >= n) {
        throw std::runtime_error("criterion_score: GCV undefined, trace df >= n");
      }
      const double denom = 1.0 - result.df_trace / n;
      return rss / (n * denom * denom);
    }
    case SelectionCriterion::Kind::CV: {
      const std::vector<int> fold = cv_fold_assignment(n, crit.folds, crit.seed);
      double total = 0.0;
      for (int f = 0; f < crit.folds; ++f) {
        std::vector<int> train_rows, test_rows;
        for (int i = 0; i < n; ++i) {
          (fold[i] == f ? test_rows : train_rows).push_back(i);
        }
        const Dataset train = subset_rows(data, train_rows);
        const Dataset test = subset_rows(data, test_rows);
        FitConfig cfg;
        cfg.params = result.params;
        const FitResult ft = fit(train, cfg);
        total += (test.y - test.X * ft.beta).squaredNorm() / test.n();
      }
      return total / crit.folds;
    }
  }
  throw std::invalid_argument("criterion_score: unknown criterion");
}

struct TuneRow {
  PenaltyParams params{};
  double score = std::numeric_limits<double>::infinity();
  int df_count = 0;
  bool converged = false;
};

struct TuneResult {
  PenaltyParams best{};
  FitResult best_fit{};
  std::vector<TuneRow> table;  // one row per grid point, lambda-major order
};

/// Exhaustive grid evaluation. Non-converged points stay in the table with an
/// infinite score; ties prefer the larger lambda, then the larger s (more
/// regularization). Throws when no grid point produced a scoreable fit.
inline TuneResult tune(const Dataset& data, const TuningGrid& grid,
                       const SelectionCriterion& crit, const FitConfig& proto = FitConfig{}) {
  validate(grid);
  TuneResult out;
  out.table.reserve(grid.lambdas.size() * grid.s_values.size());
  bool have_best = false;
  double best_score = std::numeric_limits<double>::infinity();
  std::ostringstream failures;

  for (double lambda : grid.lambdas) {
    for (double s : grid.s_values) {
      TuneRow row;
      row.params = PenaltyParams{s, lambda};
      FitResult fr;
      bool usable = false;
      try {
        FitConfig cfg = proto;
        cfg.params = row.params;
        fr = fit(data, cfg);
        row.df_count = fr.df_count;
        row.converged = fr.converged;
        usable = fr.converged;
      } catch (const std::exception& e) {
        failures << "  lambda=" << lambda << " s=" << s << ": " << e.what() << "\n";
      }
      if (usable) row.score = criterion_score(data, fr, crit);
      out.table.push_back(row);
      if (usable) {
        const bool better =
            !have_best || row.score < best_score ||
            (row.score == best_score &&
             (row.params.lambda > out.best.lambda ||
              (row.params.lambda == out.best.lambda && row.params.s > out.best.s)));
        if (better) {
          out.best = row.params;
          out.best_fit = fr;
          best_score = row.score;
          have_best = true;
        }
      }
    }
  }
  if (!have_best) {
    throw std::runtime_error("tune: no grid point converged\n" + failures.str());
  }
  return out;
}

}  // namespace dlasso
