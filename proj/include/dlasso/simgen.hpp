#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dlasso/dataset.hpp"
#include "dlasso/rng.hpp"

namespace dlasso {

enum class Scenario { Standard = 1, SmallBetas = 2, CorrelatedGroups = 3 };

struct ScenarioSpec {
  Scenario id = Scenario::Standard;
  int n_total = 240;
  int n_train = 40;
  std::uint64_t seed = 0;
  int replicates = 50;
};

inline void validate(const ScenarioSpec& s) {
  if (s.n_train < 1 || s.n_train >= s.n_total) {
    throw std::invalid_argument("ScenarioSpec: need 1 <= n_train < n_total");
  }
  if (s.replicates < 1) throw std::invalid_argument("ScenarioSpec: replicates must be >= 1");
}

/// True coefficients, predictor correlation and noise level of a scenario.
struct ScenarioTruth {
  Eigen::VectorXd beta;
  Eigen::MatrixXd correlation;
  double sigma = 1.0;  // noise standard deviation
};

/// The three study designs:
///  1 Standard          beta = (3, 1.5, 0, 0, 2, 0, 0, 0), AR(0.5), sigma^2 = 3
///  2 SmallBetas        beta_j = 0.5 for all eight, same correlation and noise
///  3 CorrelatedGroups  p = 15 in three blocks of five with coefficients
///                      (1..5 | 0.5 x5 | 0 x5), within-block correlations
///                      0.9 / 0.5 / 0 and no cross-block dependence, sigma^2 = 15
inline ScenarioTruth scenario_truth(Scenario id) {
  ScenarioTruth t;
  switch (id) {
    case Scenario::Standard:
    case Scenario::SmallBetas: {
      const int p = 8;
      t.beta.resize(p);
      if (id == Scenario::Standard) {
        t.beta << 3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0;
      } else {
        t.beta.setConstant(0.5);
      }
      t.correlation.resize(p, p);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) t.correlation(i, j) = std::pow(0.5, std::abs(i - j));
      }
      t.sigma = std::sqrt(3.0);
      break;
    }
    case Scenario::CorrelatedGroups: {
      const int p = 15;
      t.beta.resize(p);
      t.beta << 1, 2, 3, 4, 5, 0.5, 0.5, 0.5, 0.5, 0.5, 0, 0, 0, 0, 0;
      t.correlation = Eigen::MatrixXd::Identity(p, p);
      const auto fill_block = [&](int start, double rho) {
        for (int i = start; i < start + 5; ++i) {
          for (int j = start; j < start + 5; ++j) {
            if (i != j) t.correlation(i, j) = rho;
          }
        }
      };
      fill_block(0, 0.9);
      fill_block(5, 0.5);
      t.sigma = std::sqrt(15.0);
      break;
    }
  }
  return t;
}

/// Draw one train/test pair: rows i.i.d. N(0, correlation) via the Cholesky
/// factor, response y = X beta + sigma e. The first n_train rows form the
/// training split; both splits are standardized with training statistics
/// only. Bit-identical for identical (spec, truth).
inline std::pair<Dataset, Dataset> generate(const ScenarioSpec& spec, const ScenarioTruth& truth) {
  validate(spec);
  const int p = static_cast<int>(truth.beta.size());
  const Eigen::LLT<Eigen::MatrixXd> llt(truth.correlation);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("generate: correlation matrix is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();

  Rng rng(spec.seed);
  Eigen::MatrixXd X(spec.n_total, p);
  Eigen::VectorXd y(spec.n_total);
  Eigen::VectorXd z(p);
  for (int i = 0; i < spec.n_total; ++i) {
    for (int j = 0; j < p; ++j) z(j) = rng.normal();
    X.row(i) = (L * z).transpose();
    y(i) = X.row(i).dot(truth.beta) + truth.sigma * rng.normal();
  }

  std::vector<int> train_rows(spec.n_train), test_rows(spec.n_total - spec.n_train);
  for (int i = 0; i < spec.n_train; ++i) train_rows[i] = i;
  for (int i = spec.n_train; i < spec.n_total; ++i) test_rows[i - spec.n_train] = i;

  const Dataset all = make_dataset(std::move(X), std::move(y));
  const Dataset train_raw = subset_rows(all, train_rows);
  const Dataset test_raw = subset_rows(all, test_rows);
  const Standardization st = fit_standardization(train_raw);
  return {apply_standardization(train_raw, st), apply_standardization(test_raw, st)};
}

/// Test-set prediction MSE and the parameter error (b - beta)' S (b - beta)
/// with S the scenario's true correlation matrix. beta_hat is taken on the
/// dataset's (standardized) scale and mapped back to original units for the
/// parameter metric; the prediction residuals are identical on either scale.
inline std::pair<double, double> metrics(const ScenarioTruth& truth, const Dataset& test,
                                         const Eigen::VectorXd& beta_hat) {
  if (beta_hat.size() != test.p() || truth.beta.size() != test.p()) {
    throw std::invalid_argument("metrics: dimension mismatch");
  }
  const double pred_mse = (test.y - test.X * beta_hat).squaredNorm() / test.n();
  const Eigen::VectorXd diff =
      (beta_hat.array() / test.standardization.scale.array()).matrix() - truth.beta;
  const double param_mse = diff.dot(truth.correlation * diff);
  return {pred_mse, param_mse};
}

}  // namespace dlasso
