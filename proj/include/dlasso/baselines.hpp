#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "dlasso/dataset.hpp"

namespace dlasso {

/// Ordinary least squares via the normal equations.
inline Eigen::VectorXd fit_ols(const Dataset& data) {
  const Eigen::MatrixXd XtX = data.X.transpose() * data.X;
  const Eigen::LLT<Eigen::MatrixXd> llt(XtX);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("fit_ols: X'X is singular");
  }
  return llt.solve(data.X.transpose() * data.y);
}

/// Ridge estimate (X'X + lambda I)^-1 X'y, minimizing RSS + lambda ||b||_2^2.
inline Eigen::VectorXd fit_ridge(const Dataset& data, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("fit_ridge: lambda must be nonnegative");
  Eigen::MatrixXd A = data.X.transpose() * data.X;
  A.diagonal().array() += lambda;
  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("fit_ridge: system is singular");
  }
  return llt.solve(data.X.transpose() * data.y);
}

struct LassoFit {
  Eigen::VectorXd beta;
  bool converged = false;
  int sweeps = 0;
};

/// Coordinate-descent lasso minimizing RSS + lambda ||b||_1. The gradient of
/// RSS carries a factor 2, so each coordinate is soft-thresholded at lambda/2.
inline LassoFit fit_lasso_cd(const Dataset& data, double lambda, double tol = 1e-10,
                             int max_sweeps = 10000) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("fit_lasso_cd: lambda must be nonnegative");
  const int p = data.p();
  const Eigen::MatrixXd XtX = data.X.transpose() * data.X;
  const Eigen::VectorXd Xty = data.X.transpose() * data.y;
  for (int j = 0; j < p; ++j) {
    if (!(XtX(j, j) > 0.0)) {
      throw std::runtime_error("fit_lasso_cd: zero-norm column " + std::to_string(j));
    }
  }

  LassoFit fit;
  fit.beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd xtxb = Eigen::VectorXd::Zero(p);  // XtX * beta, updated incrementally
  const double thr = lambda / 2.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int j = 0; j < p; ++j) {
      const double r = Xty(j) - xtxb(j) + XtX(j, j) * fit.beta(j);
      const double mag = std::fabs(r) - thr;
      const double next = mag > 0.0 ? std::copysign(mag, r) / XtX(j, j) : 0.0;
      const double d = next - fit.beta(j);
      if (d != 0.0) {
        xtxb += d * XtX.col(j);
        fit.beta(j) = next;
      }
      max_change = std::max(max_change, std::fabs(d));
    }
    fit.sweeps = sweep;
    if (max_change < tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace dlasso
