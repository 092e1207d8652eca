#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dlasso {

/// Per-column location/scale applied to the predictors plus the response
/// mean removed from y. Identity (mean 0, scale 1, y_mean 0) for raw data.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  double y_mean = 0.0;

  static Standardization identity(int p) {
    Standardization st;
    st.mean = Eigen::VectorXd::Zero(p);
    st.scale = Eigen::VectorXd::Ones(p);
    st.y_mean = 0.0;
    return st;
  }
};

/// Design matrix, response, column labels and the standardization that was
/// applied to produce them.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> feature_names;
  Standardization standardization;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
};

inline Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                            std::vector<std::string> feature_names = {}) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw std::invalid_argument("Dataset: need at least one row and one column");
  }
  if (y.size() != X.rows()) {
    throw std::invalid_argument("Dataset: response length does not match row count");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("Dataset: non-finite entries");
  }
  if (feature_names.empty()) {
    feature_names.reserve(X.cols());
    for (int j = 0; j < X.cols(); ++j) feature_names.push_back("x" + std::to_string(j + 1));
  } else if (static_cast<int>(feature_names.size()) != X.cols()) {
    throw std::invalid_argument("Dataset: feature name count does not match column count");
  }
  Dataset d;
  d.standardization = Standardization::identity(static_cast<int>(X.cols()));
  d.X = std::move(X);
  d.y = std::move(y);
  d.feature_names = std::move(feature_names);
  return d;
}

/// Fit location/scale on this data: column means, sample standard deviations
/// (n-1 denominator) and the response mean. Zero-variance columns are an
/// error naming the column.
inline Standardization fit_standardization(const Dataset& raw) {
  const int n = raw.n();
  const int p = raw.p();
  Standardization st;
  st.mean = raw.X.colwise().mean();
  st.scale.resize(p);
  for (int j = 0; j < p; ++j) {
    const double ss = (raw.X.col(j).array() - st.mean(j)).square().sum();
    const double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    if (!(sd > 0.0)) {
      throw std::invalid_argument("standardize: column '" + raw.feature_names[j] +
                                  "' has zero variance");
    }
    st.scale(j) = sd;
  }
  st.y_mean = raw.y.mean();
  return st;
}

/// Apply an existing location/scale to raw data (used for test splits, which
/// must be transformed with training statistics).
inline Dataset apply_standardization(const Dataset& raw, const Standardization& st) {
  Dataset out = raw;
  for (int j = 0; j < raw.p(); ++j) {
    out.X.col(j) = (raw.X.col(j).array() - st.mean(j)) / st.scale(j);
  }
  out.y = raw.y.array() - st.y_mean;
  out.standardization = st;
  return out;
}

/// Standardize in one step: columns to mean 0 / unit sample sd, response
/// centered.
inline Dataset standardize(const Dataset& raw) {
  return apply_standardization(raw, fit_standardization(raw));
}

/// Invert the standardization on the design matrix.
inline Eigen::MatrixXd unstandardized_design(const Dataset& d) {
  Eigen::MatrixXd X = d.X;
  for (int j = 0; j < d.p(); ++j) {
    X.col(j) = X.col(j).array() * d.standardization.scale(j) + d.standardization.mean(j);
  }
  return X;
}

/// Map coefficients fitted on the standardized scale back to the original
/// units, returning (beta_original, intercept).
inline std::pair<Eigen::VectorXd, double> original_scale_coefficients(
    const Dataset& d, const Eigen::VectorXd& beta) {
  if (beta.size() != d.p()) {
    throw std::invalid_argument("original_scale_coefficients: dimension mismatch");
  }
  Eigen::VectorXd b = beta.array() / d.standardization.scale.array();
  const double intercept = d.standardization.y_mean - b.dot(d.standardization.mean);
  return {b, intercept};
}

/// Row subset keeping names and standardization metadata (used by CV folds).
inline Dataset subset_rows(const Dataset& d, const std::vector<int>& rows) {
  if (rows.empty()) throw std::invalid_argument("subset_rows: empty row selection");
  Dataset out;
  out.X.resize(static_cast<int>(rows.size()), d.p());
  out.y.resize(static_cast<int>(rows.size()));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    out.X.row(i) = d.X.row(rows[i]);
    out.y(i) = d.y(rows[i]);
  }
  out.feature_names = d.feature_names;
  out.standardization = d.standardization;
  return out;
}

}  // namespace dlasso
