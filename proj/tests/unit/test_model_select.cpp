#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "dlasso/csv.hpp"
#include "dlasso/model_select.hpp"
#include "dlasso/rng.hpp"

using namespace dlasso;

namespace {

Dataset random_instance(std::uint64_t seed, int n = 40, int p = 8) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  Eigen::VectorXd beta(p);
  beta.setZero();
  beta(0) = 2.0;
  beta(1) = -1.5;
  beta(4) = 1.0;
  for (int i = 0; i < n; ++i) y(i) = X.row(i).dot(beta) + rng.normal();
  return standardize(make_dataset(X, y));
}

Dataset pure_noise_instance(std::uint64_t seed, int n = 2000, int p = 8) {
  Rng rng(seed);
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    y(i) = rng.normal();
  }
  return standardize(make_dataset(X, y));
}

std::string test_data(const std::string& name) {
  return std::string(DLASSO_TEST_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("default grid shape") {
  const TuningGrid g = TuningGrid::defaults(40);
  CHECK(g.lambdas.size() == 25);
  CHECK(g.lambdas.front() == Catch::Approx(1e-3));
  CHECK(g.lambdas.back() == Catch::Approx(1e2));
  CHECK(std::is_sorted(g.lambdas.begin(), g.lambdas.end()));
  CHECK(std::is_sorted(g.s_values.begin(), g.s_values.end()));
  CHECK(std::count(g.s_values.begin(), g.s_values.end(), 1.0 / std::sqrt(40.0)) == 1);
}

TEST_CASE("degrees_of_freedom") {
  const Dataset d = random_instance(1);
  SECTION("full-rank unpenalized fit has p of both kinds") {
    FitConfig cfg;
    cfg.params = PenaltyParams{0.5, 0.0};
    const FitResult r = fit(d, cfg);
    const auto [count, trace] = degrees_of_freedom(d, r, cfg.params);
    CHECK(count == d.p());
    CHECK(std::fabs(trace - d.p()) < 1e-8);
    CHECK(count == r.df_count);
    CHECK(std::fabs(trace - r.df_trace) < 1e-10);
  }
  SECTION("trace df stays in [0, p] and decreases in lambda") {
    double prev = d.p() + 1.0;
    for (double lam : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      FitConfig cfg;
      cfg.params = PenaltyParams{0.1, lam};
      const FitResult r = fit(d, cfg);
      REQUIRE(r.converged);
      CHECK(r.df_trace >= 0.0);
      CHECK(r.df_trace <= d.p() + 1e-9);
      CHECK(r.df_trace < prev);
      prev = r.df_trace;
    }
  }
}

TEST_CASE("criterion formulas") {
  const Dataset d = random_instance(2);
  FitConfig cfg;
  cfg.params = PenaltyParams{0.1, 1.0};
  const FitResult r = fit(d, cfg);
  const double n = d.n();
  const double rss = (d.y - d.X * r.beta).squaredNorm();

  CHECK(criterion_score(d, r, SelectionCriterion::aic()) ==
        Catch::Approx(n * std::log(rss / n) + 2.0 * r.df_count));
  CHECK(criterion_score(d, r, SelectionCriterion::bic()) ==
        Catch::Approx(n * std::log(rss / n) + std::log(n) * r.df_count));
  const double denom = 1.0 - r.df_trace / n;
  CHECK(criterion_score(d, r, SelectionCriterion::gcv()) ==
        Catch::Approx(rss / (n * denom * denom)));

  SECTION("equal-RSS BIC difference is the df gap times log n") {
    FitResult a = r, b = r;
    a.df_count = 5;
    b.df_count = 8;
    const double diff = criterion_score(d, b, SelectionCriterion::bic()) -
                        criterion_score(d, a, SelectionCriterion::bic());
    CHECK(diff == Catch::Approx(3.0 * std::log(n)));
  }

  SECTION("saturated fit hits the sentinel") {
    const Dataset tiny = make_dataset(Eigen::MatrixXd::Identity(3, 3),
                                      (Eigen::VectorXd(3) << 1.0, 2.0, 3.0).finished());
    FitResult exact;
    exact.beta = tiny.y;
    exact.df_count = 3;
    exact.params = PenaltyParams{1.0, 0.0};
    CHECK(criterion_score(tiny, exact, SelectionCriterion::aic()) ==
          -std::numeric_limits<double>::max());
  }
}

TEST_CASE("cv fold assignment") {
  const auto fold = cv_fold_assignment(40, 10, 7);
  REQUIRE(fold.size() == 40);
  std::vector<int> sizes(10, 0);
  for (int f : fold) {
    REQUIRE(f >= 0);
    REQUIRE(f < 10);
    sizes[f]++;
  }
  for (int sz : sizes) CHECK(sz == 4);
  CHECK(fold == cv_fold_assignment(40, 10, 7));   // deterministic
  CHECK(fold != cv_fold_assignment(40, 10, 8));   // seed-sensitive
  // uneven n spreads the remainder
  const auto fold2 = cv_fold_assignment(43, 10, 1);
  std::vector<int> sizes2(10, 0);
  for (int f : fold2) sizes2[f]++;
  CHECK(*std::max_element(sizes2.begin(), sizes2.end()) == 5);
  CHECK(*std::min_element(sizes2.begin(), sizes2.end()) == 4);
  CHECK_THROWS_AS(cv_fold_assignment(5, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(cv_fold_assignment(5, 6, 0), std::invalid_argument);
}

TEST_CASE("cv score equals a hand-rolled fold loop") {
  const Dataset d = random_instance(3);
  FitConfig cfg;
  cfg.params = PenaltyParams{0.1, 1.0};
  const FitResult r = fit(d, cfg);
  const auto crit = SelectionCriterion::cv(5, 42);
  const double score = criterion_score(d, r, crit);

  // independent recomputation
  const auto fold = cv_fold_assignment(d.n(), 5, 42);
  double total = 0.0;
  for (int f = 0; f < 5; ++f) {
    std::vector<int> tr, te;
    for (int i = 0; i < d.n(); ++i) (fold[i] == f ? te : tr).push_back(i);
    FitConfig c;
    c.params = r.params;
    const FitResult rf = fit(subset_rows(d, tr), c);
    const Dataset dte = subset_rows(d, te);
    total += (dte.y - dte.X * rf.beta).squaredNorm() / dte.n();
  }
  CHECK(score == Catch::Approx(total / 5.0).epsilon(1e-12));

  // deterministic in the seed
  CHECK(score == criterion_score(d, r, SelectionCriterion::cv(5, 42)));
}

TEST_CASE("tune basics") {
  const Dataset d = random_instance(4);

  SECTION("degenerate single-point grid returns that point") {
    TuningGrid g;
    g.lambdas = {0.7};
    g.s_values = {0.2};
    const TuneResult tr = tune(d, g, SelectionCriterion::bic());
    CHECK(tr.best.lambda == 0.7);
    CHECK(tr.best.s == 0.2);
    CHECK(tr.table.size() == 1);
  }

  SECTION("table covers the full cross product in grid order") {
    TuningGrid g;
    g.lambdas = {0.1, 1.0, 10.0};
    g.s_values = {0.01, 1.0};
    const TuneResult tr = tune(d, g, SelectionCriterion::bic());
    REQUIRE(tr.table.size() == 6);
    CHECK(tr.table[0].params.lambda == 0.1);
    CHECK(tr.table[0].params.s == 0.01);
    CHECK(tr.table[1].params.s == 1.0);
    CHECK(tr.table[5].params.lambda == 10.0);
    for (const auto& row : tr.table) CHECK(row.converged);
  }

  SECTION("empty grid is rejected") {
    TuningGrid g;
    CHECK_THROWS_AS(tune(d, g, SelectionCriterion::bic()), std::invalid_argument);
  }
}

TEST_CASE("BIC drives pure noise to the top of the lambda grid") {
  // With n large the grid maximum cannot null every sample correlation, so
  // maximal regularization keeps winning on the complexity term.
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Dataset d = pure_noise_instance(seed);
    const TuneResult tr = tune(d, TuningGrid::defaults(d.n()), SelectionCriterion::bic());
    if (tr.best.lambda == TuningGrid::defaults(d.n()).lambdas.back()) ++hits;
  }
  CHECK(hits >= 45);  // >= 90% of replicates
}

TEST_CASE("prostate: BIC at s = 0.001 recovers the five-variable model") {
  const Dataset d = load_dataset(test_data("prostate.csv"), "lpsa");
  TuningGrid g = TuningGrid::defaults(d.n());
  g.s_values = {0.001};
  const TuneResult tr = tune(d, g, SelectionCriterion::bic());
  CHECK(tr.best_fit.df_count == 5);
  std::set<std::string> active;
  for (int j : tr.best_fit.active_set) active.insert(d.feature_names[j]);
  CHECK(active == std::set<std::string>{"lcavol", "lweight", "lbph", "pgg45", "svi"});
}
