#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "gdpx/errors.hpp"
#include "gdpx/regression.hpp"
#include "gdpx/rng.hpp"

using namespace gdpx;
namespace reg = gdpx::regression;

namespace {

reg::Dataset two_point() {
  reg::Dataset d;
  d.X = Eigen::MatrixXd(2, 1);
  d.X << -1.0, 1.0;
  d.y = Eigen::VectorXd(2);
  d.y << -1.0, 1.0;
  d.names = {"x0"};
  d.dummy_mask = {0};
  return d;
}

/// n rows of p standard-normal columns with y = X·beta + sigma·noise.
reg::Dataset gaussian(std::int64_t n, std::int64_t p, const std::vector<double>& beta,
                      double sigma, std::uint64_t seed) {
  Rng rng(seed);
  reg::Dataset d;
  d.X = Eigen::MatrixXd(n, p);
  d.y = Eigen::VectorXd(n);
  for (std::int64_t i = 0; i < n; ++i) {
    double signal = 0.0;
    for (std::int64_t j = 0; j < p; ++j) {
      d.X(i, j) = rng.normal();
      signal += d.X(i, j) * beta[static_cast<std::size_t>(j)];
    }
    d.y(i) = signal + sigma * rng.normal();
  }
  for (std::int64_t j = 0; j < p; ++j) d.names.push_back("x" + std::to_string(j));
  d.dummy_mask.assign(static_cast<std::size_t>(p), 0);
  return d;
}

}  // namespace

TEST_CASE("shuffle split holds out the requested fraction") {
  const reg::Dataset d = gaussian(10, 2, {1.0, 0.0}, 0.1, 3);
  const reg::Split s = reg::split(d, 0.2, 41);
  CHECK(s.train.n() == 8);
  CHECK(s.test.n() == 2);
  CHECK(s.train_rows.size() == 8);
  CHECK(s.test_rows.size() == 2);

  // every source row appears exactly once across the two parts
  std::vector<std::size_t> all(s.train_rows);
  all.insert(all.end(), s.test_rows.begin(), s.test_rows.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);

  // the split rows carry the matching data
  for (std::size_t k = 0; k < s.test_rows.size(); ++k) {
    CHECK(s.test.y(static_cast<Eigen::Index>(k)) ==
          d.y(static_cast<Eigen::Index>(s.test_rows[k])));
  }
}

TEST_CASE("an even two-row split leaves one row per side") {
  const reg::Dataset d = gaussian(2, 1, {1.0}, 0.0, 5);
  const reg::Split s = reg::split(d, 0.5, 1);
  CHECK(s.train.n() == 1);
  CHECK(s.test.n() == 1);
}

TEST_CASE("splitting is seed-deterministic") {
  const reg::Dataset d = gaussian(30, 3, {1.0, 0.0, 0.0}, 0.1, 9);
  const reg::Split a = reg::split(d, 0.25, 7);
  const reg::Split b = reg::split(d, 0.25, 7);
  CHECK(a.train_rows == b.train_rows);
  CHECK(a.test_rows == b.test_rows);
  const reg::Split c = reg::split(d, 0.25, 8);
  CHECK(a.train_rows != c.train_rows);
}

TEST_CASE("split rejects fractions outside the open unit interval") {
  const reg::Dataset d = gaussian(10, 1, {1.0}, 0.1, 3);
  CHECK_THROWS_AS(reg::split(d, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(reg::split(d, 1.0, 1), ConfigError);
}

TEST_CASE("standardization maps the two-point column to minus one and one") {
  reg::Dataset d;
  d.X = Eigen::MatrixXd(2, 2);
  d.X << 1.0, 1.0,
         3.0, 1.0;  // second column is constant
  d.y = Eigen::VectorXd(2);
  d.y << 0.0, 1.0;
  d.names = {"load", "flat"};
  d.dummy_mask = {0, 0};

  const reg::Scaler s = reg::fit_scaler(d);
  const reg::Dataset z = reg::apply_scaler(s, d);
  CHECK(z.X(0, 0) == -1.0);
  CHECK(z.X(1, 0) == 1.0);
  CHECK(z.X(0, 1) == 1.0);  // constant column passes through untouched
  CHECK(z.X(1, 1) == 1.0);
  REQUIRE(s.zero_variance.size() == 1);
  CHECK(s.zero_variance[0] == "flat");
}

TEST_CASE("dummy columns pass through standardization") {
  reg::Dataset d;
  d.X = Eigen::MatrixXd(4, 2);
  d.X << 10.0, 1.0,
         20.0, 0.0,
         30.0, 1.0,
         40.0, 0.0;
  d.y = Eigen::VectorXd::Zero(4);
  d.names = {"load", "apt_bos"};
  d.dummy_mask = {0, 1};

  const reg::Dataset z = reg::apply_scaler(reg::fit_scaler(d), d);
  CHECK(z.X(0, 1) == 1.0);
  CHECK(z.X(1, 1) == 0.0);
  // the continuous column is centered and unit-scaled
  CHECK(std::abs(z.X.col(0).mean()) < 1e-12);
}

TEST_CASE("least squares recovers the unit line") {
  const reg::Dataset d = two_point();
  const reg::ModelFit fit = reg::fit_ols(d.X, d.y);
  CHECK(fit.coefs(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("least squares interpolates when rows equal parameters") {
  const reg::Dataset d = gaussian(4, 3, {2.0, -1.0, 0.5}, 1.0, 13);
  const reg::ModelFit fit = reg::fit_ols(d.X, d.y);
  const Eigen::VectorXd yhat = reg::predict(fit, d.X);
  CHECK(reg::r2_of(yhat, d.y) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a duplicated column makes least squares rank deficient") {
  reg::Dataset d = gaussian(20, 2, {1.0, 0.5}, 0.1, 17);
  Eigen::MatrixXd X(20, 3);
  X << d.X, d.X.col(0);
  CHECK_THROWS_AS(reg::fit_ols(X, d.y), RankDeficient);
}

TEST_CASE("ols p-values separate signal from noise") {
  const reg::Dataset d = gaussian(200, 3, {1.0, 0.0, 0.0}, 0.5, 23);
  const reg::ModelFit fit = reg::fit_ols(d.X, d.y);
  REQUIRE(fit.p_values.size() == 3);
  CHECK(fit.p_values(0) < 1e-6);
  CHECK(fit.p_values(1) > 0.001);
  CHECK(fit.std_errors(0) > 0.0);
}

TEST_CASE("ridge at the frozen penalty halves the two-point slope") {
  const reg::Dataset d = two_point();
  const reg::ModelFit fit = reg::fit_ridge(d.X, d.y, 2.0);
  CHECK(fit.coefs(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(fit.lambda == 2.0);
  CHECK(fit.kind == reg::ModelKind::Ridge);
}

TEST_CASE("ridge without a penalty is least squares") {
  const reg::Dataset d = gaussian(50, 4, {1.0, -2.0, 0.0, 0.5}, 0.3, 29);
  const reg::ModelFit ols = reg::fit_ols(d.X, d.y);
  const reg::ModelFit ridge = reg::fit_ridge(d.X, d.y, 0.0);
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(ridge.coefs(j) == doctest::Approx(ols.coefs(j)).epsilon(1e-9));
  }
  CHECK(ridge.intercept == doctest::Approx(ols.intercept).scale(1.0).epsilon(1e-9));
}

TEST_CASE("an overwhelming ridge penalty shrinks to the mean") {
  const reg::Dataset d = gaussian(50, 3, {1.0, 1.0, 1.0}, 0.3, 31);
  const reg::ModelFit fit = reg::fit_ridge(d.X, d.y, 1e9);
  CHECK(fit.coefs.cwiseAbs().maxCoeff() < 1e-5);
  CHECK(fit.intercept == doctest::Approx(d.y.mean()).epsilon(1e-6));
}

TEST_CASE("the ridge coefficient norm never grows with the penalty") {
  const reg::Dataset d = gaussian(60, 5, {2.0, -1.0, 0.5, 0.0, 1.0}, 0.5, 37);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const reg::ModelFit fit = reg::fit_ridge(d.X, d.y, lambda);
    const double norm = fit.coefs.norm();
    CHECK(norm <= prev + 1e-12);
    prev = norm;
  }
}

TEST_CASE("lasso soft-thresholds the frozen two-point problem") {
  reg::Dataset d = two_point();
  d.y << -2.0, 2.0;
  const reg::ModelFit fit = reg::fit_lasso(d.X, d.y, 0.5);
  CHECK(fit.coefs(0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("penalties at or past lambda_max zero the lasso out") {
  reg::Dataset d = two_point();
  d.y << -2.0, 2.0;
  CHECK(reg::lambda_max(d.X, d.y) == doctest::Approx(2.0).epsilon(1e-12));
  const reg::ModelFit at_max = reg::fit_lasso(d.X, d.y, 2.0);
  CHECK(at_max.coefs(0) == 0.0);
  const reg::ModelFit beyond = reg::fit_lasso(d.X, d.y, 5.0);
  CHECK(beyond.coefs(0) == 0.0);

  const reg::Dataset g = gaussian(40, 4, {1.0, -1.0, 0.5, 0.0}, 0.2, 41);
  const double lmax = reg::lambda_max(g.X, g.y);
  const reg::ModelFit zeroed = reg::fit_lasso(g.X, g.y, lmax * 1.000001);
  CHECK(zeroed.coefs.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("lasso without a penalty matches least squares") {
  const reg::Dataset d = gaussian(50, 4, {1.0, -2.0, 0.0, 0.5}, 0.3, 43);
  const reg::ModelFit ols = reg::fit_ols(d.X, d.y);
  const reg::ModelFit lasso = reg::fit_lasso(d.X, d.y, 0.0);
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(lasso.coefs(j) == doctest::Approx(ols.coefs(j)).epsilon(1e-6));
  }
}

TEST_CASE("the lasso solution satisfies the subgradient conditions") {
  const reg::Dataset d = gaussian(80, 6, {2.0, -1.5, 0.8, 0.0, 0.0, 0.0}, 0.4, 47);
  const double lambda = 0.15;
  const reg::ModelFit fit = reg::fit_lasso(d.X, d.y, lambda);
  const Eigen::VectorXd resid = d.y - reg::predict(fit, d.X);
  const double n = static_cast<double>(d.n());
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    const double g = d.X.col(j).dot(resid) / n;
    if (fit.coefs(j) != 0.0) {
      CHECK(g == doctest::Approx(lambda * (fit.coefs(j) > 0 ? 1.0 : -1.0)).epsilon(1e-6));
    } else {
      CHECK(std::abs(g) <= lambda + 1e-8);
    }
  }
}

TEST_CASE("metrics of the frozen two-point forecast") {
  Eigen::VectorXd y(2), yhat(2);
  y << 0.0, 2.0;
  yhat << 1.0, 1.0;
  const reg::Metrics m = reg::metrics(yhat, y);
  CHECK(m.rmse == 1.0);
  CHECK(m.mae == 1.0);
  CHECK(m.r2 == 0.0);
}

TEST_CASE("root mean square error dominates mean absolute error") {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = rng.uniform_int(2, 50);
    Eigen::VectorXd y(n), yhat(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y(i) = rng.uniform(-10.0, 10.0);
      yhat(i) = rng.uniform(-10.0, 10.0);
    }
    CHECK(reg::rmse_of(yhat, y) >= reg::mae_of(yhat, y) - 1e-12);
  }
}

TEST_CASE("a constant target has no explainable variance") {
  Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 3.0);
  Eigen::VectorXd yhat = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(reg::r2_of(yhat, y), ZeroVarianceTarget);
}

TEST_CASE("the default penalty grid is ascending and carries the reference value") {
  const std::vector<double> grid = reg::default_lambda_grid();
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(std::find(grid.begin(), grid.end(), 0.77) != grid.end());
  CHECK(grid.front() > 0.0);
}

TEST_CASE("cross-validation is deterministic and balanced") {
  const reg::Dataset d = gaussian(40, 3, {1.0, 0.5, 0.0}, 0.3, 59);
  const std::vector<double> grid{0.01, 0.1, 1.0};
  const reg::CvResult a = reg::cross_validate(d, reg::ModelKind::Ridge, grid, 5, 11);
  const reg::CvResult b = reg::cross_validate(d, reg::ModelKind::Ridge, grid, 5, 11);
  CHECK(a.mean_rmse == b.mean_rmse);
  CHECK(a.best_lambda == b.best_lambda);
  CHECK(a.fold_assignments == b.fold_assignments);
  CHECK(std::find(grid.begin(), grid.end(), a.best_lambda) != grid.end());

  std::vector<int> sizes(5, 0);
  for (int f : a.fold_assignments) ++sizes[static_cast<std::size_t>(f)];
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*hi - *lo <= 1);
}

TEST_CASE("tied validation scores resolve to the smallest penalty") {
  // a target independent of X: every penalty validates identically on a
  // ridge fit of all-zero coefficients, provided the penalty is large
  reg::Dataset d;
  d.X = Eigen::MatrixXd::Zero(12, 1);
  d.y = Eigen::VectorXd(12);
  for (Eigen::Index i = 0; i < 12; ++i) d.y(i) = static_cast<double>(i % 3);
  d.names = {"x0"};
  d.dummy_mask = {0};
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const reg::CvResult cv = reg::cross_validate(d, reg::ModelKind::Ridge, grid, 3, 5);
  for (double r : cv.mean_rmse) CHECK(r == cv.mean_rmse.front());
  CHECK(cv.best_lambda == 0.5);
}

TEST_CASE("cross-validation rejects bad setups") {
  const reg::Dataset d = gaussian(10, 2, {1.0, 0.0}, 0.1, 61);
  const std::vector<double> grid{0.1};
  CHECK_THROWS_AS(reg::cross_validate(d, reg::ModelKind::Ols, grid, 5, 1), ConfigError);
  CHECK_THROWS_AS(reg::cross_validate(d, reg::ModelKind::Ridge, grid, 1, 1), ConfigError);
  CHECK_THROWS_AS(
      reg::cross_validate(d, reg::ModelKind::Ridge, std::vector<double>{}, 5, 1), ConfigError);
  CHECK_THROWS_AS(reg::cross_validate(d, reg::ModelKind::Ridge, grid, 11, 1), ConfigError);
}

TEST_CASE("with more columns than signal the search keeps a positive penalty") {
  // 3 informative out of 12 columns, noisy target, grid anchored at zero
  std::vector<double> beta(12, 0.0);
  beta[0] = 1.0;
  beta[1] = -1.0;
  beta[2] = 0.5;
  const reg::Dataset d = gaussian(60, 12, beta, 1.5, 67);
  const std::vector<double> grid{0.0, 0.1, 1.0, 10.0, 100.0};
  const reg::CvResult cv = reg::cross_validate(d, reg::ModelKind::Ridge, grid, 5, 3);
  CHECK(cv.best_lambda > 0.0);
}

TEST_CASE("permuting the only informative column destroys the fit") {
  // y == x1 exactly, so the baseline R^2 is 1. Shuffling x1 leaves residuals
  // x1_perm - x1 with expected square 2*Var(x1), pushing R^2 to about -1 and
  // alpha to (1 - (-1)) / 1 == 2. The unused column stays near 0.
  const reg::Dataset d = gaussian(300, 2, {1.0, 0.0}, 0.0, 71);
  const reg::ModelFit fit = reg::fit_ols(d.X, d.y);
  const reg::ImportanceResult imp = reg::permutation_importance(fit, d.X, d.y, 20, 9);
  REQUIRE(imp.alpha.size() == 2);
  CHECK(imp.alpha[0] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(std::abs(imp.alpha[1]) < 0.05);
  CHECK(imp.ranking[0] == 0);
  CHECK(imp.ranking[1] == 1);
}

TEST_CASE("permutation importance is seed-deterministic") {
  const reg::Dataset d = gaussian(100, 3, {1.0, 0.5, 0.0}, 0.2, 73);
  const reg::ModelFit fit = reg::fit_ols(d.X, d.y);
  const reg::ImportanceResult a = reg::permutation_importance(fit, d.X, d.y, 5, 21);
  const reg::ImportanceResult b = reg::permutation_importance(fit, d.X, d.y, 5, 21);
  CHECK(a.alpha == b.alpha);
  CHECK(a.ranking == b.ranking);
}

TEST_CASE("a fit with no skill cannot be ranked") {
  const reg::Dataset d = gaussian(30, 2, {1.0, 0.0}, 0.1, 79);
  reg::ModelFit flat;
  flat.coefs = Eigen::VectorXd::Zero(2);
  flat.intercept = 0.0;
  CHECK_THROWS_AS(reg::permutation_importance(flat, d.X, d.y, 3, 1), DegenerateScore);
}
