#include "gdpx/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "gdpx/errors.hpp"
#include "gdpx/rng.hpp"

namespace gdpx::regression {

namespace {

Dataset take_rows(const Dataset& d, std::span<const std::size_t> rows) {
  Dataset out;
  out.names = d.names;
  out.dummy_mask = d.dummy_mask;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), d.p());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = d.X.row(static_cast<Eigen::Index>(rows[i]));
    out.y(static_cast<Eigen::Index>(i)) = d.y(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

double soft_threshold(double a, double lambda) {
  if (a > lambda) return a - lambda;
  if (a < -lambda) return a + lambda;
  return 0.0;
}

}  // namespace

const std::string& kind_token(ModelKind k) {
  static const std::string tokens[] = {"ols", "ridge", "lasso"};
  return tokens[static_cast<int>(k)];
}

Eigen::VectorXd predict(const ModelFit& fit, const Eigen::MatrixXd& X) {
  return (X * fit.coefs).array() + fit.intercept;
}

Split split(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie strictly between 0 and 1");
  }
  const auto n = static_cast<std::size_t>(d.n());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);

  const auto n_test = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * test_fraction + 1e-9));
  const std::size_t n_train = n - n_test;

  Split s;
  s.train_rows.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test_rows.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  s.train = take_rows(d, s.train_rows);
  s.test = take_rows(d, s.test_rows);
  return s;
}

Scaler fit_scaler(const Dataset& train) {
  if (train.n() == 0) throw ConfigError("cannot fit a scaler on an empty training set");
  const Eigen::Index p = train.p();
  Scaler s;
  s.means = Eigen::VectorXd::Zero(p);
  s.stds = Eigen::VectorXd::Ones(p);
  s.passthrough.assign(static_cast<std::size_t>(p), 0);

  for (Eigen::Index j = 0; j < p; ++j) {
    if (!train.dummy_mask.empty() && train.dummy_mask[static_cast<std::size_t>(j)]) {
      s.passthrough[static_cast<std::size_t>(j)] = 1;
      continue;
    }
    const double mean = train.X.col(j).mean();
    const double var = (train.X.col(j).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    if (sd == 0.0) {
      s.passthrough[static_cast<std::size_t>(j)] = 1;
      s.zero_variance.push_back(train.names.empty() ? std::to_string(j)
                                                    : train.names[static_cast<std::size_t>(j)]);
      continue;
    }
    s.means(j) = mean;
    s.stds(j) = sd;
  }
  return s;
}

Dataset apply_scaler(const Scaler& s, const Dataset& d) {
  if (s.means.size() != d.p()) {
    throw ConfigError("scaler and dataset column counts differ");
  }
  Dataset out = d;
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    if (s.passthrough[static_cast<std::size_t>(j)]) continue;
    out.X.col(j) = (d.X.col(j).array() - s.means(j)) / s.stds(j);
  }
  return out;
}

ModelFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd A(n, p + 1);
  A.col(0).setOnes();
  A.rightCols(p) = X;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < p + 1) throw RankDeficient();
  const Eigen::VectorXd beta = qr.solve(y);

  ModelFit fit;
  fit.kind = ModelKind::Ols;
  fit.lambda = 0.0;
  fit.intercept = beta(0);
  fit.coefs = beta.tail(p);

  const Eigen::Index df = n - (p + 1);
  if (df > 0) {
    const Eigen::VectorXd resid = y - A * beta;
    const double sigma2 = resid.squaredNorm() / static_cast<double>(df);
    const Eigen::MatrixXd gram_inv =
        (A.transpose() * A).ldlt().solve(Eigen::MatrixXd::Identity(p + 1, p + 1));
    const boost::math::students_t_distribution<double> t_dist(static_cast<double>(df));

    fit.std_errors.resize(p);
    fit.p_values.resize(p);
    for (Eigen::Index j = 0; j <= p; ++j) {
      const double se = std::sqrt(sigma2 * gram_inv(j, j));
      const double t = se > 0.0 ? beta(j) / se : 0.0;
      const double pv = se > 0.0 ? 2.0 * boost::math::cdf(boost::math::complement(
                                             t_dist, std::abs(t)))
                                 : 1.0;
      if (j == 0) {
        fit.intercept_std_error = se;
        fit.intercept_p_value = pv;
      } else {
        fit.std_errors(j - 1) = se;
        fit.p_values(j - 1) = pv;
      }
    }
  }
  return fit;
}

ModelFit fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
  if (lambda < 0.0) throw ConfigError("ridge penalty must be non-negative");
  const Eigen::Index p = X.cols();
  const Eigen::RowVectorXd xm = X.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - xm;
  const double ym = y.mean();
  const Eigen::VectorXd yc = y.array() - ym;

  const Eigen::MatrixXd gram =
      Xc.transpose() * Xc + lambda * Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd beta = gram.ldlt().solve(Xc.transpose() * yc);

  ModelFit fit;
  fit.kind = ModelKind::Ridge;
  fit.lambda = lambda;
  fit.coefs = beta;
  fit.intercept = ym - xm.dot(beta);
  return fit;
}

ModelFit fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   double tol, int max_iter) {
  if (lambda < 0.0) throw ConfigError("lasso penalty must be non-negative");
  if (!(tol > 0.0)) throw ConfigError("lasso tolerance must be positive");
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const auto dn = static_cast<double>(n);

  const Eigen::RowVectorXd xm = X.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - xm;
  const double ym = y.mean();
  const Eigen::VectorXd yc = y.array() - ym;

  Eigen::VectorXd col_scale(p);  // (1/n)·‖column‖²
  for (Eigen::Index j = 0; j < p; ++j) col_scale(j) = Xc.col(j).squaredNorm() / dn;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = yc;
  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_scale(j) == 0.0) continue;
      const double old = beta(j);
      const double rho = Xc.col(j).dot(resid) / dn + col_scale(j) * old;
      const double updated = soft_threshold(rho, lambda) / col_scale(j);
      if (updated != old) {
        resid -= Xc.col(j) * (updated - old);
        beta(j) = updated;
        max_delta = std::max(max_delta, std::abs(updated - old));
      }
    }
    if (max_delta < tol) {
      converged = true;
      break;
    }
  }

  const double intercept = ym - xm.dot(beta);
  if (!converged) {
    throw NotConverged(max_iter, std::vector<double>(beta.data(), beta.data() + p), intercept);
  }

  ModelFit fit;
  fit.kind = ModelKind::Lasso;
  fit.lambda = lambda;
  fit.coefs = beta;
  fit.intercept = intercept;
  return fit;
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::RowVectorXd xm = X.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - xm;
  const Eigen::VectorXd yc = y.array() - y.mean();
  return (Xc.transpose() * yc).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int k = -12; k <= 12; ++k) grid.push_back(std::pow(10.0, k / 4.0));
  grid.push_back(0.77);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

CvResult cross_validate(const Dataset& train, ModelKind kind, std::span<const double> grid,
                        int k, std::uint64_t seed) {
  if (kind == ModelKind::Ols) throw ConfigError("cross-validation tunes ridge or lasso only");
  if (k < 2) throw ConfigError("cross-validation needs at least two folds");
  if (grid.empty()) throw ConfigError("empty penalty grid");
  const auto n = static_cast<std::size_t>(train.n());
  if (n < static_cast<std::size_t>(k)) throw ConfigError("fewer rows than folds");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);

  CvResult cv;
  cv.grid.assign(grid.begin(), grid.end());
  cv.fold_assignments.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cv.fold_assignments[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }

  // Per-fold row lists, original row order preserved inside each part.
  std::vector<std::vector<std::size_t>> fold_rows(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    fold_rows[static_cast<std::size_t>(cv.fold_assignments[i])].push_back(i);
  }

  struct FoldData {
    Dataset fit_part;
    Dataset val_part;
  };
  std::vector<FoldData> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> fit_rows;
    fit_rows.reserve(n - fold_rows[static_cast<std::size_t>(f)].size());
    for (std::size_t i = 0; i < n; ++i) {
      if (cv.fold_assignments[i] != f) fit_rows.push_back(i);
    }
    FoldData fd;
    fd.fit_part = take_rows(train, fit_rows);
    fd.val_part = take_rows(train, fold_rows[static_cast<std::size_t>(f)]);
    folds.push_back(std::move(fd));
  }

  cv.mean_rmse.resize(cv.grid.size());
  for (std::size_t li = 0; li < cv.grid.size(); ++li) {
    const double lambda = cv.grid[li];
    double acc = 0.0;
    for (const FoldData& fd : folds) {
      const Scaler scaler = fit_scaler(fd.fit_part);
      const Dataset fit_scaled = apply_scaler(scaler, fd.fit_part);
      const Dataset val_scaled = apply_scaler(scaler, fd.val_part);
      const ModelFit fit = kind == ModelKind::Ridge
                               ? fit_ridge(fit_scaled.X, fit_scaled.y, lambda)
                               : fit_lasso(fit_scaled.X, fit_scaled.y, lambda);
      acc += rmse_of(predict(fit, val_scaled.X), val_scaled.y);
    }
    cv.mean_rmse[li] = acc / static_cast<double>(k);
  }

  std::size_t best = 0;
  for (std::size_t li = 1; li < cv.grid.size(); ++li) {
    const bool better = cv.mean_rmse[li] < cv.mean_rmse[best] ||
                        (cv.mean_rmse[li] == cv.mean_rmse[best] && cv.grid[li] < cv.grid[best]);
    if (better) best = li;
  }
  cv.best_lambda = cv.grid[best];
  return cv;
}

double rmse_of(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
  if (yhat.size() != y.size() || y.size() == 0) throw ConfigError("metric length mismatch");
  return std::sqrt((yhat - y).squaredNorm() / static_cast<double>(y.size()));
}

double mae_of(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
  if (yhat.size() != y.size() || y.size() == 0) throw ConfigError("metric length mismatch");
  return (yhat - y).cwiseAbs().mean();
}

double r2_of(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
  if (yhat.size() != y.size() || y.size() == 0) throw ConfigError("metric length mismatch");
  const double sst = (y.array() - y.mean()).square().sum();
  if (sst == 0.0) throw ZeroVarianceTarget();
  const double sse = (y - yhat).squaredNorm();
  return 1.0 - sse / sst;
}

Metrics metrics(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y) {
  return Metrics{rmse_of(yhat, y), mae_of(yhat, y), r2_of(yhat, y)};
}

ImportanceResult permutation_importance(const ModelFit& fit, const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& y, int repeats,
                                        std::uint64_t seed) {
  if (repeats < 1) throw ConfigError("permutation importance needs at least one repeat");
  const double baseline = r2_of(predict(fit, X), y);
  if (baseline <= 0.0) throw DegenerateScore(baseline);

  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  ImportanceResult out;
  out.alpha.assign(static_cast<std::size_t>(p), 0.0);

  Eigen::MatrixXd work = X;
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < p; ++j) {
    double acc = 0.0;
    for (int r = 0; r < repeats; ++r) {
      for (Eigen::Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = X(i, j);
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(r)));
      rng.shuffle(column);
      for (Eigen::Index i = 0; i < n; ++i) work(i, j) = column[static_cast<std::size_t>(i)];
      const double permuted = r2_of(predict(fit, work), y);
      acc += (baseline - permuted) / baseline;
    }
    out.alpha[static_cast<std::size_t>(j)] = acc / static_cast<double>(repeats);
    work.col(j) = X.col(j);
  }

  out.ranking.resize(static_cast<std::size_t>(p));
  std::iota(out.ranking.begin(), out.ranking.end(), std::size_t{0});
  std::sort(out.ranking.begin(), out.ranking.end(), [&](std::size_t a, std::size_t b) {
    if (out.alpha[a] != out.alpha[b]) return out.alpha[a] > out.alpha[b];
    return a < b;
  });
  return out;
}

}  // namespace gdpx::regression
