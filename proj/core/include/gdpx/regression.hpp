#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gdpx::regression {

/// Design matrix with named columns. `dummy_mask[j]` marks 0/1 indicator
/// columns that standardization must pass through untouched.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;
  std::vector<std::uint8_t> dummy_mask;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

/// Seeded shuffle split. Row order inside each part follows the shuffled
/// order; `train_rows`/`test_rows` map back to the source rows.
struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// Column-wise standardization parameters learned from a training set.
/// Dummy and zero-variance columns pass through (mean 0, std 1); the names
/// of zero-variance columns are kept for reporting.
struct Scaler {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
  std::vector<std::uint8_t> passthrough;
  std::vector<std::string> zero_variance;
};

enum class ModelKind { Ols, Ridge, Lasso };

const std::string& kind_token(ModelKind k);  // "ols", "ridge", "lasso"

/// A fitted affine model: ŷ = intercept + X·coefs. `std_errors`/`p_values`
/// are filled for plain least squares only (classical two-sided t tests),
/// indexed like coefs, with the intercept entries carried separately.
struct ModelFit {
  ModelKind kind{ModelKind::Ols};
  double intercept{0.0};
  Eigen::VectorXd coefs;
  double lambda{0.0};
  Eigen::VectorXd std_errors;
  Eigen::VectorXd p_values;
  double intercept_std_error{0.0};
  double intercept_p_value{1.0};
};

Eigen::VectorXd predict(const ModelFit& fit, const Eigen::MatrixXd& X);

struct Metrics {
  double rmse{0.0};
  double mae{0.0};
  double r2{0.0};
};

/// Hyperparameter search record: mean validation RMSE per grid value and the
/// winning penalty (ties broken toward the smallest penalty).
struct CvResult {
  std::vector<double> grid;
  std::vector<double> mean_rmse;
  double best_lambda{0.0};
  std::vector<int> fold_assignments;
};

/// Per-feature relative score drop under column permutation, and the feature
/// indices ordered most-important first (ties by index).
struct ImportanceResult {
  std::vector<double> alpha;
  std::vector<std::size_t> ranking;
};

/// Seeded uniform shuffle; the first ⌈n·(1−test_fraction)⌉ shuffled rows
/// form the training set. Requires 0 < test_fraction < 1.
Split split(const Dataset& d, double test_fraction, std::uint64_t seed);

/// Learns mean/std (population) per non-dummy column; constant columns pass
/// through and are flagged by name.
Scaler fit_scaler(const Dataset& train);
Dataset apply_scaler(const Scaler& s, const Dataset& d);

/// Least squares via rank-revealing QR on the intercept-augmented design.
/// Throws RankDeficient when the augmented design loses full column rank.
ModelFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Minimizes Σ(y−ŷ)² + lambda·‖coefs‖² with an unpenalized intercept:
/// closed-form solve on centered data.
ModelFit fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);

/// Minimizes (1/(2n))Σ(y−ŷ)² + lambda·‖coefs‖₁ by cyclic coordinate descent
/// with soft-thresholding; unpenalized intercept via centering. Converged
/// when no coefficient moves more than `tol` in a full sweep; throws
/// NotConverged (carrying the partial fit) when max_iter sweeps pass first.
ModelFit fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                   double tol = 1e-9, int max_iter = 100000);

/// Smallest penalty at which the lasso solution is all zeros:
/// max_j |X_jᵀ(y−ȳ)|/n on centered columns.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Log-spaced penalty grid (10^-3 … 10^3) plus 0.77, ascending.
std::vector<double> default_lambda_grid();

/// K-fold search over `grid` for ridge or lasso: seeded balanced fold
/// assignment, scaler re-fit on each fold's training part, mean validation
/// RMSE per penalty.
CvResult cross_validate(const Dataset& train, ModelKind kind, std::span<const double> grid,
                        int k, std::uint64_t seed);

double rmse_of(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y);
double mae_of(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y);

/// 1 − SSE/SST; throws ZeroVarianceTarget when SST is zero.
double r2_of(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y);

Metrics metrics(const Eigen::VectorXd& yhat, const Eigen::VectorXd& y);

/// Relative R² drop per feature under seeded column shuffles, averaged over
/// `repeats` draws with one derived stream per (feature, repeat). Throws
/// DegenerateScore when the unpermuted R² is not positive.
ImportanceResult permutation_importance(const ModelFit& fit, const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& y, int repeats,
                                        std::uint64_t seed);

}  // namespace gdpx::regression
