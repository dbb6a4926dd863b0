#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace clickcascade::lasso {

/// Design matrix and outcomes, with the column centering/scaling used for
/// fitting. Zero-variance columns are excluded from the fit and reported;
/// their weights are always zero.
class RegressionProblem {
 public:
  /// Throws InvalidInput when fewer than two rows or sizes disagree.
  RegressionProblem(Eigen::MatrixXd x, Eigen::VectorXd y, bool standardize = true);

  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  bool standardized() const noexcept { return standardized_; }
  const Eigen::VectorXd& column_means() const noexcept { return means_; }
  const Eigen::VectorXd& column_scales() const noexcept { return scales_; }
  const std::vector<std::size_t>& excluded_columns() const noexcept { return excluded_; }
  const std::vector<std::size_t>& active_columns() const noexcept { return active_; }

  /// Centered (and, if requested, unit-variance) active columns, K x |active|.
  const Eigen::MatrixXd& design() const noexcept { return design_; }
  const Eigen::VectorXd& centered_y() const noexcept { return centered_y_; }
  double y_mean() const noexcept { return y_mean_; }

  std::size_t n_rows() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::size_t n_features() const noexcept { return static_cast<std::size_t>(x_.cols()); }

  /// Problem restricted to the given rows (re-centered and re-scaled).
  RegressionProblem subset(std::span<const std::size_t> rows) const;

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  bool standardized_;
  Eigen::VectorXd means_;
  Eigen::VectorXd scales_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> excluded_;
  Eigen::MatrixXd design_;
  Eigen::VectorXd centered_y_;
  double y_mean_ = 0.0;
};

struct FitOptions {
  double tolerance = 1e-7;
  std::size_t max_iterations = 10'000;
  /// Record the penalized objective after every sweep.
  bool record_objective = false;
};

struct LassoFit {
  double w0 = 0.0;
  Eigen::VectorXd weights;  // original (unstandardized) scale, one per column
  double lambda = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
  /// Coefficients on the fitting scale for the active columns; usable as a
  /// warm start.
  Eigen::VectorXd active_coefficients;
  /// (1 / 2K) * RSS + lambda * l1 on the fitting scale, initial value first,
  /// then one entry per sweep. Only filled when requested.
  std::vector<double> objective_trace;

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    return w0 + row.dot(weights.transpose());
  }
};

double soft_threshold(double rho, double lambda);

/// Cyclic coordinate descent for
///   (1 / 2K) * sum_k (y_k - w0 - sum_i w_i x_ik)^2 + lambda * sum_i |w_i|
/// on the fitting scale. Throws InvalidInput on negative lambda or a
/// non-positive tolerance.
LassoFit fit(const RegressionProblem& problem, double lambda, const FitOptions& options = {},
             const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

/// Smallest lambda whose solution is all zero. Throws InvalidInput when every
/// column has zero variance.
double lambda_max(const RegressionProblem& problem);

/// `count` log-spaced values from `max_value` down to `max_value * ratio`.
std::vector<double> lambda_grid(double max_value, std::size_t count = 100, double ratio = 1e-3);

struct CvReport {
  std::vector<double> lambda_grid;
  std::vector<double> cv_errors;
  std::vector<std::vector<double>> fold_errors;  // grid x k
  std::size_t k_folds = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of_row;

  /// Standard error of the fold MSEs at grid point g.
  double standard_error(std::size_t g) const;
};

/// Rows are permuted with the seeded generator and dealt into k folds of
/// near-equal size. Fold paths run on up to `threads` workers; the report does
/// not depend on the worker count.
CvReport cross_validate(const RegressionProblem& problem, std::span<const double> grid,
                        std::size_t k_folds = 5, std::uint64_t seed = 0,
                        const FitOptions& options = {}, std::size_t threads = 1);

enum class SelectionRule { min, one_se };

struct Selection {
  std::size_t grid_index = 0;
  double lambda = 0.0;
  LassoFit fit;
};

/// Picks a lambda from the report (ties toward the larger lambda) and refits
/// on the full problem.
Selection select_lambda(const RegressionProblem& problem, const CvReport& report,
                        SelectionRule rule = SelectionRule::min, const FitOptions& options = {});

}  // namespace clickcascade::lasso
