#include "clickcascade/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "clickcascade/error.hpp"
#include "clickcascade/rng.hpp"

namespace clickcascade::lasso {

RegressionProblem::RegressionProblem(Eigen::MatrixXd x, Eigen::VectorXd y, bool standardize)
    : x_(std::move(x)), y_(std::move(y)), standardized_(standardize) {
  if (x_.rows() != y_.size()) throw InvalidInput("regression problem: row count mismatch");
  if (x_.rows() < 2) throw InvalidInput("regression problem: need at least two rows");
  if (x_.cols() < 1) throw InvalidInput("regression problem: need at least one column");

  const auto rows = static_cast<double>(x_.rows());
  means_ = x_.colwise().mean().transpose();
  scales_ = Eigen::VectorXd::Ones(x_.cols());
  for (Eigen::Index j = 0; j < x_.cols(); ++j) {
    const double var = (x_.col(j).array() - means_(j)).square().sum() / rows;
    const double sd = std::sqrt(var);
    // Relative test so constant columns with rounding noise are still excluded.
    const double magnitude = std::max(1.0, std::abs(means_(j)));
    if (sd <= 1e-12 * magnitude) {
      excluded_.push_back(static_cast<std::size_t>(j));
      continue;
    }
    active_.push_back(static_cast<std::size_t>(j));
    if (standardized_) scales_(j) = sd;
  }

  design_.resize(x_.rows(), static_cast<Eigen::Index>(active_.size()));
  for (std::size_t a = 0; a < active_.size(); ++a) {
    const auto j = static_cast<Eigen::Index>(active_[a]);
    design_.col(static_cast<Eigen::Index>(a)) = (x_.col(j).array() - means_(j)) / scales_(j);
  }
  y_mean_ = y_.mean();
  centered_y_ = y_.array() - y_mean_;
}

RegressionProblem RegressionProblem::subset(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd xs(static_cast<Eigen::Index>(rows.size()), x_.cols());
  Eigen::VectorXd ys(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    xs.row(static_cast<Eigen::Index>(i)) = x_.row(static_cast<Eigen::Index>(rows[i]));
    ys(static_cast<Eigen::Index>(i)) = y_(static_cast<Eigen::Index>(rows[i]));
  }
  return RegressionProblem(std::move(xs), std::move(ys), standardized_);
}

double soft_threshold(double rho, double lambda) {
  if (rho > lambda) return rho - lambda;
  if (rho < -lambda) return rho + lambda;
  return 0.0;
}

namespace {

double objective(const Eigen::VectorXd& residual, const Eigen::VectorXd& beta, double lambda) {
  const auto rows = static_cast<double>(residual.size());
  return residual.squaredNorm() / (2.0 * rows) + lambda * beta.lpNorm<1>();
}

LassoFit back_transform(const RegressionProblem& problem, Eigen::VectorXd beta, double lambda) {
  LassoFit out;
  out.lambda = lambda;
  out.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.n_features()));
  double offset = 0.0;
  const auto& active = problem.active_columns();
  for (std::size_t a = 0; a < active.size(); ++a) {
    const auto j = static_cast<Eigen::Index>(active[a]);
    const double w = beta(static_cast<Eigen::Index>(a)) / problem.column_scales()(j);
    out.weights(j) = w;
    offset += w * problem.column_means()(j);
  }
  out.w0 = problem.y_mean() - offset;
  out.active_coefficients = std::move(beta);
  return out;
}

}  // namespace

LassoFit fit(const RegressionProblem& problem, double lambda, const FitOptions& options,
             const std::optional<Eigen::VectorXd>& warm_start) {
  if (!(lambda >= 0.0)) throw InvalidInput("lasso fit: lambda must be non-negative");
  if (!(options.tolerance > 0.0)) throw InvalidInput("lasso fit: tolerance must be positive");

  const Eigen::MatrixXd& x = problem.design();
  const auto rows = static_cast<double>(x.rows());
  const Eigen::Index p = x.cols();

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (warm_start) {
    if (warm_start->size() != p) throw InvalidInput("lasso fit: warm start has wrong length");
    beta = *warm_start;
  }
  Eigen::VectorXd residual = problem.centered_y() - x * beta;
  Eigen::VectorXd curvature(p);
  for (Eigen::Index j = 0; j < p; ++j) curvature(j) = x.col(j).squaredNorm() / rows;

  std::vector<double> trace;
  if (options.record_objective) trace.push_back(objective(residual, beta, lambda));

  bool converged = false;
  std::size_t sweeps = 0;
  while (sweeps < options.max_iterations) {
    ++sweeps;
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double old = beta(j);
      const double rho = x.col(j).dot(residual) / rows + curvature(j) * old;
      const double updated = soft_threshold(rho, lambda) / curvature(j);
      const double delta = updated - old;
      if (delta != 0.0) {
        residual.noalias() -= delta * x.col(j);
        beta(j) = updated;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    if (options.record_objective) trace.push_back(objective(residual, beta, lambda));
    if (max_change < options.tolerance) {
      converged = true;
      break;
    }
  }

  LassoFit out = back_transform(problem, std::move(beta), lambda);
  out.iterations_used = sweeps;
  out.converged = converged;
  out.objective_trace = std::move(trace);
  return out;
}

double lambda_max(const RegressionProblem& problem) {
  const Eigen::MatrixXd& x = problem.design();
  if (x.cols() == 0) throw InvalidInput("lambda_max: every column has zero variance");
  const auto rows = static_cast<double>(x.rows());
  double best = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    best = std::max(best, std::abs(x.col(j).dot(problem.centered_y()) / rows));
  return best;
}

std::vector<double> lambda_grid(double max_value, std::size_t count, double ratio) {
  if (count < 2) throw InvalidInput("lambda_grid: count must be at least 2");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("lambda_grid: ratio must be in (0, 1)");
  if (!(max_value > 0.0)) throw InvalidInput("lambda_grid: max value must be positive");
  std::vector<double> grid(count);
  const double log_step = std::log(ratio) / static_cast<double>(count - 1);
  grid.front() = max_value;
  for (std::size_t g = 1; g + 1 < count; ++g)
    grid[g] = max_value * std::exp(log_step * static_cast<double>(g));
  grid.back() = max_value * ratio;
  return grid;
}

double CvReport::standard_error(std::size_t g) const {
  const auto& errs = fold_errors.at(g);
  const double n = static_cast<double>(errs.size());
  if (errs.size() < 2) return 0.0;
  const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : errs) ss += (e - mean) * (e - mean);
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

CvReport cross_validate(const RegressionProblem& problem, std::span<const double> grid,
                        std::size_t k_folds, std::uint64_t seed, const FitOptions& options,
                        std::size_t threads) {
  const std::size_t rows = problem.n_rows();
  if (k_folds < 2 || k_folds > rows)
    throw InvalidInput("cross_validate: k_folds must be in [2, " + std::to_string(rows) + "]");
  if (grid.empty()) throw InvalidInput("cross_validate: empty lambda grid");

  CvReport report;
  report.lambda_grid.assign(grid.begin(), grid.end());
  report.k_folds = k_folds;
  report.seed = seed;

  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  report.fold_of_row.assign(rows, 0);
  for (std::size_t pos = 0; pos < rows; ++pos) report.fold_of_row[order[pos]] = pos % k_folds;

  // errors[fold][g]; each fold writes only its own slot.
  std::vector<std::vector<double>> errors(k_folds, std::vector<double>(grid.size(), 0.0));
  auto run_fold = [&](std::size_t fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t r = 0; r < rows; ++r)
      (report.fold_of_row[r] == fold ? test : train).push_back(r);
    const RegressionProblem sub = problem.subset(train);
    std::optional<Eigen::VectorXd> warm;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      LassoFit f;
      if (sub.active_columns().empty()) {
        f.w0 = sub.y_mean();
        f.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.n_features()));
      } else {
        f = fit(sub, grid[g], options, warm);
        warm = f.active_coefficients;
      }
      double sse = 0.0;
      for (std::size_t r : test) {
        const double e = problem.y()(static_cast<Eigen::Index>(r)) -
                         f.predict(problem.x().row(static_cast<Eigen::Index>(r)));
        sse += e * e;
      }
      errors[fold][g] = sse / static_cast<double>(test.size());
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, k_folds);
  if (workers == 1) {
    for (std::size_t fold = 0; fold < k_folds; ++fold) run_fold(fold);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t fold = w; fold < k_folds; fold += workers) run_fold(fold);
      });
    for (auto& t : pool) t.join();
  }

  report.fold_errors.assign(grid.size(), std::vector<double>(k_folds));
  report.cv_errors.assign(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t fold = 0; fold < k_folds; ++fold) {
      report.fold_errors[g][fold] = errors[fold][g];
      sum += errors[fold][g];
    }
    report.cv_errors[g] = sum / static_cast<double>(k_folds);
  }
  return report;
}

Selection select_lambda(const RegressionProblem& problem, const CvReport& report,
                        SelectionRule rule, const FitOptions& options) {
  if (report.cv_errors.empty() || report.cv_errors.size() != report.lambda_grid.size())
    throw InvalidInput("select_lambda: empty or inconsistent report");

  // Candidates visited from largest to smallest lambda so ties keep the
  // sparser model.
  std::vector<std::size_t> by_lambda(report.lambda_grid.size());
  std::iota(by_lambda.begin(), by_lambda.end(), std::size_t{0});
  std::stable_sort(by_lambda.begin(), by_lambda.end(), [&](std::size_t a, std::size_t b) {
    return report.lambda_grid[a] > report.lambda_grid[b];
  });

  std::size_t best = by_lambda.front();
  for (std::size_t g : by_lambda)
    if (report.cv_errors[g] < report.cv_errors[best]) best = g;

  std::size_t chosen = best;
  if (rule == SelectionRule::one_se) {
    const double limit = report.cv_errors[best] + report.standard_error(best);
    for (std::size_t g : by_lambda) {
      if (report.cv_errors[g] <= limit) {
        chosen = g;
        break;
      }
    }
  }

  Selection out;
  out.grid_index = chosen;
  out.lambda = report.lambda_grid[chosen];
  out.fit = fit(problem, out.lambda, options);
  return out;
}

}  // namespace clickcascade::lasso
