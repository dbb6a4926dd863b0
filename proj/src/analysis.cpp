#include "clickcascade/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "clickcascade/error.hpp"
#include "clickcascade/rng.hpp"

namespace clickcascade::analysis {

namespace {

constexpr double kNormalizationTolerance = 1e-9;

void require_normalized(const FeatureDistribution& dist, const char* who) {
  const double total = std::accumulate(dist.values.begin(), dist.values.end(), 0.0);
  const bool non_negative =
      std::all_of(dist.values.begin(), dist.values.end(), [](double v) { return v >= 0.0; });
  if (!dist.normalized || !non_negative || std::abs(total - 1.0) > kNormalizationTolerance)
    throw InvalidInput(std::string(who) + ": distribution is not normalized");
}

double percentile(std::vector<double> sorted, double q) {
  // Linear interpolation between closest ranks.
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

Matrix feature_frequency_series(std::span<const sim::ReplicaResult> results, std::size_t M) {
  if (results.empty()) throw InvalidInput("feature_frequency_series: no replicas");
  const std::size_t rounds = results.front().round_logs.size();
  Matrix freq(rounds, std::vector<double>(M, 0.0));
  for (const auto& r : results) {
    if (r.round_logs.size() != rounds)
      throw InvalidInput("feature_frequency_series: replicas have different round counts");
    for (std::size_t t = 0; t < rounds; ++t)
      for (std::size_t f : r.round_logs[t].arm_a.genotype.features) {
        if (f >= M) throw InvalidInput("feature_frequency_series: feature outside universe");
        freq[t][f] += 1.0;
      }
  }
  const auto n = static_cast<double>(results.size());
  for (auto& row : freq)
    for (double& v : row) v /= n;
  return freq;
}

Series first_ranked_series(const Matrix& frequency) {
  Series out;
  out.reserve(frequency.size());
  for (const auto& row : frequency)
    out.push_back(row.empty() ? 0.0 : *std::max_element(row.begin(), row.end()));
  return out;
}

FeatureDistribution feature_distribution(std::span<const std::vector<std::size_t>> genotypes,
                                         std::size_t M) {
  if (genotypes.empty()) throw InvalidInput("feature_distribution: no genotypes");
  FeatureDistribution dist;
  dist.values.assign(M, 0.0);
  double total = 0.0;
  for (const auto& g : genotypes)
    for (std::size_t f : g) {
      if (f >= M) throw InvalidInput("feature_distribution: feature outside universe");
      dist.values[f] += 1.0;
      total += 1.0;
    }
  if (total == 0.0) throw InvalidInput("feature_distribution: genotypes are empty");
  for (double& v : dist.values) v /= total;
  dist.normalized = true;
  return dist;
}

FeatureDistribution final_feature_distribution(std::span<const sim::ReplicaResult> results,
                                               std::size_t M) {
  std::vector<std::vector<std::size_t>> genotypes;
  genotypes.reserve(results.size());
  for (const auto& r : results) genotypes.push_back(r.final_control.features);
  return feature_distribution(genotypes, M);
}

double shannon_entropy(const FeatureDistribution& dist) {
  require_normalized(dist, "shannon_entropy");
  double h = 0.0;
  for (double p : dist.values)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double gini(const FeatureDistribution& dist) {
  require_normalized(dist, "gini");
  std::vector<double> v = dist.values;
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  double weighted = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) weighted += static_cast<double>(i + 1) * v[i];
  return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

PolyFit polyfit_r2(std::span<const double> series, std::size_t degree) {
  const std::size_t n = series.size();
  if (n <= degree + 1)
    throw InvalidInput("polyfit_r2: need more than degree + 1 points");
  const Eigen::Map<const Eigen::VectorXd> y(series.data(), static_cast<Eigen::Index>(n));
  const double mean = y.mean();
  const double sst = (y.array() - mean).square().sum();
  if (!(sst > 0.0)) throw InvalidInput("polyfit_r2: R^2 undefined for a constant series");

  const auto cols = static_cast<Eigen::Index>(degree + 1);
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), cols);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    double power = 1.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      basis(static_cast<Eigen::Index>(k), c) = power;
      power *= t;
    }
  }
  // Column scaling keeps the normal equations well conditioned.
  const Eigen::VectorXd scale = basis.colwise().norm().transpose();
  const Eigen::MatrixXd scaled = basis * scale.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd gram = scaled.transpose() * scaled;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const double pivot_ratio = ldlt.vectorD().cwiseAbs().minCoeff() / ldlt.vectorD().cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(pivot_ratio > 1e-14))
    throw InvalidInput("polyfit_r2: normal equations are singular");
  const Eigen::VectorXd scaled_coef = ldlt.solve(scaled.transpose() * y);
  const Eigen::VectorXd coef = scaled_coef.cwiseQuotient(scale);

  const double ssr = (y - basis * coef).squaredNorm();
  PolyFit out;
  out.coefficients.assign(coef.data(), coef.data() + coef.size());
  out.r_squared = 1.0 - ssr / sst;
  return out;
}

Interval bootstrap_entropy(std::span<const std::vector<std::size_t>> final_genotypes,
                           std::size_t M, std::size_t resamples, std::uint64_t seed,
                           double confidence) {
  if (final_genotypes.empty()) throw InvalidInput("bootstrap_entropy: no replicas");
  if (resamples == 0) throw InvalidInput("bootstrap_entropy: need at least one resample");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw InvalidInput("bootstrap_entropy: confidence must be in (0, 1)");

  Interval out;
  out.estimate = shannon_entropy(feature_distribution(final_genotypes, M));
  Rng rng(seed);
  std::vector<double> stats;
  stats.reserve(resamples);
  std::vector<std::vector<std::size_t>> sample(final_genotypes.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& g : sample) g = final_genotypes[rng.uniform_index(final_genotypes.size())];
    stats.push_back(shannon_entropy(feature_distribution(sample, M)));
  }
  out.mean = std::accumulate(stats.begin(), stats.end(), 0.0) / static_cast<double>(resamples);
  std::sort(stats.begin(), stats.end());
  const double tail = (1.0 - confidence) / 2.0;
  out.lower = percentile(stats, tail);
  out.upper = percentile(stats, 1.0 - tail);
  return out;
}

}  // namespace clickcascade::analysis
