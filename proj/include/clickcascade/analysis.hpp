#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clickcascade/cascade_sim.hpp"

namespace clickcascade::analysis {

using Series = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;

/// Entry (t, i): fraction of replicas whose round-t control carries feature i.
/// Throws InvalidInput when replicas disagree on round count or M.
Matrix feature_frequency_series(std::span<const sim::ReplicaResult> results, std::size_t M);

/// Row-wise maximum: the presence share of the first-ranked feature per round.
Series first_ranked_series(const Matrix& frequency);

struct FeatureDistribution {
  std::vector<double> values;  // one per feature index
  bool normalized = false;
};

/// Shares of each feature among the final control genotypes of all replicas.
FeatureDistribution final_feature_distribution(std::span<const sim::ReplicaResult> results,
                                               std::size_t M);

/// Same, from raw final-control feature lists.
FeatureDistribution feature_distribution(std::span<const std::vector<std::size_t>> genotypes,
                                         std::size_t M);

/// Shannon entropy in nats. Throws InvalidInput unless normalized.
double shannon_entropy(const FeatureDistribution& dist);

/// Gini coefficient of the share vector, zero entries included.
double gini(const FeatureDistribution& dist);

struct PolyFit {
  std::vector<double> coefficients;  // constant term first, time axis scaled to [0, 1]
  double r_squared = 0.0;
};

/// Least-squares polynomial of the given degree over t_k = k / (n - 1).
/// Throws InvalidInput when the series is too short, has zero variance, or
/// the normal equations are singular.
PolyFit polyfit_r2(std::span<const double> series, std::size_t degree);

struct Interval {
  double estimate = 0.0;  // statistic on the full sample
  double mean = 0.0;      // mean over bootstrap resamples
  double lower = 0.0;
  double upper = 0.0;
};

/// Percentile bootstrap of the final-distribution entropy, resampling
/// replicas with replacement.
Interval bootstrap_entropy(std::span<const std::vector<std::size_t>> final_genotypes,
                           std::size_t M, std::size_t resamples, std::uint64_t seed,
                           double confidence = 0.95);

}  // namespace clickcascade::analysis
