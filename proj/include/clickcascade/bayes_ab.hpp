#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace clickcascade::bayes_ab {

/// Click and non-click counts for one arm of a test.
class ArmStats {
 public:
  /// Throws InvalidInput on negative counts.
  ArmStats(std::int64_t clicks, std::int64_t failures);

  /// Throws InvalidInput unless 0 <= clicks <= impressions.
  static ArmStats from_impressions(std::int64_t clicks, std::int64_t impressions);

  std::int64_t clicks() const noexcept { return clicks_; }
  std::int64_t failures() const noexcept { return failures_; }
  std::int64_t impressions() const noexcept { return clicks_ + failures_; }
  /// clicks / impressions, or nullopt with no impressions.
  std::optional<double> ctr() const noexcept;

 private:
  std::int64_t clicks_;
  std::int64_t failures_;
};

struct BetaPosterior {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Beta(C + 1, F + 1): the flat Beta(1, 1) prior updated with the counts.
BetaPosterior posterior_from_counts(const ArmStats& stats);

/// Exact P(p_B > p_A) for independent Beta posteriors, as the finite sum
///   sum_{i=0}^{alpha_B - 1} B(alpha_A + i, beta_A + beta_B)
///       / ((beta_B + i) B(1 + i, beta_B) B(alpha_A, beta_A)),
/// evaluated in log space. Throws InvalidInput unless all parameters are
/// positive and alpha_B is an integer.
double prob_b_beats_a(const BetaPosterior& a, const BetaPosterior& b);

/// Monte Carlo estimate of the same probability from paired posterior draws.
double prob_b_beats_a_mc(const BetaPosterior& a, const BetaPosterior& b, std::uint64_t n_samples,
                         std::uint64_t seed);

/// Relative CTR gain (ctr_b - ctr_a) / ctr_a. Throws InvalidInput when
/// ctr_a is zero.
double uplift(double ctr_a, double ctr_b);

/// Standard normal quantile: Acklam's rational approximation polished with
/// one Halley step. Throws InvalidInput outside (0, 1).
double normal_quantile(double p);

enum class ZVerdict { significant_b_better, not_significant };

struct ZTestResult {
  double z = 0.0;
  double p_value = 1.0;    // one-sided, P(Z >= z)
  double critical = 0.0;   // upper quantile at 1 - significance
  ZVerdict verdict = ZVerdict::not_significant;
};

/// One-sided two-proportion z-test with pooled variance. Throws InvalidInput
/// when either arm has no impressions or significance is outside (0, 1).
ZTestResult z_test(const ArmStats& a, const ArmStats& b, double significance = 0.05);

enum class AbAction { keep_control, promote_variant };

struct AbDecision {
  AbAction action = AbAction::keep_control;
  double probability_b_beats_a = 0.5;
  std::optional<double> uplift;  // absent when the control has zero CTR
  double threshold = 0.95;
};

/// Promotes the variant iff P(p_B > p_A) is strictly above the threshold.
AbDecision decide(const ArmStats& a, const ArmStats& b, double threshold = 0.95);

std::string_view to_string(AbAction action);
std::string_view to_string(ZVerdict verdict);

}  // namespace clickcascade::bayes_ab
