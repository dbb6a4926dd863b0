#include "clickcascade/bayes_ab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "clickcascade/error.hpp"
#include "clickcascade/rng.hpp"

namespace clickcascade::bayes_ab {

ArmStats::ArmStats(std::int64_t clicks, std::int64_t failures) : clicks_(clicks), failures_(failures) {
  if (clicks < 0 || failures < 0) throw InvalidInput("arm stats: counts must be non-negative");
}

ArmStats ArmStats::from_impressions(std::int64_t clicks, std::int64_t impressions) {
  if (clicks < 0 || impressions < 0) throw InvalidInput("arm stats: counts must be non-negative");
  if (clicks > impressions) throw InvalidInput("arm stats: clicks exceed impressions");
  return ArmStats(clicks, impressions - clicks);
}

std::optional<double> ArmStats::ctr() const noexcept {
  if (impressions() == 0) return std::nullopt;
  return static_cast<double>(clicks_) / static_cast<double>(impressions());
}

BetaPosterior posterior_from_counts(const ArmStats& stats) {
  return {static_cast<double>(stats.clicks()) + 1.0, static_cast<double>(stats.failures()) + 1.0};
}

namespace {

long double log_beta(long double a, long double b) {
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

void check_posterior(const BetaPosterior& p, const char* arm) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta))
    throw InvalidInput(std::string("posterior ") + arm + ": parameters must be positive and finite");
}

}  // namespace

double prob_b_beats_a(const BetaPosterior& a, const BetaPosterior& b) {
  check_posterior(a, "A");
  check_posterior(b, "B");
  if (b.alpha != std::floor(b.alpha))
    throw InvalidInput(
        "prob_b_beats_a: the closed form needs an integer alpha for B; use the Monte Carlo "
        "estimate (prob_b_beats_a_mc) instead");

  // Consecutive terms differ by the factor
  //   (alpha_A + i)(beta_B + i) / ((alpha_A + beta_A + beta_B + i)(1 + i)),
  // so only the first term needs log-gamma evaluations.
  // Extended precision keeps the log-gamma cancellation below 1e-12 for
  // counts in the tens of thousands.
  using real = long double;
  const auto n_terms = static_cast<std::size_t>(b.alpha);
  const real alpha_a = a.alpha, beta_a = a.beta, beta_b = b.beta;
  std::vector<real> log_terms(n_terms);
  real log_term = log_beta(alpha_a, beta_a + beta_b) - std::log(beta_b) - log_beta(1.0L, beta_b) -
                  log_beta(alpha_a, beta_a);
  const real total_ab = alpha_a + beta_a + beta_b;
  for (std::size_t i = 0; i < n_terms; ++i) {
    log_terms[i] = log_term;
    const auto fi = static_cast<real>(i);
    log_term += std::log(((alpha_a + fi) / (total_ab + fi)) * ((beta_b + fi) / (1.0L + fi)));
  }
  const real peak = *std::max_element(log_terms.begin(), log_terms.end());
  real sum = 0.0L;
  for (real lt : log_terms) sum += std::exp(lt - peak);
  const auto p = static_cast<double>(std::exp(peak + std::log(sum)));
  return std::clamp(p, 0.0, 1.0);
}

double prob_b_beats_a_mc(const BetaPosterior& a, const BetaPosterior& b, std::uint64_t n_samples,
                         std::uint64_t seed) {
  check_posterior(a, "A");
  check_posterior(b, "B");
  if (n_samples == 0) throw InvalidInput("prob_b_beats_a_mc: need at least one sample");
  Rng rng(seed);
  std::uint64_t wins = 0;
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    const double pa = rng.beta(a.alpha, a.beta);
    const double pb = rng.beta(b.alpha, b.beta);
    if (pb > pa) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(n_samples);
}

double uplift(double ctr_a, double ctr_b) {
  if (ctr_a == 0.0) throw InvalidInput("uplift: undefined for a control CTR of zero");
  return (ctr_b - ctr_a) / ctr_a;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("normal_quantile: p must be in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

ZTestResult z_test(const ArmStats& a, const ArmStats& b, double significance) {
  if (a.impressions() == 0 || b.impressions() == 0)
    throw InvalidInput("z_test: both arms need at least one impression");
  if (!(significance > 0.0 && significance < 1.0))
    throw InvalidInput("z_test: significance must be in (0, 1)");

  const auto na = static_cast<double>(a.impressions());
  const auto nb = static_cast<double>(b.impressions());
  const double pa = static_cast<double>(a.clicks()) / na;
  const double pb = static_cast<double>(b.clicks()) / nb;
  const double pooled = static_cast<double>(a.clicks() + b.clicks()) / (na + nb);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));

  ZTestResult out;
  out.z = se > 0.0 ? (pb - pa) / se : 0.0;
  out.p_value = 0.5 * std::erfc(out.z / std::numbers::sqrt2);
  out.critical = normal_quantile(1.0 - significance);
  out.verdict = out.z > out.critical ? ZVerdict::significant_b_better : ZVerdict::not_significant;
  return out;
}

AbDecision decide(const ArmStats& a, const ArmStats& b, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InvalidInput("decide: threshold must be in (0, 1)");
  AbDecision out;
  out.threshold = threshold;
  out.probability_b_beats_a = prob_b_beats_a(posterior_from_counts(a), posterior_from_counts(b));
  const auto ctr_a = a.ctr();
  const auto ctr_b = b.ctr();
  if (ctr_a && ctr_b && *ctr_a > 0.0) out.uplift = uplift(*ctr_a, *ctr_b);
  out.action = out.probability_b_beats_a > threshold ? AbAction::promote_variant
                                                     : AbAction::keep_control;
  return out;
}

std::string_view to_string(AbAction action) {
  return action == AbAction::promote_variant ? "promote_variant" : "keep_control";
}

std::string_view to_string(ZVerdict verdict) {
  return verdict == ZVerdict::significant_b_better ? "significant_b_better" : "not_significant";
}

}  // namespace clickcascade::bayes_ab
