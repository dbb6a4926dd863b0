#include <doctest.h>

#include <cmath>
#include <random>

#include "clickcascade/bayes_ab.hpp"
#include "clickcascade/error.hpp"

using namespace clickcascade;
using namespace clickcascade::bayes_ab;

TEST_CASE("posteriors from counts") {
  auto p = posterior_from_counts(ArmStats(0, 0));
  CHECK(p.alpha == 1);
  CHECK(p.beta == 1);
  p = posterior_from_counts(ArmStats(5, 10));
  CHECK(p.alpha == 6);
  CHECK(p.beta == 11);
  p = posterior_from_counts(ArmStats(0, 100));
  CHECK(p.alpha == 1);
  CHECK(p.beta == 101);
  CHECK_THROWS_AS(ArmStats(-1, 3), InvalidInput);
  CHECK_THROWS_AS(ArmStats::from_impressions(5, 4), InvalidInput);
  CHECK(ArmStats::from_impressions(5, 20).failures() == 15);
  CHECK_FALSE(ArmStats(0, 0).ctr().has_value());
}

TEST_CASE("closed form exact values") {
  CHECK(std::abs(prob_b_beats_a({1, 1}, {1, 1}) - 0.5) <= 1e-12);
  CHECK(std::abs(prob_b_beats_a({1, 1}, {2, 1}) - 2.0 / 3.0) <= 1e-9);
  // P(B > A) with A ~ Beta(2,1), B ~ Beta(1,1) is 1/3.
  CHECK(std::abs(prob_b_beats_a({2, 1}, {1, 1}) - 1.0 / 3.0) <= 1e-9);
}

TEST_CASE("identical posteriors give one half") {
  for (double a : {1.0, 3.0, 21.0, 200.0, 1500.0})
    for (double b : {1.0, 7.0, 81.0, 900.0}) {
      CAPTURE(a);
      CAPTURE(b);
      CHECK(std::abs(prob_b_beats_a({a, b}, {a, b}) - 0.5) <= 1e-12);
    }
}

TEST_CASE("closed form agrees with Monte Carlo") {
  const BetaPosterior a{21, 81}, b{31, 71};
  CHECK(std::abs(prob_b_beats_a(a, b) - prob_b_beats_a_mc(a, b, 1'000'000, 1)) < 0.005);
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> count(1, 300);
  for (int i = 0; i < 20; ++i) {
    const BetaPosterior x{double(count(gen)), double(count(gen))};
    const BetaPosterior y{double(count(gen)), double(count(gen))};
    CHECK(std::abs(prob_b_beats_a(x, y) - prob_b_beats_a_mc(x, y, 200'000, i)) < 0.005);
  }
}

TEST_CASE("Monte Carlo estimator sanity") {
  CHECK(std::abs(prob_b_beats_a_mc({5, 5}, {5, 5}, 1'000'000, 3) - 0.5) <= 0.002);
  CHECK(prob_b_beats_a_mc({1, 100}, {100, 1}, 100'000, 4) >= 0.999);
  CHECK(prob_b_beats_a_mc({4, 6}, {5, 5}, 1000, 9) == prob_b_beats_a_mc({4, 6}, {5, 5}, 1000, 9));
}

TEST_CASE("complementarity and monotonicity") {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<int> count(1, 2000);
  for (int i = 0; i < 50; ++i) {
    const BetaPosterior x{double(count(gen)), double(count(gen))};
    const BetaPosterior y{double(count(gen)), double(count(gen))};
    CHECK(std::abs(prob_b_beats_a(x, y) + prob_b_beats_a(y, x) - 1.0) <= 1e-9);
  }
  for (int clicks = 0; clicks < 60; ++clicks) {
    const auto a = posterior_from_counts(ArmStats(20, 80));
    const auto before = prob_b_beats_a(a, posterior_from_counts(ArmStats(clicks, 80)));
    const auto after = prob_b_beats_a(a, posterior_from_counts(ArmStats(clicks + 1, 80)));
    CHECK(after >= before);
  }
}

TEST_CASE("large counts stay finite") {
  const double p = prob_b_beats_a({1e6 * 0.02 + 1, 1e6 * 0.98 + 1}, {1e6 * 0.0201 + 1, 1e6 * 0.9799 + 1});
  CHECK(std::isfinite(p));
  CHECK(p > 0.5);
  CHECK(p <= 1.0);
  const double q = prob_b_beats_a({1, 1e6 + 1}, {1e6 + 1, 1});
  CHECK(q == doctest::Approx(1.0));
}

TEST_CASE("non-integer alpha_B is rejected") {
  CHECK_THROWS_AS(prob_b_beats_a({1, 1}, {1.5, 1}), InvalidInput);
  CHECK_THROWS_AS(prob_b_beats_a({0, 1}, {1, 1}), InvalidInput);
  CHECK_NOTHROW(prob_b_beats_a({1.5, 2.5}, {2, 1.25}));
}

TEST_CASE("uplift") {
  CHECK(uplift(0.10, 0.12) == doctest::Approx(0.2));
  CHECK(uplift(0.10, 0.10) == 0.0);
  CHECK(uplift(0.2, 0.1) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(uplift(0.0, 0.5), InvalidInput);
}

TEST_CASE("normal quantile reference values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(std::abs(normal_quantile(0.975) - 1.959963984540054) < 1e-8);
  CHECK(std::abs(normal_quantile(0.95) - 1.6448536269514722) < 1e-8);
  CHECK(std::abs(normal_quantile(0.01) + 2.3263478740408408) < 1e-8);
  CHECK(std::abs(normal_quantile(1e-10) + 6.361340902404056) < 1e-8);
  CHECK_THROWS_AS(normal_quantile(0.0), InvalidInput);
  CHECK_THROWS_AS(normal_quantile(1.0), InvalidInput);
}

TEST_CASE("z-test") {
  const auto same = z_test(ArmStats(10, 90), ArmStats(10, 90));
  CHECK(same.z == 0.0);
  CHECK(same.verdict == ZVerdict::not_significant);

  // Pooled p = 0.055, se = sqrt(0.055 * 0.945 * 2 / 1000), z = 0.09 / se.
  const auto strong = z_test(ArmStats(10, 990), ArmStats(100, 900), 0.05);
  CHECK(strong.verdict == ZVerdict::significant_b_better);
  CHECK(strong.z == doctest::Approx(0.09 / std::sqrt(0.055 * 0.945 * 0.002)));
  CHECK(strong.critical == doctest::Approx(1.6448536269514722));
  CHECK(strong.p_value < 1e-10);

  for (double sig : {0.01, 0.1, 0.3, 0.49})
    CHECK(z_test(ArmStats(30, 70), ArmStats(20, 80), sig).verdict == ZVerdict::not_significant);

  CHECK(z_test(ArmStats(0, 5), ArmStats(0, 5)).z == 0.0);
  CHECK_THROWS_AS(z_test(ArmStats(0, 0), ArmStats(1, 1)), InvalidInput);
  CHECK_THROWS_AS(z_test(ArmStats(1, 1), ArmStats(1, 1), 1.0), InvalidInput);
}

TEST_CASE("decision rule is strict") {
  const ArmStats a(20, 80), b(30, 70);
  const double p = prob_b_beats_a(posterior_from_counts(a), posterior_from_counts(b));
  CHECK(p > 0.9);
  CHECK(decide(a, b, p).action == AbAction::keep_control);
  CHECK(decide(a, b, std::nextafter(p, 0.0)).action == AbAction::promote_variant);
  const auto d = decide(a, b);
  CHECK(d.threshold == 0.95);
  CHECK(d.uplift.value() == doctest::Approx(0.5));
}

TEST_CASE("decide with no clicks anywhere keeps the control") {
  const auto d = decide(ArmStats(0, 50), ArmStats(0, 50));
  CHECK(d.probability_b_beats_a == doctest::Approx(0.5));
  CHECK(d.action == AbAction::keep_control);
  CHECK_FALSE(d.uplift.has_value());
}

TEST_CASE("decide promotes a clearly better variant") {
  const auto d = decide(ArmStats(10, 990), ArmStats(100, 900));
  CHECK(d.action == AbAction::promote_variant);
  CHECK(to_string(d.action) == "promote_variant");
}
