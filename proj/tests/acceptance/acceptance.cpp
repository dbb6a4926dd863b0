// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clickcascade/bayes_ab.hpp"
#include "clickcascade/io.hpp"
#include "clickcascade/lasso.hpp"
#include "clickcascade/netgen.hpp"
#include "clickcascade/pipeline.hpp"
#include "clickcascade/rng.hpp"
#include "clickcascade/textfeat.hpp"
#include "clickcascade/topics.hpp"
#include "fixtures.hpp"

using namespace clickcascade;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- 1

Outcome bayes_closed_form() {
  const auto start = Clock::now();
  Rng rng(20240101);
  double worst = 0.0;
  for (int i = 0; i < 25; ++i) {
    auto draw = [&] { return static_cast<double>(1 + rng.uniform_index(10'000)); };
    const bayes_ab::BetaPosterior a{draw(), draw()};
    const bayes_ab::BetaPosterior b{draw(), draw()};
    const double exact = bayes_ab::prob_b_beats_a(a, b);
    const double mc = bayes_ab::prob_b_beats_a_mc(a, b, 1'000'000, 1000 + static_cast<std::uint64_t>(i));
    worst = std::max(worst, std::abs(exact - mc));
  }
  const double sym = bayes_ab::prob_b_beats_a({7, 13}, {7, 13});
  const double two_thirds = bayes_ab::prob_b_beats_a({1, 1}, {2, 1});
  const double elapsed = seconds_since(start);
  const bool pass = worst < 0.005 && std::abs(sym - 0.5) < 1e-12 &&
                    std::abs(two_thirds - 2.0 / 3.0) < 1e-9 && elapsed < 30.0;
  return {pass, "max |closed form - MC| = " + fmt(worst) + ", symmetric error " +
                    fmt(std::abs(sym - 0.5), 3) + ", Beta(1,1) vs Beta(2,1) error " +
                    fmt(std::abs(two_thirds - 2.0 / 3.0), 3) + ", " + fmt(elapsed, 3) + " s"};
}

// ---------------------------------------------------------------- 2

Outcome lasso_correctness() {
  const auto start = Clock::now();
  double worst_ols = 0.0;
  bool zero_ok = true;
  bool monotone = true;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const std::size_t rows = 40 + 8 * i;
    const std::size_t cols = 1 + i;
    const auto rp = fixtures::random_problem(rows, cols, 500 + i);
    const lasso::RegressionProblem problem(rp.x, rp.y);
    const auto f = lasso::fit(problem, 0.0, {1e-13, 200'000});
    const auto [w0, w] = fixtures::ols_normal_equations(rp.x, rp.y);
    worst_ols = std::max(worst_ols, std::abs(f.w0 - w0));
    for (std::size_t j = 0; j < w.size(); ++j)
      worst_ols = std::max(worst_ols, std::abs(f.weights(static_cast<Eigen::Index>(j)) - w[j]));

    const double lmax = lasso::lambda_max(problem);
    for (double scale : {1.0, 1.5, 10.0}) {
      const auto z = lasso::fit(problem, lmax * scale);
      zero_ok = zero_ok && (z.weights.array() == 0.0).all();
    }
    lasso::FitOptions traced;
    traced.record_objective = true;
    for (double ratio : {0.0, 0.001, 0.05, 0.5}) {
      const auto t = lasso::fit(problem, lmax * ratio, traced);
      for (std::size_t k = 1; k < t.objective_trace.size(); ++k)
        monotone = monotone && t.objective_trace[k] <= t.objective_trace[k - 1] + 1e-12;
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst_ols < 1e-6 && zero_ok && monotone && elapsed < 30.0;
  return {pass, "max |lambda=0 - OLS| = " + fmt(worst_ols, 3) + ", zero at lambda_max: " +
                    (zero_ok ? "yes" : "no") + ", objective monotone: " + (monotone ? "yes" : "no") +
                    ", " + fmt(elapsed, 3) + " s"};
}

// ---------------------------------------------------------------- 3, 4, 5

io::ExperimentConfig pilot_config(sim::Scenario scenario) {
  io::ExperimentConfig cfg;
  auto& s = cfg.simulation;
  s.n_agents = 500;
  s.topology = netgen::BarabasiAlbert{3};
  s.total_steps = 500;
  s.round_length = 5;
  s.n_features_per_package = 7;
  s.feature_universe = 50;
  s.mutation_rate = 3.0 / 7.0;
  s.infection_rate = 0.5;
  s.ab_threshold = 0.95;
  s.scenario = scenario;
  s.pure_keep_rule = sim::KeepRule::random;
  s.n_replicas = 50;
  s.master_seed = 1;
  cfg.model.synthetic_seed = 7;
  cfg.analysis.bootstrap_resamples = 2000;
  cfg.analysis.bootstrap_seed = 3;
  cfg.analysis.confidence = 0.95;
  cfg.analysis.fit_degrees = {1, 3};
  return cfg;
}

struct Pilot {
  pipeline::ScenarioSummary pure;
  pipeline::ScenarioSummary ab;
  double seconds = 0.0;
};

Pilot run_pilot() {
  const auto start = Clock::now();
  Pilot p;
  for (auto scenario : {sim::Scenario::pure, sim::Scenario::ab_led}) {
    io::LoadedResults loaded;
    loaded.config = pilot_config(scenario);
    const auto model = io::resolve_model(loaded.config);
    sim::validate(loaded.config.simulation, model);
    loaded.results = sim::run_experiment(loaded.config.simulation, model);
    auto summary = pipeline::summarize(loaded, std::string(sim::to_string(scenario)));
    (scenario == sim::Scenario::pure ? p.pure : p.ab) = std::move(summary);
  }
  p.seconds = seconds_since(start);
  return p;
}

std::string interval(const analysis::Interval& i) {
  return fmt(i.estimate, 4) + " [" + fmt(i.lower, 4) + ", " + fmt(i.upper, 4) + "]";
}

Outcome homogenization(const Pilot& p) {
  const bool lower = p.ab.entropy.estimate < p.pure.entropy.estimate;
  const bool separated = p.ab.entropy.upper < p.pure.entropy.lower;
  return {lower && separated && p.seconds < 600.0,
          "entropy pure " + interval(p.pure.entropy) + ", ab_led " + interval(p.ab.entropy) +
              ", gini pure " + fmt(p.pure.gini, 4) + " ab_led " + fmt(p.ab.gini, 4) + ", " +
              fmt(p.seconds, 3) + " s"};
}

Outcome trend_shape(const Pilot& p) {
  if (!p.pure.delta_r2 || !p.ab.delta_r2)
    return {false, "a trend fit is undefined (constant first-ranked series)"};
  return {*p.pure.delta_r2 > *p.ab.delta_r2,
          "R^2(cubic) - R^2(linear): pure " + fmt(*p.pure.delta_r2, 4) + ", ab_led " +
              fmt(*p.ab.delta_r2, 4)};
}

Outcome determinism() {
  const auto start = Clock::now();
  const fs::path dir = fs::path(CLICKCASCADE_SCRATCH_DIR) / "acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << io::experiment_config_json(pilot_config(sim::Scenario::ab_led));
  }
  std::vector<std::string> texts;
  for (const char* cap : {"1", "8"}) {
    ::setenv("CLICKCASCADE_THREADS", cap, 1);
    std::ostringstream out, err;
    const auto out_dir = dir / (std::string("threads_") + cap);
    const int status = pipeline::run_pipeline(
        {"simulate", "--config", (dir / "config.json").string(), "--output-dir", out_dir.string()},
        out, err);
    if (status != 0) {
      ::unsetenv("CLICKCASCADE_THREADS");
      return {false, "simulate failed: " + err.str()};
    }
    texts.push_back(io::read_file(out_dir / "results.json") + io::read_file(out_dir / "rounds.csv"));
  }
  ::unsetenv("CLICKCASCADE_THREADS");
  return {texts[0] == texts[1], "results.json and rounds.csv at caps 1 and 8 " +
                                    std::string(texts[0] == texts[1] ? "identical" : "differ") +
                                    " (sha256 " + io::sha256_hex(texts[0]).substr(0, 12) + "), " +
                                    fmt(seconds_since(start), 3) + " s"};
}

// ---------------------------------------------------------------- 6

bool within_binomial(std::size_t edges, std::size_t pairs, double p) {
  const double mean = static_cast<double>(pairs) * p;
  const double sd = std::sqrt(static_cast<double>(pairs) * p * (1.0 - p));
  return std::abs(static_cast<double>(edges) - mean) <= 4.0 * sd;
}

Outcome graph_generators() {
  const auto start = Clock::now();
  int er_ok = 0, sbm_ok = 0;
  const std::vector<std::size_t> blocks{60, 40};
  const std::vector<std::vector<double>> rates{{0.2, 0.05}, {0.05, 0.3}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    er_ok += within_binomial(netgen::erdos_renyi(200, 0.05, seed).n_edges(), 19900, 0.05) ? 1 : 0;
    const auto g = netgen::sbm(blocks, rates, seed);
    std::size_t within_a = 0, within_b = 0, across = 0;
    for (const auto& [i, j] : g.edges()) {
      const bool ia = i < 60, ja = j < 60;
      (ia && ja ? within_a : (!ia && !ja ? within_b : across)) += 1;
    }
    const bool ok = within_binomial(within_a, 60 * 59 / 2, 0.2) &&
                    within_binomial(within_b, 40 * 39 / 2, 0.3) &&
                    within_binomial(across, 60 * 40, 0.05);
    sbm_ok += ok ? 1 : 0;
  }
  const std::vector<std::pair<std::size_t, std::size_t>> ba_cases{
      {4, 1}, {10, 2}, {50, 1}, {50, 3}, {100, 2}, {100, 5}, {250, 4}, {500, 3}, {1000, 1}, {1000, 7}};
  int ba_ok = 0;
  for (const auto& [n, m] : ba_cases) {
    const auto g = netgen::barabasi_albert(n, m, n + 31 * m);
    ba_ok += g.n_edges() == (m + 1) * m / 2 + m * (n - m - 1) ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  return {er_ok == 20 && sbm_ok == 20 && ba_ok == 10 && elapsed < 10.0,
          "ER " + std::to_string(er_ok) + "/20, SBM " + std::to_string(sbm_ok) + "/20, BA " +
              std::to_string(ba_ok) + "/10 exact, " + fmt(elapsed, 3) + " s"};
}

// ---------------------------------------------------------------- 7

Outcome lda_sanity() {
  const auto start = Clock::now();
  int pure_runs = 0;
  bool conserved = true;
  double worst = 1.0;
  for (std::uint64_t run = 0; run < 20; ++run) {
    const auto corpus = topics::build_documents(fixtures::disjoint_corpus(100 + run));
    std::int64_t tokens = 0;
    for (const auto& d : corpus.documents) tokens += static_cast<std::int64_t>(d.terms.size());
    topics::LdaParams params;
    params.n_topics = 2;
    params.iterations = 200;
    params.seed = run;
    const auto model = topics::fit_lda(corpus, params, [&](std::size_t, const topics::LdaModel& s) {
      std::int64_t all = 0;
      for (std::size_t k = 0; k < s.n_topics; ++k) {
        std::int64_t row = 0;
        for (auto c : s.topic_word_counts[k]) {
          conserved = conserved && c >= 0;
          row += c;
        }
        conserved = conserved && row == s.topic_totals[k];
        all += row;
      }
      conserved = conserved && all == tokens;
    });
    const double purity = fixtures::topic_purity(model);
    worst = std::min(worst, purity);
    pure_runs += purity >= 0.9 ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  return {pure_runs >= 19 && conserved && elapsed < 60.0,
          std::to_string(pure_runs) + "/20 runs with purity >= 0.9 (worst " + fmt(worst, 3) +
              "), counts conserved every sweep: " + (conserved ? "yes" : "no") + ", " +
              fmt(elapsed, 3) + " s"};
}

// ---------------------------------------------------------------- 8

Outcome golden_headlines() {
  std::ifstream in(fixtures::test_data_dir() / "golden_headlines.json");
  if (!in) return {false, "golden file missing"};
  const auto cases = json::parse(in);
  int matched = 0;
  for (const auto& c : cases) {
    const std::string headline = c.at("headline");
    const auto got = textfeat::extract_formal(headline);
    bool same = got.size() == c.at("features").size() &&
                textfeat::to_string(textfeat::classify_headline_type(headline)) ==
                    c.at("type").get<std::string>();
    for (const auto& [name, value] : c.at("features").items())
      same = same && got.count(name) && got.at(name) == value.get<double>();
    matched += same ? 1 : 0;
  }
  const double fr = textfeat::extract_formal("She Did Not Expect THIS").at("forward_reference");
  const bool pass = cases.size() == 25 && matched == 25 && fr == 1.0;
  return {pass, std::to_string(matched) + "/" + std::to_string(cases.size()) +
                    " golden headlines exact, forward_reference(\"She Did Not Expect THIS\") = " +
                    fmt(fr)};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    std::string name;
    std::function<Outcome()> check;
  };
  Pilot pilot;
  bool pilot_done = false;
  auto ensure_pilot = [&]() -> const Pilot& {
    if (!pilot_done) {
      pilot = run_pilot();
      pilot_done = true;
    }
    return pilot;
  };
  const std::vector<Criterion> criteria{
      {1, "Bayesian closed form vs Monte Carlo", bayes_closed_form},
      {2, "LASSO correctness", lasso_correctness},
      {3, "A/B-led selection homogenizes features", [&] { return homogenization(ensure_pilot()); }},
      {4, "trend shape: cubic gain larger without A/B tests", [&] { return trend_shape(ensure_pilot()); }},
      {5, "simulate is deterministic across thread caps", determinism},
      {6, "graph generators", graph_generators},
      {7, "LDA topic purity and count conservation", lda_sanity},
      {8, "headline feature golden file", golden_headlines},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": " << c.name
              << " -- " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
