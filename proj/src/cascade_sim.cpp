#include "clickcascade/cascade_sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "clickcascade/bayes_ab.hpp"
#include "clickcascade/error.hpp"

namespace clickcascade::sim {

DecisionModel synthetic_model(std::size_t feature_universe, std::size_t n_features_per_package,
                              std::uint64_t seed) {
  if (n_features_per_package == 0) throw InvalidInput("synthetic_model: n_F must be positive");
  DecisionModel model;
  model.w0 = 0.5;
  const double scale = 0.25 / std::sqrt(static_cast<double>(n_features_per_package));
  Rng rng(seed);
  model.weights.resize(feature_universe);
  for (double& w : model.weights) w = scale * rng.normal();
  return model;
}

std::string PackageGenotype::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i) out += '+';
    out += std::to_string(features[i]);
  }
  return out;
}

std::vector<std::size_t> parse_genotype(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('+', start), text.size());
    const std::string_view part = text.substr(start, end - start);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size())
      throw InvalidInput("genotype: malformed '" + std::string(text) + "'");
    out.push_back(value);
    start = end + 1;
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw InvalidInput("genotype: repeated feature in '" + std::string(text) + "'");
  return out;
}

std::size_t SimConfig::replaced_features() const noexcept {
  return static_cast<std::size_t>(
      std::lround(mutation_rate * static_cast<double>(n_features_per_package)));
}

void validate(const SimConfig& c, const DecisionModel& model) {
  std::vector<std::string> problems;
  auto require = [&](bool ok, std::string message) {
    if (!ok) problems.push_back(std::move(message));
  };
  require(c.n_agents >= 2, "n_agents must be at least 2");
  require(c.round_length >= 1, "round_length must be at least 1");
  require(c.round_length >= 1 && c.total_steps >= c.round_length &&
              c.total_steps % std::max<std::size_t>(c.round_length, 1) == 0,
          "total_steps must be a positive multiple of round_length");
  require(c.n_features_per_package >= 1, "n_features_per_package must be at least 1");
  require(c.n_features_per_package <= c.feature_universe,
          "n_features_per_package must not exceed feature_universe");
  require(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0, "mutation_rate must be in [0, 1]");
  require(c.n_features_per_package > c.feature_universe ||
              c.feature_universe - c.n_features_per_package >= c.replaced_features(),
          "feature_universe - n_features_per_package is smaller than the number of features a "
          "mutation replaces");
  require(c.infection_rate > 0.0 && c.infection_rate <= 1.0, "infection_rate must be in (0, 1]");
  require(c.ab_threshold > 0.0 && c.ab_threshold < 1.0, "ab_threshold must be in (0, 1)");
  require(c.n_replicas >= 1, "n_replicas must be at least 1");
  require(model.weights.size() == c.feature_universe,
          "decision model has " + std::to_string(model.weights.size()) +
              " weights but feature_universe is " + std::to_string(c.feature_universe));
  require(model.probability_floor > 0.0 && model.probability_floor < 0.5,
          "probability_floor must be in (0, 0.5)");
  try {
    netgen::validate({c.topology, c.n_agents, 0});
  } catch (const InvalidInput& e) {
    problems.push_back(e.what());
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::string_view to_string(Scenario s) { return s == Scenario::pure ? "pure" : "ab_led"; }
std::string_view to_string(KeepRule r) { return r == KeepRule::random ? "random" : "most_clicked"; }
std::string_view to_string(Mapping m) {
  return m == Mapping::clipped_linear ? "clipped_linear" : "logistic";
}

Scenario parse_scenario(std::string_view s) {
  if (s == "pure") return Scenario::pure;
  if (s == "ab_led") return Scenario::ab_led;
  throw InvalidInput("unknown scenario '" + std::string(s) + "' (expected pure or ab_led)");
}

KeepRule parse_keep_rule(std::string_view s) {
  if (s == "random") return KeepRule::random;
  if (s == "most_clicked") return KeepRule::most_clicked;
  throw InvalidInput("unknown keep rule '" + std::string(s) + "' (expected random or most_clicked)");
}

Mapping parse_mapping(std::string_view s) {
  if (s == "clipped_linear") return Mapping::clipped_linear;
  if (s == "logistic") return Mapping::logistic;
  throw InvalidInput("unknown mapping '" + std::string(s) +
                     "' (expected clipped_linear or logistic)");
}

double click_probability(const DecisionModel& model, const PackageGenotype& pkg) {
  double score = model.w0;
  for (std::size_t f : pkg.features) {
    if (f >= model.weights.size())
      throw InvalidInput("click_probability: feature " + std::to_string(f) + " outside [0, " +
                         std::to_string(model.weights.size()) + ")");
    score += model.weights[f];
  }
  if (model.mapping == Mapping::logistic) score = 1.0 / (1.0 + std::exp(-score));
  return std::clamp(score, model.probability_floor, 1.0 - model.probability_floor);
}

PackageGenotype random_package(std::size_t M, std::size_t n_F, Rng& rng, std::size_t id,
                               std::size_t lineage_id) {
  if (n_F > M) throw InvalidInput("random_package: n_F exceeds the feature universe");
  std::vector<std::size_t> all(M);
  std::iota(all.begin(), all.end(), std::size_t{0});
  PackageGenotype pkg;
  pkg.features = rng.sample(std::move(all), n_F);
  std::sort(pkg.features.begin(), pkg.features.end());
  pkg.id = id;
  pkg.lineage_id = lineage_id;
  return pkg;
}

PackageGenotype mutate(const PackageGenotype& pkg, double mu, std::size_t M, Rng& rng,
                       std::size_t id, std::size_t lineage_id) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidInput("mutate: mu must be in [0, 1]");
  const std::size_t n_F = pkg.features.size();
  const auto replaced = static_cast<std::size_t>(std::lround(mu * static_cast<double>(n_F)));
  if (M < n_F || M - n_F < replaced)
    throw InvalidInput("mutate: not enough features outside the package to replace " +
                       std::to_string(replaced));

  std::vector<std::size_t> complement;
  complement.reserve(M - n_F);
  for (std::size_t f = 0; f < M; ++f)
    if (!std::binary_search(pkg.features.begin(), pkg.features.end(), f)) complement.push_back(f);

  auto removed = rng.sample(pkg.features, replaced);
  auto added = rng.sample(std::move(complement), replaced);

  PackageGenotype child;
  for (std::size_t f : pkg.features)
    if (std::find(removed.begin(), removed.end(), f) == removed.end()) child.features.push_back(f);
  child.features.insert(child.features.end(), added.begin(), added.end());
  std::sort(child.features.begin(), child.features.end());
  child.id = id;
  child.lineage_id = lineage_id;
  child.parent_id = pkg.id;
  return child;
}

RoundState init_round(const netgen::Graph& graph, std::array<double, 2> click_probability,
                      Rng& rng) {
  const std::size_t n = graph.n_nodes();
  if (n < 2) throw InvalidInput("init_round: need at least two agents");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  RoundState state;
  state.click_probability = click_probability;
  state.assignment.assign(n, 0);
  for (std::size_t arm = 0; arm < 2; ++arm) {
    state.exposed[arm].assign(n, 0);
    state.clicked[arm].assign(n, 0);
    state.pending[arm].assign(n, 0);
  }
  const std::size_t group_a = (n + 1) / 2;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t agent = order[pos];
    const std::size_t arm = pos < group_a ? kArmA : kArmB;
    state.assignment[agent] = static_cast<std::uint8_t>(arm);
    state.exposed[arm][agent] = 1;
    state.pending[arm][agent] = 1;
    ++state.impressions[arm];
  }
  return state;
}

namespace {

std::array<std::vector<std::size_t>, 2> draw_clicks(RoundState& state, Rng& rng) {
  std::array<std::vector<std::size_t>, 2> clickers;
  const std::size_t n = state.assignment.size();
  for (std::size_t arm = 0; arm < 2; ++arm) {
    for (std::size_t agent = 0; agent < n; ++agent) {
      if (!state.pending[arm][agent]) continue;
      state.pending[arm][agent] = 0;
      if (rng.bernoulli(state.click_probability[arm])) {
        state.clicked[arm][agent] = 1;
        ++state.clicks[arm];
        clickers[arm].push_back(agent);
      }
    }
  }
  return clickers;
}

}  // namespace

std::size_t cascade_step(RoundState& state, const netgen::Graph& graph, double eta, Rng& rng) {
  const auto clickers = draw_clicks(state, rng);
  std::size_t fresh = 0;
  for (std::size_t arm = 0; arm < 2; ++arm) {
    for (std::size_t agent : clickers[arm]) {
      for (std::size_t neighbor : graph.neighbors(agent)) {
        if (state.exposed[arm][neighbor]) continue;
        if (!rng.bernoulli(eta)) continue;
        state.exposed[arm][neighbor] = 1;
        state.pending[arm][neighbor] = 1;
        ++state.impressions[arm];
        ++fresh;
      }
    }
  }
  return fresh;
}

void resolve_pending(RoundState& state, Rng& rng) { draw_clicks(state, rng); }

namespace {

ArmLog arm_log(const PackageGenotype& pkg, const RoundState& state, std::size_t arm) {
  ArmLog log;
  log.genotype = pkg;
  log.impressions = state.impressions[arm];
  log.clicks = state.clicks[arm];
  if (log.impressions > 0)
    log.ctr = static_cast<double>(log.clicks) / static_cast<double>(log.impressions);
  return log;
}

}  // namespace

RoundLog run_round(const netgen::Graph& graph, const DecisionModel& model, const PackagePair& pair,
                   const SimConfig& config, Rng& rng) {
  RoundState state = init_round(
      graph, {click_probability(model, pair.control), click_probability(model, pair.variant)}, rng);
  std::size_t steps = 1;
  while (steps < config.round_length) {
    ++steps;
    if (cascade_step(state, graph, config.infection_rate, rng) == 0) break;
  }
  resolve_pending(state, rng);

  RoundLog log;
  log.arm_a = arm_log(pair.control, state, kArmA);
  log.arm_b = arm_log(pair.variant, state, kArmB);
  log.steps = steps;
  return log;
}

Selection next_pair_pure(const PackagePair& previous, const RoundLog& log, KeepRule rule, double mu,
                         std::size_t M, Rng& rng, GenotypeCounter& ids) {
  bool keep_b;
  if (rule == KeepRule::most_clicked && log.arm_a.clicks != log.arm_b.clicks)
    keep_b = log.arm_b.clicks > log.arm_a.clicks;
  else
    keep_b = rng.uniform_index(2) == 1;

  Selection out;
  out.next.control = keep_b ? previous.variant : previous.control;
  out.next.variant = mutate(out.next.control, mu, M, rng, ids.next_id++, ids.round);
  out.decision = keep_b ? "keep_b" : "keep_a";
  return out;
}

Selection next_pair_ab(const PackagePair& previous, const RoundLog& log, double threshold,
                       double mu, std::size_t M, Rng& rng, GenotypeCounter& ids) {
  const auto stats_a = bayes_ab::ArmStats::from_impressions(
      static_cast<std::int64_t>(log.arm_a.clicks), static_cast<std::int64_t>(log.arm_a.impressions));
  const auto stats_b = bayes_ab::ArmStats::from_impressions(
      static_cast<std::int64_t>(log.arm_b.clicks), static_cast<std::int64_t>(log.arm_b.impressions));
  const auto decision = bayes_ab::decide(stats_a, stats_b, threshold);
  const bool promote = decision.action == bayes_ab::AbAction::promote_variant;

  Selection out;
  out.next.control = promote ? previous.variant : previous.control;
  out.next.variant = mutate(out.next.control, mu, M, rng, ids.next_id++, ids.round);
  out.decision = std::string(bayes_ab::to_string(decision.action));
  return out;
}

std::uint64_t replica_seed(std::uint64_t master_seed, std::size_t replica_index) {
  return derive_seed(master_seed, replica_index);
}

std::vector<std::vector<double>> control_feature_indicator(const std::vector<RoundLog>& logs,
                                                           std::size_t M) {
  std::vector<std::vector<double>> out(logs.size(), std::vector<double>(M, 0.0));
  for (std::size_t r = 0; r < logs.size(); ++r)
    for (std::size_t f : logs[r].arm_a.genotype.features) {
      if (f >= M) throw InvalidInput("control_feature_indicator: feature outside universe");
      out[r][f] = 1.0;
    }
  return out;
}

ReplicaResult run_replica(const SimConfig& config, const DecisionModel& model,
                          std::size_t replica_index) {
  validate(config, model);
  ReplicaResult result;
  result.replica_index = replica_index;
  result.seed = replica_seed(config.master_seed, replica_index);

  const auto graph = netgen::generate({config.topology, config.n_agents, derive_seed(result.seed, 1)});
  Rng rng(derive_seed(result.seed, 2));
  const std::size_t M = config.feature_universe;
  const double mu = config.mutation_rate;

  GenotypeCounter ids{0, 1};
  PackagePair pair;
  pair.control = random_package(M, config.n_features_per_package, rng, ids.next_id++, ids.round);
  pair.variant = mutate(pair.control, mu, M, rng, ids.next_id++, ids.round);

  for (std::size_t round = 1; round <= config.n_rounds(); ++round) {
    RoundLog log = run_round(graph, model, pair, config, rng);
    log.round_index = round;
    ids.round = round + 1;
    Selection sel = config.scenario == Scenario::pure
                        ? next_pair_pure(pair, log, config.pure_keep_rule, mu, M, rng, ids)
                        : next_pair_ab(pair, log, config.ab_threshold, mu, M, rng, ids);
    log.decision = std::move(sel.decision);
    pair = std::move(sel.next);
    result.round_logs.push_back(std::move(log));
  }
  result.final_control = pair.control;
  result.feature_frequency = control_feature_indicator(result.round_logs, M);
  return result;
}

std::vector<ReplicaResult> run_experiment(const SimConfig& config, const DecisionModel& model,
                                          std::size_t threads) {
  validate(config, model);
  std::vector<ReplicaResult> results(config.n_replicas);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, config.n_replicas);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < config.n_replicas; r = next++) {
      try {
        results[r] = run_replica(config, model, r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace clickcascade::sim
