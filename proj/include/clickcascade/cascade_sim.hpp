#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clickcascade/netgen.hpp"
#include "clickcascade/rng.hpp"

namespace clickcascade::sim {

enum class Mapping { clipped_linear, logistic };

/// Linear click model: score = w0 + sum of the weights of present features,
/// mapped to a probability in [floor, 1 - floor].
struct DecisionModel {
  double w0 = 0.0;
  std::vector<double> weights;
  double probability_floor = 0.001;
  Mapping mapping = Mapping::clipped_linear;
};

/// Model with weights drawn once from a seeded standard normal and scaled so
/// that scores of `n_features_per_package` features mostly fall in [0, 1]:
/// w0 = 0.5 and w_i ~ N(0, (0.25 / sqrt(n_F))^2), i.e. two standard
/// deviations of a package score span [0, 1].
DecisionModel synthetic_model(std::size_t feature_universe, std::size_t n_features_per_package,
                              std::uint64_t seed);

/// A synthetic headline: a set of distinct feature indices.
struct PackageGenotype {
  std::vector<std::size_t> features;  // sorted
  std::size_t id = 0;
  std::size_t lineage_id = 0;  // round in which the package was created
  std::optional<std::size_t> parent_id;

  /// Sorted indices joined by '+', e.g. "3+17+22".
  std::string serialize() const;
};

/// Parses the '+'-joined form. Throws InvalidInput on malformed text.
std::vector<std::size_t> parse_genotype(std::string_view text);

enum class Scenario { pure, ab_led };
enum class KeepRule { random, most_clicked };

struct SimConfig {
  std::size_t n_agents = 500;
  std::size_t total_steps = 500;
  std::size_t round_length = 5;
  std::size_t n_features_per_package = 7;
  std::size_t feature_universe = 50;
  double mutation_rate = 3.0 / 7.0;
  double infection_rate = 0.5;
  double ab_threshold = 0.95;
  Scenario scenario = Scenario::pure;
  KeepRule pure_keep_rule = KeepRule::random;
  /// Topology and density. n_nodes is taken from n_agents and the seed is
  /// derived per replica, so those two fields are ignored here.
  netgen::Topology topology = netgen::BarabasiAlbert{3};
  std::uint64_t master_seed = 0;
  std::size_t n_replicas = 100;

  std::size_t n_rounds() const noexcept { return total_steps / round_length; }
  /// Features replaced by a mutation: round(mu * n_F).
  std::size_t replaced_features() const noexcept;
};

/// Throws ValidationError listing every violated invariant.
void validate(const SimConfig& config, const DecisionModel& model);

std::string_view to_string(Scenario s);
std::string_view to_string(KeepRule r);
std::string_view to_string(Mapping m);
Scenario parse_scenario(std::string_view s);
KeepRule parse_keep_rule(std::string_view s);
Mapping parse_mapping(std::string_view s);

/// Probability in [floor, 1 - floor]. Throws InvalidInput on a feature index
/// outside the model.
double click_probability(const DecisionModel& model, const PackageGenotype& pkg);

/// Uniformly random set of n_F distinct features out of M.
PackageGenotype random_package(std::size_t M, std::size_t n_F, Rng& rng, std::size_t id = 0,
                               std::size_t lineage_id = 0);

/// Replaces round(mu * n_F) features, removed uniformly and replaced by
/// features drawn uniformly from outside the original set.
PackageGenotype mutate(const PackageGenotype& pkg, double mu, std::size_t M, Rng& rng,
                       std::size_t id = 0, std::size_t lineage_id = 0);

inline constexpr std::size_t kArmA = 0;
inline constexpr std::size_t kArmB = 1;

/// Exposure bookkeeping for one round. Index 0 is arm A, 1 is arm B.
struct RoundState {
  std::vector<std::uint8_t> assignment;  // arm each agent was initially shown
  std::array<std::vector<std::uint8_t>, 2> exposed;
  std::array<std::vector<std::uint8_t>, 2> clicked;
  std::array<std::vector<std::uint8_t>, 2> pending;  // exposed, click not yet drawn
  std::array<std::uint64_t, 2> impressions{0, 0};
  std::array<std::uint64_t, 2> clicks{0, 0};
  std::array<double, 2> click_probability{0.0, 0.0};
};

/// Splits the agents by a random permutation into two halves (A gets the
/// extra agent when N is odd) and exposes each to its package.
RoundState init_round(const netgen::Graph& graph, std::array<double, 2> click_probability, Rng& rng);

/// One synchronous step: pending exposures draw their click, then every agent
/// that clicked in this step passes the package to each neighbor with
/// probability eta. Returns the number of new exposures.
std::size_t cascade_step(RoundState& state, const netgen::Graph& graph, double eta, Rng& rng);

/// Draws clicks for exposures still pending when a round is cut off.
void resolve_pending(RoundState& state, Rng& rng);

struct ArmLog {
  PackageGenotype genotype;
  std::uint64_t impressions = 0;
  std::uint64_t clicks = 0;
  std::optional<double> ctr;
};

struct RoundLog {
  std::size_t round_index = 0;  // 1-based
  ArmLog arm_a;
  ArmLog arm_b;
  std::string decision;
  std::size_t steps = 0;
};

struct PackagePair {
  PackageGenotype control;
  PackageGenotype variant;
};

/// Runs one round: initial exposure (step 1), then cascade steps until
/// round_length steps have elapsed or a step adds no exposure.
RoundLog run_round(const netgen::Graph& graph, const DecisionModel& model, const PackagePair& pair,
                   const SimConfig& config, Rng& rng);

struct Selection {
  PackagePair next;
  std::string decision;
};

/// Source of fresh package ids and the round number for new lineages.
struct GenotypeCounter {
  std::size_t next_id = 0;
  std::size_t round = 0;
};

/// Pure social spreading: keep one package (coin flip, or the one with more
/// clicks) and pair it with a mutation of itself.
Selection next_pair_pure(const PackagePair& previous, const RoundLog& log, KeepRule rule, double mu,
                         std::size_t M, Rng& rng, GenotypeCounter& ids);

/// A/B-led selection: promote B when P(p_B > p_A) exceeds the threshold,
/// then pair the control with a mutation of itself.
Selection next_pair_ab(const PackagePair& previous, const RoundLog& log, double threshold,
                       double mu, std::size_t M, Rng& rng, GenotypeCounter& ids);

struct ReplicaResult {
  std::size_t replica_index = 0;
  std::uint64_t seed = 0;
  std::vector<RoundLog> round_logs;
  PackageGenotype final_control;
  /// rounds x M indicator: 1 when the round's control carries the feature.
  std::vector<std::vector<double>> feature_frequency;
};

/// Seed of replica r: derive_seed(master_seed, r). The graph uses
/// derive_seed(seed, 1) and the dynamics derive_seed(seed, 2).
std::uint64_t replica_seed(std::uint64_t master_seed, std::size_t replica_index);

ReplicaResult run_replica(const SimConfig& config, const DecisionModel& model,
                          std::size_t replica_index);

/// All replicas in index order. `threads` = 0 uses the hardware concurrency;
/// results never depend on it.
std::vector<ReplicaResult> run_experiment(const SimConfig& config, const DecisionModel& model,
                                          std::size_t threads = 0);

/// rounds x M indicator matrix of the control package per round.
std::vector<std::vector<double>> control_feature_indicator(const std::vector<RoundLog>& logs,
                                                           std::size_t M);

}  // namespace clickcascade::sim
