#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clickcascade/analysis.hpp"
#include "clickcascade/io.hpp"

namespace clickcascade::pipeline {

/// Worker cap from CLICKCASCADE_THREADS; 0 (hardware default) when unset.
/// Throws InvalidInput on a value that is not a positive integer.
std::size_t thread_cap_from_env();

struct FitSummary {
  std::size_t degree = 0;
  std::optional<analysis::PolyFit> fit;
  std::string error;  // set when the fit is undefined
};

struct ScenarioSummary {
  std::string label;
  sim::Scenario scenario = sim::Scenario::pure;
  sim::KeepRule keep_rule = sim::KeepRule::random;
  std::size_t n_replicas = 0;
  analysis::FeatureDistribution final_distribution;
  analysis::Interval entropy;
  double gini = 0.0;
  analysis::Series first_ranked;
  std::vector<FitSummary> fits;
  /// R^2 of the cubic fit minus R^2 of the linear fit, when both exist.
  std::optional<double> delta_r2;
};

/// Final distribution, entropy with bootstrap interval, Gini, first-ranked
/// series and its trend fits, using the analysis options of the run.
ScenarioSummary summarize(const io::LoadedResults& loaded, std::string label);

/// JSON comparison report over several scenario summaries.
std::string report_json(const std::vector<ScenarioSummary>& summaries);

/// Entry point of the `clickcascade` tool. `args` excludes the program name.
/// Errors are written to `err` as one JSON object; the return value is the
/// process exit status.
int run_pipeline(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clickcascade::pipeline
