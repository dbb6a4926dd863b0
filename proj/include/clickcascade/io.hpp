#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clickcascade/analysis.hpp"
#include "clickcascade/cascade_sim.hpp"
#include "clickcascade/lasso.hpp"
#include "clickcascade/textfeat.hpp"
#include "clickcascade/topics.hpp"

namespace clickcascade::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- CSV

struct CsvRow {
  std::size_t line = 0;  // 1-based line on which the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line
/// breaks. A UTF-8 byte-order mark is skipped.
std::vector<CsvRow> read_csv(std::istream& in);

std::string csv_escape(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

/// Shortest text that round-trips the double.
std::string format_double(double value);

// ---------------------------------------------------------------- files

std::string read_file(const fs::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const fs::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

// ---------------------------------------------------------------- packages

struct PackageLoad {
  std::vector<textfeat::PackageRecord> records;
  std::vector<std::string> warnings;
};

/// Parses `test_id,headline,lede,impressions,clicks`. Every bad row is
/// collected and reported in one ValidationError with its line number.
PackageLoad parse_packages_csv(std::istream& in);
PackageLoad load_packages_csv(const fs::path& path);

/// `term,weight` with an optional header; a missing weight means 1.0. The
/// lexicon is named after the file stem.
textfeat::Lexicon parse_lexicon_csv(std::istream& in, std::string name);
textfeat::Lexicon load_lexicon(const fs::path& path);
/// Every *.csv in the directory, sorted by file name.
std::vector<textfeat::Lexicon> load_lexicon_dir(const fs::path& dir);

// ---------------------------------------------------------------- feature matrix

/// `package_id,<descriptor names...>,ctr`.
std::string feature_matrix_csv(const textfeat::FeatureMatrix& matrix);
textfeat::FeatureMatrix parse_feature_matrix_csv(std::istream& in);

// ---------------------------------------------------------------- models

struct FittedModel {
  std::vector<std::string> descriptors;
  double w0 = 0.0;
  std::vector<double> weights;
  double lambda = 0.0;
  std::string rule;
  std::optional<lasso::CvReport> cv;
};

std::string fitted_model_json(const FittedModel& model);
FittedModel parse_fitted_model_json(std::string_view text);

std::string lda_model_json(const topics::LdaModel& model);
topics::LdaModel parse_lda_model_json(std::string_view text);

// ---------------------------------------------------------------- experiments

struct ModelSource {
  std::optional<fs::path> path;      // fitted model file
  std::uint64_t synthetic_seed = 0;  // used when no path is given
  sim::Mapping mapping = sim::Mapping::clipped_linear;
  double probability_floor = 0.001;
};

struct AnalysisOptions {
  std::vector<std::size_t> fit_degrees{1, 3};
  std::size_t bootstrap_resamples = 2000;
  std::uint64_t bootstrap_seed = 0;
  double confidence = 0.95;
};

struct ExperimentConfig {
  int schema_version = 1;
  sim::SimConfig simulation;
  ModelSource model;
  AnalysisOptions analysis;
};

inline constexpr int kConfigSchemaVersion = 1;

/// Parses and checks the JSON config. Relative model paths resolve against
/// `base_dir`. Throws ValidationError listing every problem.
ExperimentConfig parse_experiment_config(std::string_view text, const fs::path& base_dir = {});
std::string experiment_config_json(const ExperimentConfig& config);

/// Loads the fitted model or draws the synthetic one.
sim::DecisionModel resolve_model(const ExperimentConfig& config);

/// `replica,round,arm,genotype,impressions,clicks,ctr,decision`.
std::string round_logs_csv(const std::vector<sim::ReplicaResult>& results);

std::string results_json(const ExperimentConfig& config,
                         const std::vector<sim::ReplicaResult>& results);

struct LoadedResults {
  ExperimentConfig config;
  std::vector<sim::ReplicaResult> results;
};
LoadedResults parse_results_json(std::string_view text);

}  // namespace clickcascade::io
