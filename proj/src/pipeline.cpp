#include "clickcascade/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "clickcascade/bayes_ab.hpp"
#include "clickcascade/error.hpp"
#include "clickcascade/lasso.hpp"
#include "clickcascade/topics.hpp"

namespace clickcascade::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

/// An input that could not be opened; reported with its path.
class PathError : public InvalidInput {
 public:
  PathError(fs::path path, const std::string& what)
      : InvalidInput(what + " '" + path.string() + "' not found"), path_(std::move(path)) {}
  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
};

std::string read_input(const fs::path& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw PathError(path, what);
  return io::read_file(path);
}

std::size_t effective_threads() {
  const std::size_t cap = thread_cap_from_env();
  return cap != 0 ? cap : std::max(1u, std::thread::hardware_concurrency());
}

fs::path manifest_path_for(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

struct Manifest {
  Manifest(std::string c, std::vector<std::string> a) : command(std::move(c)), argv(std::move(a)) {}

  std::string command;
  std::vector<std::string> argv;
  json parameters = json::object();
  json seeds = json::object();
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
};

json file_entries(const std::vector<fs::path>& paths) {
  json out = json::array();
  for (const auto& p : paths) out.push_back({{"path", p.string()}, {"sha256", io::sha256_file(p)}});
  return out;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  json j{{"schema_version", 1},
         {"tool_version", kToolVersion},
         {"command", m.command},
         {"argv", m.argv},
         {"working_directory", fs::current_path().string()},
         {"parameters", m.parameters},
         {"seeds", m.seeds},
         {"inputs", file_entries(m.inputs)},
         {"outputs", file_entries(m.outputs)}};
  io::write_file_atomic(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string input;
  std::string lexicons;
  std::string topics;
  std::uint64_t topic_seed = 0;
  std::string output;
};

int run_extract(const ExtractArgs& a, const std::vector<std::string>& argv, std::ostream& out,
                std::ostream& err) {
  Manifest m("extract", argv);
  read_input(a.input, "packages file");
  auto load = io::load_packages_csv(a.input);
  for (const auto& w : load.warnings) err << json{{"warning", w}}.dump() << "\n";
  m.inputs.push_back(a.input);

  std::vector<textfeat::Lexicon> lexicons;
  if (!a.lexicons.empty()) {
    if (!fs::is_directory(a.lexicons)) throw PathError(a.lexicons, "lexicon directory");
    lexicons = io::load_lexicon_dir(a.lexicons);
    for (const auto& entry : fs::directory_iterator(a.lexicons))
      if (entry.path().extension() == ".csv") m.inputs.push_back(entry.path());
    std::sort(m.inputs.begin() + 1, m.inputs.end());
  }

  std::optional<textfeat::ExtraColumns> extra;
  if (!a.topics.empty()) {
    const auto model = io::parse_lda_model_json(read_input(a.topics, "topic model"));
    extra = topics::topic_columns(model, load.records, a.topic_seed);
    m.inputs.push_back(a.topics);
    m.seeds["topic_seed"] = a.topic_seed;
  }

  const auto matrix = textfeat::build_matrix(load.records, lexicons, extra);
  io::write_file_atomic(a.output, io::feature_matrix_csv(matrix));
  m.outputs.push_back(a.output);
  m.parameters = {{"n_rows", matrix.n_rows()}, {"n_features", matrix.n_features()}};
  write_manifest(manifest_path_for(a.output), m);
  out << json{{"rows", matrix.n_rows()}, {"features", matrix.feature_names()}, {"output", a.output}}.dump()
      << "\n";
  return 0;
}

// ---------------------------------------------------------------- topics

struct TopicsArgs {
  std::string input;
  std::size_t k = 0;
  std::optional<double> alpha;
  double beta = 0.01;
  std::size_t iterations = 500;
  std::uint64_t seed = 0;
  std::size_t min_df = 2;
  std::size_t top_terms = 10;
  std::string output;
};

int run_topics(const TopicsArgs& a, const std::vector<std::string>& argv, std::ostream& out,
               std::ostream& err) {
  Manifest m("topics", argv);
  read_input(a.input, "packages file");
  const auto load = io::load_packages_csv(a.input);
  for (const auto& w : load.warnings) err << json{{"warning", w}}.dump() << "\n";
  m.inputs.push_back(a.input);

  topics::CorpusOptions copts;
  copts.min_document_frequency = a.min_df;
  const auto corpus = topics::build_documents(load.records, copts);
  topics::LdaParams params;
  params.n_topics = a.k;
  params.alpha = a.alpha;
  params.beta = a.beta;
  params.iterations = a.iterations;
  params.seed = a.seed;
  const auto model = topics::fit_lda(corpus, params);

  io::write_file_atomic(a.output, io::lda_model_json(model));
  m.outputs.push_back(a.output);
  m.parameters = {{"k", a.k},           {"alpha", model.alpha},           {"beta", a.beta},
                  {"iterations", a.iterations}, {"min_df", a.min_df}};
  m.seeds["lda_seed"] = a.seed;
  write_manifest(manifest_path_for(a.output), m);

  json summary{{"output", a.output},
               {"documents", corpus.documents.size()},
               {"vocabulary", model.vocabulary_size()},
               {"dropped_stories", corpus.dropped_story_ids}};
  json top = json::array();
  for (std::size_t t = 0; t < model.n_topics; ++t) {
    json terms = json::array();
    for (auto v : model.top_terms(t, a.top_terms)) terms.push_back(model.vocabulary[v]);
    top.push_back(std::move(terms));
  }
  summary["top_terms"] = std::move(top);
  out << summary.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string features;
  std::size_t k_folds = 5;
  std::size_t grid_size = 100;
  double grid_ratio = 1e-3;
  std::string rule = "min";
  std::uint64_t seed = 0;
  std::string output;
};

int run_fit(const FitArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest m("fit", argv);
  std::istringstream in(read_input(a.features, "feature matrix"));
  const auto matrix = io::parse_feature_matrix_csv(in);
  m.inputs.push_back(a.features);

  const lasso::SelectionRule rule =
      a.rule == "min" ? lasso::SelectionRule::min : lasso::SelectionRule::one_se;
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(matrix.outcomes.data(), static_cast<Eigen::Index>(matrix.n_rows()));
  const lasso::RegressionProblem problem(matrix.rows, y);
  const auto grid = lasso::lambda_grid(lasso::lambda_max(problem), a.grid_size, a.grid_ratio);
  const auto report = lasso::cross_validate(problem, grid, a.k_folds, a.seed, {}, effective_threads());
  const auto selection = lasso::select_lambda(problem, report, rule);

  io::FittedModel model;
  model.descriptors = matrix.feature_names();
  model.w0 = selection.fit.w0;
  model.weights.assign(selection.fit.weights.data(),
                       selection.fit.weights.data() + selection.fit.weights.size());
  model.lambda = selection.lambda;
  model.rule = a.rule;
  model.cv = report;
  io::write_file_atomic(a.output, io::fitted_model_json(model));
  m.outputs.push_back(a.output);
  m.parameters = {{"k_folds", a.k_folds},
                  {"grid_size", a.grid_size},
                  {"grid_ratio", a.grid_ratio},
                  {"rule", a.rule}};
  m.seeds["cv_seed"] = a.seed;
  write_manifest(manifest_path_for(a.output), m);

  const auto nonzero = std::count_if(model.weights.begin(), model.weights.end(),
                                     [](double w) { return w != 0.0; });
  out << json{{"output", a.output},
              {"lambda", selection.lambda},
              {"grid_index", selection.grid_index},
              {"cv_error", report.cv_errors[selection.grid_index]},
              {"nonzero_weights", nonzero},
              {"excluded_columns", problem.excluded_columns().size()}}
             .dump()
      << "\n";
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::string output_dir;
};

int run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest m("simulate", argv);
  const fs::path config_path(a.config);
  const auto text = read_input(config_path, "config file");
  const auto config = io::parse_experiment_config(text, config_path.parent_path());
  const auto model = io::resolve_model(config);
  sim::validate(config.simulation, model);
  m.inputs.push_back(config_path);
  if (config.model.path) m.inputs.push_back(*config.model.path);

  const fs::path dir(a.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw PathError(dir, "output directory");

  const auto results = sim::run_experiment(config.simulation, model, effective_threads());
  const fs::path rounds = dir / "rounds.csv";
  const fs::path results_file = dir / "results.json";
  io::write_file_atomic(rounds, io::round_logs_csv(results));
  io::write_file_atomic(results_file, io::results_json(config, results));
  m.outputs = {rounds, results_file};
  m.parameters = json::parse(io::experiment_config_json(config));
  m.seeds["master_seed"] = config.simulation.master_seed;
  json replica_seeds = json::array();
  for (const auto& r : results) replica_seeds.push_back(r.seed);
  m.seeds["replica_seeds"] = std::move(replica_seeds);
  if (!config.model.path) m.seeds["synthetic_model_seed"] = config.model.synthetic_seed;
  write_manifest(dir / "manifest.json", m);

  out << json{{"output_dir", dir.string()},
              {"replicas", results.size()},
              {"rounds", config.simulation.n_rounds()},
              {"scenario", sim::to_string(config.simulation.scenario)}}
             .dump()
      << "\n";
  return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::vector<std::string> inputs;
  std::string output;
};

int run_analyze(const AnalyzeArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest m("analyze", argv);
  std::vector<ScenarioSummary> summaries;
  for (const auto& input : a.inputs) {
    const fs::path file = fs::path(input) / "results.json";
    auto loaded = io::parse_results_json(read_input(file, "results file"));
    summaries.push_back(summarize(loaded, input));
    m.inputs.push_back(file);
    m.seeds[input] = {{"bootstrap_seed", loaded.config.analysis.bootstrap_seed},
                      {"master_seed", loaded.config.simulation.master_seed}};
  }
  io::write_file_atomic(a.output, report_json(summaries));
  m.outputs.push_back(a.output);
  write_manifest(manifest_path_for(a.output), m);

  json brief = json::array();
  for (const auto& s : summaries)
    brief.push_back({{"input", s.label},
                     {"scenario", sim::to_string(s.scenario)},
                     {"entropy", s.entropy.estimate},
                     {"entropy_ci", {s.entropy.lower, s.entropy.upper}},
                     {"gini", s.gini}});
  out << json{{"output", a.output}, {"scenarios", brief}}.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------- abtest

struct AbArgs {
  std::int64_t clicks_a = 0, impressions_a = 0, clicks_b = 0, impressions_b = 0;
  double threshold = 0.95;
  double significance = 0.05;
  std::string method = "bayes";
  std::string output;
};

int run_abtest(const AbArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const auto arm_a = bayes_ab::ArmStats::from_impressions(a.clicks_a, a.impressions_a);
  const auto arm_b = bayes_ab::ArmStats::from_impressions(a.clicks_b, a.impressions_b);
  json j{{"method", a.method}};
  auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  j["ctr_a"] = opt(arm_a.ctr());
  j["ctr_b"] = opt(arm_b.ctr());
  if (a.method == "bayes") {
    if (!(a.threshold > 0.0 && a.threshold < 1.0))
      throw InvalidInput("--threshold must be in (0, 1)");
    const auto d = bayes_ab::decide(arm_a, arm_b, a.threshold);
    const auto pa = bayes_ab::posterior_from_counts(arm_a);
    const auto pb = bayes_ab::posterior_from_counts(arm_b);
    j["posterior_a"] = {{"alpha", pa.alpha}, {"beta", pa.beta}};
    j["posterior_b"] = {{"alpha", pb.alpha}, {"beta", pb.beta}};
    j["probability_b_beats_a"] = d.probability_b_beats_a;
    j["threshold"] = d.threshold;
    j["uplift"] = opt(d.uplift);
    j["action"] = bayes_ab::to_string(d.action);
  } else {
    const auto z = bayes_ab::z_test(arm_a, arm_b, a.significance);
    j["z"] = z.z;
    j["p_value"] = z.p_value;
    j["critical"] = z.critical;
    j["significance"] = a.significance;
    j["verdict"] = bayes_ab::to_string(z.verdict);
  }
  const std::string text = j.dump() + "\n";
  if (!a.output.empty()) {
    io::write_file_atomic(a.output, text);
    Manifest m("abtest", argv);
    m.parameters = {{"clicks_a", a.clicks_a},         {"impressions_a", a.impressions_a},
                    {"clicks_b", a.clicks_b},         {"impressions_b", a.impressions_b},
                    {"threshold", a.threshold},       {"significance", a.significance},
                    {"method", a.method}};
    m.outputs.push_back(a.output);
    write_manifest(manifest_path_for(a.output), m);
  }
  out << text;
  return 0;
}

// ---------------------------------------------------------------- replay

int run_replay(const std::string& manifest_file, std::ostream& out, std::ostream& err) {
  json m;
  try {
    m = json::parse(read_input(manifest_file, "manifest"));
  } catch (const json::exception& e) {
    throw InvalidInput("manifest '" + manifest_file + "': " + e.what());
  }
  std::vector<std::string> argv;
  fs::path workdir;
  json inputs, outputs;
  try {
    argv = m.at("argv").get<std::vector<std::string>>();
    workdir = m.at("working_directory").get<std::string>();
    inputs = m.at("inputs");
    outputs = m.at("outputs");
  } catch (const json::exception& e) {
    throw InvalidInput("manifest '" + manifest_file + "': " + e.what());
  }
  if (!argv.empty() && argv.front() == "replay") throw InvalidInput("cannot replay a replay");

  const fs::path previous = fs::current_path();
  fs::current_path(workdir);
  json report{{"manifest", manifest_file}, {"inputs_changed", json::array()}};
  int status = 0;
  try {
    for (const auto& in : inputs) {
      const fs::path p = in.at("path").get<std::string>();
      if (!fs::exists(p) || io::sha256_file(p) != in.at("sha256").get<std::string>())
        report["inputs_changed"].push_back(p.string());
    }
    std::ostringstream sink;
    status = run_pipeline(argv, sink, err);
    json checked = json::array();
    bool all_match = status == 0;
    for (const auto& o : outputs) {
      const fs::path p = o.at("path").get<std::string>();
      const std::string now = fs::exists(p) ? io::sha256_file(p) : "";
      const bool match = now == o.at("sha256").get<std::string>();
      all_match = all_match && match;
      checked.push_back({{"path", p.string()}, {"sha256", now}, {"matches", match}});
    }
    report["outputs"] = std::move(checked);
    report["reproduced"] = all_match;
    if (!all_match && status == 0) status = 3;
  } catch (...) {
    fs::current_path(previous);
    throw;
  }
  fs::current_path(previous);
  out << report.dump() << "\n";
  return status;
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message,
                const std::vector<std::string>& problems = {},
                const std::optional<fs::path>& path = std::nullopt) {
  json e{{"kind", kind}, {"message", message}};
  if (!problems.empty()) e["problems"] = problems;
  if (path) e["path"] = path->string();
  err << json{{"error", e}}.dump() << "\n";
}

json fit_json(const FitSummary& f) {
  json j{{"degree", f.degree}};
  if (f.fit) {
    j["coefficients"] = f.fit->coefficients;
    j["r_squared"] = f.fit->r_squared;
  } else {
    j["error"] = f.error;
  }
  return j;
}

}  // namespace

std::size_t thread_cap_from_env() {
  const char* raw = std::getenv("CLICKCASCADE_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  const std::string_view text(raw);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0)
    throw InvalidInput("CLICKCASCADE_THREADS must be a positive integer, got '" + std::string(text) + "'");
  return value;
}

ScenarioSummary summarize(const io::LoadedResults& loaded, std::string label) {
  const auto& cfg = loaded.config;
  const std::size_t M = cfg.simulation.feature_universe;
  ScenarioSummary s;
  s.label = std::move(label);
  s.scenario = cfg.simulation.scenario;
  s.keep_rule = cfg.simulation.pure_keep_rule;
  s.n_replicas = loaded.results.size();
  s.final_distribution = analysis::final_feature_distribution(loaded.results, M);

  std::vector<std::vector<std::size_t>> finals;
  finals.reserve(loaded.results.size());
  for (const auto& r : loaded.results) finals.push_back(r.final_control.features);
  s.entropy = analysis::bootstrap_entropy(finals, M, cfg.analysis.bootstrap_resamples,
                                          cfg.analysis.bootstrap_seed, cfg.analysis.confidence);
  s.gini = analysis::gini(s.final_distribution);
  s.first_ranked = analysis::first_ranked_series(analysis::feature_frequency_series(loaded.results, M));

  std::optional<double> r2_linear, r2_cubic;
  for (std::size_t degree : cfg.analysis.fit_degrees) {
    FitSummary f;
    f.degree = degree;
    try {
      f.fit = analysis::polyfit_r2(s.first_ranked, degree);
      if (degree == 1) r2_linear = f.fit->r_squared;
      if (degree == 3) r2_cubic = f.fit->r_squared;
    } catch (const InvalidInput& e) {
      f.error = e.what();
    }
    s.fits.push_back(std::move(f));
  }
  if (r2_linear && r2_cubic) s.delta_r2 = *r2_cubic - *r2_linear;
  return s;
}

std::string report_json(const std::vector<ScenarioSummary>& summaries) {
  json scenarios = json::array();
  for (const auto& s : summaries) {
    json fits = json::array();
    for (const auto& f : s.fits) fits.push_back(fit_json(f));
    scenarios.push_back({{"input", s.label},
                         {"scenario", sim::to_string(s.scenario)},
                         {"pure_keep_rule", sim::to_string(s.keep_rule)},
                         {"n_replicas", s.n_replicas},
                         {"final_distribution", s.final_distribution.values},
                         {"entropy",
                          {{"estimate", s.entropy.estimate},
                           {"bootstrap_mean", s.entropy.mean},
                           {"lower", s.entropy.lower},
                           {"upper", s.entropy.upper}}},
                         {"gini", s.gini},
                         {"first_ranked_series", s.first_ranked},
                         {"fits", fits},
                         {"delta_r2", s.delta_r2 ? json(*s.delta_r2) : json(nullptr)}});
  }
  json comparisons = json::array();
  for (std::size_t i = 0; i < summaries.size(); ++i)
    for (std::size_t j = i + 1; j < summaries.size(); ++j) {
      const auto& a = summaries[i];
      const auto& b = summaries[j];
      const bool overlap = a.entropy.lower <= b.entropy.upper && b.entropy.lower <= a.entropy.upper;
      json c{{"a", a.label},
             {"b", b.label},
             {"entropy_difference", a.entropy.estimate - b.entropy.estimate},
             {"entropy_intervals_overlap", overlap},
             {"lower_entropy", a.entropy.estimate < b.entropy.estimate ? a.label : b.label},
             {"gini_difference", a.gini - b.gini}};
      c["delta_r2_difference"] =
          a.delta_r2 && b.delta_r2 ? json(*a.delta_r2 - *b.delta_r2) : json(nullptr);
      comparisons.push_back(std::move(c));
    }
  return json{{"schema_version", 1}, {"scenarios", scenarios}, {"comparisons", comparisons}}.dump(2) +
         "\n";
}

int run_pipeline(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Headline feature extraction, click models and A/B cascade simulation"};
  app.name("clickcascade");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Packages CSV to feature matrix");
  extract->add_option("--input", ex.input, "Packages CSV")->required();
  extract->add_option("--lexicons", ex.lexicons, "Directory of term,weight CSV lexicons");
  extract->add_option("--topics", ex.topics, "Fitted topic model JSON");
  extract->add_option("--topic-seed", ex.topic_seed, "Seed for topic inference");
  extract->add_option("--output", ex.output, "Feature matrix CSV")->required();

  TopicsArgs tp;
  auto* topics_cmd = app.add_subcommand("topics", "Fit an LDA topic model on story texts");
  topics_cmd->add_option("--input", tp.input, "Packages CSV")->required();
  topics_cmd->add_option("--k", tp.k, "Number of topics")->required()->check(CLI::PositiveNumber);
  topics_cmd->add_option("--alpha", tp.alpha, "Document-topic prior (default 50/k)");
  topics_cmd->add_option("--beta", tp.beta, "Topic-word prior");
  topics_cmd->add_option("--iterations", tp.iterations, "Gibbs sweeps");
  topics_cmd->add_option("--seed", tp.seed, "Sampler seed");
  topics_cmd->add_option("--min-df", tp.min_df, "Minimum document frequency of a term");
  topics_cmd->add_option("--top-terms", tp.top_terms, "Terms listed per topic");
  topics_cmd->add_option("--output", tp.output, "Model JSON")->required();

  FitArgs ft;
  auto* fit_cmd = app.add_subcommand("fit", "LASSO decision model with cross-validated lambda");
  fit_cmd->add_option("--features", ft.features, "Feature matrix CSV")->required();
  fit_cmd->add_option("--k-folds", ft.k_folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  fit_cmd->add_option("--grid-size", ft.grid_size, "Lambda grid points")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--grid-ratio", ft.grid_ratio, "Smallest over largest lambda");
  fit_cmd->add_option("--rule", ft.rule, "Lambda selection rule")
      ->check(CLI::IsMember({"min", "one_se"}));
  fit_cmd->add_option("--seed", ft.seed, "Fold assignment seed");
  fit_cmd->add_option("--output", ft.output, "Model JSON")->required();

  SimulateArgs sm;
  auto* simulate = app.add_subcommand("simulate", "Run the cascade experiment from a config");
  simulate->add_option("--config", sm.config, "Experiment config JSON")->required();
  simulate->add_option("--output-dir", sm.output_dir, "Output directory")->required();

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Compare simulated scenarios");
  analyze->add_option("--inputs", an.inputs, "Simulation output directories")->required();
  analyze->add_option("--output", an.output, "Report JSON")->required();

  AbArgs ab;
  auto* abtest = app.add_subcommand("abtest", "One-shot A/B test calculator");
  abtest->add_option("--clicks-a", ab.clicks_a)->required();
  abtest->add_option("--impressions-a", ab.impressions_a)->required();
  abtest->add_option("--clicks-b", ab.clicks_b)->required();
  abtest->add_option("--impressions-b", ab.impressions_b)->required();
  abtest->add_option("--threshold", ab.threshold, "Promotion threshold on P(B > A)");
  abtest->add_option("--significance", ab.significance, "z-test significance level");
  abtest->add_option("--method", ab.method)->check(CLI::IsMember({"bayes", "ztest"}));
  abtest->add_option("--output", ab.output, "Also write the result JSON here");

  std::string manifest;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest and compare outputs");
  replay->add_option("--manifest", manifest, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (*extract) return run_extract(ex, args, out, err);
    if (*topics_cmd) return run_topics(tp, args, out, err);
    if (*fit_cmd) return run_fit(ft, args, out);
    if (*simulate) return run_simulate(sm, args, out);
    if (*analyze) return run_analyze(an, args, out);
    if (*abtest) return run_abtest(ab, args, out);
    if (*replay) return run_replay(manifest, out, err);
  } catch (const PathError& e) {
    emit_error(err, "missing_path", e.what(), {}, e.path());
  } catch (const ValidationError& e) {
    emit_error(err, "validation", e.what(), e.problems());
  } catch (const InvalidInput& e) {
    emit_error(err, "invalid_input", e.what());
  } catch (const fs::filesystem_error& e) {
    emit_error(err, "io", e.what(), {}, e.path1());
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what());
  }
  return 1;
}

}  // namespace clickcascade::pipeline
