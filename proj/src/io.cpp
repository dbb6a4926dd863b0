#include "clickcascade/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <type_traits>

#include <json.hpp>
#include <openssl/evp.h>

#include "clickcascade/error.hpp"

namespace clickcascade::io {

using nlohmann::json;

// ---------------------------------------------------------------- CSV

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.rfind("\xEF\xBB\xBF", 0) == 0) data.erase(0, 3);

  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  bool in_quotes = false;
  bool row_started = false;
  row.line = 1;

  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    // A blank line yields one empty field; skip it.
    if (!(row.fields.size() == 1 && row.fields[0].empty())) rows.push_back(std::move(row));
    row = CsvRow{};
    row_started = false;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (!row_started) {
      row.line = line;
      row_started = true;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw InvalidInput("csv: unterminated quoted field starting on line " +
                                    std::to_string(row.line));
  if (row_started) end_row();
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += '\n';
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw InvalidInput("format_double: conversion failed");
  return std::string(buf, ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<std::uint64_t> parse_count(std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_real(std::string_view text) {
  const std::string t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::string line_prefix(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

// ---------------------------------------------------------------- files

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidInput("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

// ---------------------------------------------------------------- packages

PackageLoad parse_packages_csv(std::istream& in) {
  const auto rows = read_csv(in);
  PackageLoad out;
  if (rows.empty()) throw ValidationError({"packages csv: missing header"});
  const std::vector<std::string> expected{"test_id", "headline", "lede", "impressions", "clicks"};
  std::vector<std::string> header;
  for (const auto& f : rows.front().fields) header.push_back(trim(f));
  if (header != expected)
    throw ValidationError({"line 1: malformed header, expected "
                           "'test_id,headline,lede,impressions,clicks'"});

  std::vector<std::string> problems;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string at = line_prefix(row.line);
    if (row.fields.size() != expected.size()) {
      problems.push_back(at + "expected 5 fields, found " + std::to_string(row.fields.size()));
      continue;
    }
    textfeat::PackageRecord rec;
    rec.test_id = trim(row.fields[0]);
    rec.headline = row.fields[1];
    if (!trim(row.fields[2]).empty()) rec.lede = row.fields[2];
    const auto impressions = parse_count(row.fields[3]);
    const auto clicks = parse_count(row.fields[4]);
    bool ok = true;
    if (!impressions) {
      problems.push_back(at + "unparseable impressions '" + row.fields[3] + "'");
      ok = false;
    }
    if (!clicks) {
      problems.push_back(at + "unparseable clicks '" + row.fields[4] + "'");
      ok = false;
    }
    if (rec.test_id.empty()) {
      problems.push_back(at + "empty test_id");
      ok = false;
    }
    if (!ok) continue;
    rec.impressions = *impressions;
    rec.clicks = *clicks;
    auto issues = textfeat::record_problems(rec);
    for (const auto& issue : issues) {
      std::string detail = issue;
      if (issue == "clicks exceed impressions")
        detail += " (clicks=" + std::to_string(rec.clicks) +
                  ", impressions=" + std::to_string(rec.impressions) + ")";
      problems.push_back(at + detail);
    }
    if (issues.empty()) out.records.push_back(std::move(rec));
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  if (out.records.empty()) out.warnings.push_back("packages csv has a header but no rows");
  return out;
}

PackageLoad load_packages_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open packages file '" + path.string() + "'");
  try {
    return parse_packages_csv(in);
  } catch (const ValidationError& e) {
    std::vector<std::string> problems;
    for (const auto& p : e.problems()) problems.push_back(path.string() + ": " + p);
    throw ValidationError(std::move(problems));
  }
}

textfeat::Lexicon parse_lexicon_csv(std::istream& in, std::string name) {
  const auto rows = read_csv(in);
  textfeat::Lexicon::Entries entries;
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string term = textfeat::to_lower(trim(row.fields[0]));
    if (i == 0 && term == "term") continue;
    const std::string at = line_prefix(row.line);
    if (term.empty() || row.fields.size() > 2) {
      problems.push_back(at + "expected 'term,weight'");
      continue;
    }
    double weight = 1.0;
    if (row.fields.size() == 2 && !trim(row.fields[1]).empty()) {
      auto w = parse_real(row.fields[1]);
      if (!w) {
        problems.push_back(at + "unparseable weight '" + row.fields[1] + "'");
        continue;
      }
      weight = *w;
    }
    if (!entries.emplace(term, weight).second) problems.push_back(at + "duplicate term '" + term + "'");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return textfeat::Lexicon(std::move(name), std::move(entries));
}

textfeat::Lexicon load_lexicon(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open lexicon '" + path.string() + "'");
  return parse_lexicon_csv(in, path.stem().string());
}

std::vector<textfeat::Lexicon> load_lexicon_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InvalidInput("lexicon directory '" + dir.string() + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<textfeat::Lexicon> out;
  for (const auto& f : files) out.push_back(load_lexicon(f));
  return out;
}

// ---------------------------------------------------------------- feature matrix

std::string feature_matrix_csv(const textfeat::FeatureMatrix& matrix) {
  std::vector<std::string> header{"package_id"};
  for (const auto& d : matrix.descriptors) header.push_back(d.name);
  header.push_back("ctr");
  std::string out = csv_line(header);
  for (std::size_t k = 0; k < matrix.n_rows(); ++k) {
    std::vector<std::string> fields{matrix.row_ids[k]};
    for (Eigen::Index j = 0; j < matrix.rows.cols(); ++j)
      fields.push_back(format_double(matrix.rows(static_cast<Eigen::Index>(k), j)));
    fields.push_back(format_double(matrix.outcomes[k]));
    out += csv_line(fields);
  }
  return out;
}

textfeat::FeatureMatrix parse_feature_matrix_csv(std::istream& in) {
  const auto rows = read_csv(in);
  if (rows.empty()) throw ValidationError({"feature matrix csv: missing header"});
  const auto& header = rows.front().fields;
  if (header.size() < 3 || trim(header.front()) != "package_id" || trim(header.back()) != "ctr")
    throw ValidationError({"line 1: header must start with package_id and end with ctr"});

  textfeat::FeatureMatrix m;
  for (std::size_t j = 1; j + 1 < header.size(); ++j) {
    const std::string name = trim(header[j]);
    auto kind = textfeat::FeatureKind::formal;
    if (name.rfind("lex_", 0) == 0) kind = textfeat::FeatureKind::lexicon;
    if (name.rfind("topic_", 0) == 0) kind = textfeat::FeatureKind::topic;
    m.descriptors.push_back({j - 1, name, kind});
  }
  const std::size_t width = header.size();
  m.rows.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(width - 2));
  std::vector<std::string> problems;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::string at = line_prefix(row.line);
    if (row.fields.size() != width) {
      problems.push_back(at + "expected " + std::to_string(width) + " fields");
      continue;
    }
    for (std::size_t j = 1; j + 1 < width; ++j) {
      auto v = parse_real(row.fields[j]);
      if (!v) problems.push_back(at + "unparseable value in column '" + header[j] + "'");
      m.rows(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) = v.value_or(0.0);
    }
    auto y = parse_real(row.fields.back());
    if (!y || *y < 0.0 || *y > 1.0) problems.push_back(at + "ctr must be a number in [0, 1]");
    m.outcomes.push_back(y.value_or(0.0));
    m.row_ids.push_back(row.fields.front());
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return m;
}

// ---------------------------------------------------------------- models

namespace {

json cv_json(const lasso::CvReport& cv) {
  return json{{"k_folds", cv.k_folds},
              {"seed", cv.seed},
              {"lambda_grid", cv.lambda_grid},
              {"cv_errors", cv.cv_errors},
              {"fold_errors", cv.fold_errors}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string(what) + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace

std::string fitted_model_json(const FittedModel& model) {
  json j{{"schema_version", 1},
         {"descriptors", model.descriptors},
         {"w0", model.w0},
         {"weights", model.weights},
         {"lambda", model.lambda},
         {"rule", model.rule}};
  if (model.cv) j["cv"] = cv_json(*model.cv);
  return j.dump(2) + "\n";
}

FittedModel parse_fitted_model_json(std::string_view text) {
  const json j = parse_json(text, "fitted model");
  try {
    FittedModel m;
    m.descriptors = j.at("descriptors").get<std::vector<std::string>>();
    m.w0 = j.at("w0").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.lambda = get_or<double>(j, "lambda", 0.0);
    m.rule = get_or<std::string>(j, "rule", "");
    if (m.weights.size() != m.descriptors.size())
      throw InvalidInput("fitted model: weights and descriptors differ in length");
    if (j.contains("cv")) {
      const auto& c = j.at("cv");
      lasso::CvReport cv;
      cv.k_folds = c.at("k_folds").get<std::size_t>();
      cv.seed = c.at("seed").get<std::uint64_t>();
      cv.lambda_grid = c.at("lambda_grid").get<std::vector<double>>();
      cv.cv_errors = c.at("cv_errors").get<std::vector<double>>();
      cv.fold_errors = get_or<std::vector<std::vector<double>>>(c, "fold_errors", {});
      m.cv = std::move(cv);
    }
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("fitted model: ") + e.what());
  }
}

std::string lda_model_json(const topics::LdaModel& model) {
  json j{{"schema_version", 1},
         {"n_topics", model.n_topics},
         {"alpha", model.alpha},
         {"beta", model.beta},
         {"vocabulary", model.vocabulary},
         {"topic_word_counts", model.topic_word_counts},
         {"topic_totals", model.topic_totals}};
  return j.dump() + "\n";
}

topics::LdaModel parse_lda_model_json(std::string_view text) {
  const json j = parse_json(text, "lda model");
  try {
    topics::LdaModel m;
    m.n_topics = j.at("n_topics").get<std::size_t>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    m.topic_word_counts = j.at("topic_word_counts").get<std::vector<std::vector<std::int64_t>>>();
    m.topic_totals = j.at("topic_totals").get<std::vector<std::int64_t>>();
    if (m.topic_word_counts.size() != m.n_topics || m.topic_totals.size() != m.n_topics)
      throw InvalidInput("lda model: count matrices do not match n_topics");
    for (std::size_t k = 0; k < m.n_topics; ++k) {
      if (m.topic_word_counts[k].size() != m.vocabulary.size())
        throw InvalidInput("lda model: count row does not match vocabulary size");
      std::int64_t total = 0;
      for (auto c : m.topic_word_counts[k]) total += c;
      if (total != m.topic_totals[k]) throw InvalidInput("lda model: topic totals are inconsistent");
    }
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("lda model: ") + e.what());
  }
}

// ---------------------------------------------------------------- experiments

namespace {

json topology_json(const netgen::Topology& topology) {
  return std::visit(
      [](const auto& t) -> json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, netgen::ErdosRenyi>)
          return {{"topology", "erdos_renyi"}, {"p", t.p}};
        else if constexpr (std::is_same_v<T, netgen::BarabasiAlbert>)
          return {{"topology", "barabasi_albert"}, {"m", t.m}};
        else
          return {{"topology", "sbm"}, {"block_sizes", t.block_sizes}, {"block_matrix", t.block_matrix}};
      },
      topology);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where,
                std::vector<std::string>& problems) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      problems.push_back(where + ": unknown key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const fs::path& base_dir) {
  const json j = parse_json(text, "experiment config");
  if (!j.is_object()) throw ValidationError({"experiment config: expected a JSON object"});
  std::vector<std::string> problems;
  ExperimentConfig cfg;
  check_keys(j, {"schema_version", "simulation", "graph", "decision_model", "analysis"}, "config",
             problems);

  auto field = [&](const json& obj, const char* section, const char* key, auto& target) {
    if (!obj.contains(key)) return;
    // The JSON library wraps negative numbers read into unsigned targets.
    auto non_negative = [](const json& v) {
      return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    };
    using T = std::decay_t<decltype(target)>;
    bool ok = true;
    if constexpr (std::is_unsigned_v<T>) {
      ok = non_negative(obj.at(key));
    } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
      const auto& v = obj.at(key);
      ok = v.is_array() && std::all_of(v.begin(), v.end(), non_negative);
    }
    if (!ok) {
      problems.push_back(std::string(section) + "." + key + ": expected non-negative integers");
      return;
    }
    try {
      obj.at(key).get_to(target);
    } catch (const json::exception&) {
      problems.push_back(std::string(section) + "." + key + ": wrong type");
    }
  };

  if (!j.contains("schema_version")) {
    problems.push_back("config: missing schema_version");
  } else {
    field(j, "config", "schema_version", cfg.schema_version);
    if (cfg.schema_version != kConfigSchemaVersion)
      problems.push_back("config: unsupported schema_version " + std::to_string(cfg.schema_version));
  }

  auto& s = cfg.simulation;
  if (j.contains("simulation")) {
    const auto& sj = j.at("simulation");
    check_keys(sj,
               {"n_agents", "total_steps", "round_length", "n_features_per_package",
                "feature_universe", "mutation_rate", "infection_rate", "ab_threshold", "scenario",
                "pure_keep_rule", "master_seed", "n_replicas"},
               "simulation", problems);
    field(sj, "simulation", "n_agents", s.n_agents);
    field(sj, "simulation", "total_steps", s.total_steps);
    field(sj, "simulation", "round_length", s.round_length);
    field(sj, "simulation", "n_features_per_package", s.n_features_per_package);
    field(sj, "simulation", "feature_universe", s.feature_universe);
    field(sj, "simulation", "mutation_rate", s.mutation_rate);
    field(sj, "simulation", "infection_rate", s.infection_rate);
    field(sj, "simulation", "ab_threshold", s.ab_threshold);
    field(sj, "simulation", "master_seed", s.master_seed);
    field(sj, "simulation", "n_replicas", s.n_replicas);
    std::string scenario(sim::to_string(s.scenario)), keep(sim::to_string(s.pure_keep_rule));
    field(sj, "simulation", "scenario", scenario);
    field(sj, "simulation", "pure_keep_rule", keep);
    try {
      s.scenario = sim::parse_scenario(scenario);
    } catch (const InvalidInput& e) {
      problems.push_back(std::string("simulation.scenario: ") + e.what());
    }
    try {
      s.pure_keep_rule = sim::parse_keep_rule(keep);
    } catch (const InvalidInput& e) {
      problems.push_back(std::string("simulation.pure_keep_rule: ") + e.what());
    }
  }

  if (j.contains("graph")) {
    const auto& gj = j.at("graph");
    const std::string topo = gj.value("topology", "");
    if (topo == "erdos_renyi") {
      check_keys(gj, {"topology", "p"}, "graph", problems);
      netgen::ErdosRenyi er;
      field(gj, "graph", "p", er.p);
      s.topology = er;
    } else if (topo == "barabasi_albert") {
      check_keys(gj, {"topology", "m"}, "graph", problems);
      netgen::BarabasiAlbert ba;
      field(gj, "graph", "m", ba.m);
      s.topology = ba;
    } else if (topo == "sbm") {
      check_keys(gj, {"topology", "block_sizes", "block_matrix"}, "graph", problems);
      netgen::StochasticBlock sb;
      field(gj, "graph", "block_sizes", sb.block_sizes);
      field(gj, "graph", "block_matrix", sb.block_matrix);
      s.topology = sb;
    } else {
      problems.push_back("graph.topology: expected erdos_renyi, barabasi_albert or sbm");
    }
  }

  if (j.contains("decision_model")) {
    const auto& mj = j.at("decision_model");
    check_keys(mj, {"path", "synthetic_seed", "mapping", "probability_floor"}, "decision_model",
               problems);
    if (mj.contains("path")) {
      std::string p;
      field(mj, "decision_model", "path", p);
      fs::path path(p);
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      if (!fs::exists(path)) problems.push_back("decision_model.path: '" + path.string() + "' does not exist");
      cfg.model.path = path;
    }
    field(mj, "decision_model", "synthetic_seed", cfg.model.synthetic_seed);
    field(mj, "decision_model", "probability_floor", cfg.model.probability_floor);
    std::string mapping(sim::to_string(cfg.model.mapping));
    field(mj, "decision_model", "mapping", mapping);
    try {
      cfg.model.mapping = sim::parse_mapping(mapping);
    } catch (const InvalidInput& e) {
      problems.push_back(std::string("decision_model.mapping: ") + e.what());
    }
  }

  if (j.contains("analysis")) {
    const auto& aj = j.at("analysis");
    check_keys(aj, {"fit_degrees", "bootstrap_resamples", "bootstrap_seed", "confidence"},
               "analysis", problems);
    field(aj, "analysis", "fit_degrees", cfg.analysis.fit_degrees);
    field(aj, "analysis", "bootstrap_resamples", cfg.analysis.bootstrap_resamples);
    field(aj, "analysis", "bootstrap_seed", cfg.analysis.bootstrap_seed);
    field(aj, "analysis", "confidence", cfg.analysis.confidence);
  }

  if (!problems.empty()) throw ValidationError(std::move(problems));
  return cfg;
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
  const auto& s = cfg.simulation;
  json model{{"mapping", sim::to_string(cfg.model.mapping)},
             {"probability_floor", cfg.model.probability_floor}};
  if (cfg.model.path)
    model["path"] = cfg.model.path->string();
  else
    model["synthetic_seed"] = cfg.model.synthetic_seed;
  json j{{"schema_version", cfg.schema_version},
         {"simulation",
          {{"n_agents", s.n_agents},
           {"total_steps", s.total_steps},
           {"round_length", s.round_length},
           {"n_features_per_package", s.n_features_per_package},
           {"feature_universe", s.feature_universe},
           {"mutation_rate", s.mutation_rate},
           {"infection_rate", s.infection_rate},
           {"ab_threshold", s.ab_threshold},
           {"scenario", sim::to_string(s.scenario)},
           {"pure_keep_rule", sim::to_string(s.pure_keep_rule)},
           {"master_seed", s.master_seed},
           {"n_replicas", s.n_replicas}}},
         {"graph", topology_json(s.topology)},
         {"decision_model", model},
         {"analysis",
          {{"fit_degrees", cfg.analysis.fit_degrees},
           {"bootstrap_resamples", cfg.analysis.bootstrap_resamples},
           {"bootstrap_seed", cfg.analysis.bootstrap_seed},
           {"confidence", cfg.analysis.confidence}}}};
  return j.dump(2) + "\n";
}

sim::DecisionModel resolve_model(const ExperimentConfig& cfg) {
  sim::DecisionModel model;
  if (cfg.model.path) {
    const auto fitted = parse_fitted_model_json(read_file(*cfg.model.path));
    model.w0 = fitted.w0;
    model.weights = fitted.weights;
  } else {
    model = sim::synthetic_model(cfg.simulation.feature_universe,
                                 cfg.simulation.n_features_per_package, cfg.model.synthetic_seed);
  }
  model.mapping = cfg.model.mapping;
  model.probability_floor = cfg.model.probability_floor;
  return model;
}

std::string round_logs_csv(const std::vector<sim::ReplicaResult>& results) {
  std::string out =
      csv_line({"replica", "round", "arm", "genotype", "impressions", "clicks", "ctr", "decision"});
  for (const auto& r : results) {
    for (const auto& log : r.round_logs) {
      for (const auto* arm : {&log.arm_a, &log.arm_b}) {
        out += csv_line({std::to_string(r.replica_index), std::to_string(log.round_index),
                         arm == &log.arm_a ? "A" : "B", arm->genotype.serialize(),
                         std::to_string(arm->impressions), std::to_string(arm->clicks),
                         arm->ctr ? format_double(*arm->ctr) : "", log.decision});
      }
    }
  }
  return out;
}

namespace {

json genotype_json(const sim::PackageGenotype& g) {
  json j{{"features", g.serialize()}, {"id", g.id}, {"lineage_id", g.lineage_id}};
  j["parent_id"] = g.parent_id ? json(*g.parent_id) : json(nullptr);
  return j;
}

sim::PackageGenotype genotype_from_json(const json& j) {
  sim::PackageGenotype g;
  g.features = sim::parse_genotype(j.at("features").get<std::string>());
  g.id = j.at("id").get<std::size_t>();
  g.lineage_id = j.at("lineage_id").get<std::size_t>();
  if (!j.at("parent_id").is_null()) g.parent_id = j.at("parent_id").get<std::size_t>();
  return g;
}

json arm_json(const sim::ArmLog& arm) {
  json j{{"genotype", genotype_json(arm.genotype)},
         {"impressions", arm.impressions},
         {"clicks", arm.clicks}};
  j["ctr"] = arm.ctr ? json(*arm.ctr) : json(nullptr);
  return j;
}

sim::ArmLog arm_from_json(const json& j) {
  sim::ArmLog arm;
  arm.genotype = genotype_from_json(j.at("genotype"));
  arm.impressions = j.at("impressions").get<std::uint64_t>();
  arm.clicks = j.at("clicks").get<std::uint64_t>();
  if (!j.at("ctr").is_null()) arm.ctr = j.at("ctr").get<double>();
  return arm;
}

}  // namespace

std::string results_json(const ExperimentConfig& config,
                         const std::vector<sim::ReplicaResult>& results) {
  json replicas = json::array();
  for (const auto& r : results) {
    json rounds = json::array();
    for (const auto& log : r.round_logs)
      rounds.push_back({{"round", log.round_index},
                        {"steps", log.steps},
                        {"decision", log.decision},
                        {"arm_a", arm_json(log.arm_a)},
                        {"arm_b", arm_json(log.arm_b)}});
    replicas.push_back({{"replica_index", r.replica_index},
                        {"seed", r.seed},
                        {"final_control", genotype_json(r.final_control)},
                        {"rounds", std::move(rounds)}});
  }
  json j{{"schema_version", 1},
         {"config", json::parse(experiment_config_json(config))},
         {"replicas", std::move(replicas)}};
  return j.dump() + "\n";
}

LoadedResults parse_results_json(std::string_view text) {
  const json j = parse_json(text, "results");
  LoadedResults out;
  try {
    out.config = parse_experiment_config(j.at("config").dump());
  } catch (const ValidationError&) {
    // Model paths may no longer exist where the results are analyzed; keep
    // the rest of the configuration.
    json cfg = j.at("config");
    cfg["decision_model"].erase("path");
    out.config = parse_experiment_config(cfg.dump());
  }
  try {
    const std::size_t M = out.config.simulation.feature_universe;
    for (const auto& rj : j.at("replicas")) {
      sim::ReplicaResult r;
      r.replica_index = rj.at("replica_index").get<std::size_t>();
      r.seed = rj.at("seed").get<std::uint64_t>();
      r.final_control = genotype_from_json(rj.at("final_control"));
      for (const auto& lj : rj.at("rounds")) {
        sim::RoundLog log;
        log.round_index = lj.at("round").get<std::size_t>();
        log.steps = lj.at("steps").get<std::size_t>();
        log.decision = lj.at("decision").get<std::string>();
        log.arm_a = arm_from_json(lj.at("arm_a"));
        log.arm_b = arm_from_json(lj.at("arm_b"));
        r.round_logs.push_back(std::move(log));
      }
      r.feature_frequency = sim::control_feature_indicator(r.round_logs, M);
      out.results.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("results: ") + e.what());
  }
  return out;
}

}  // namespace clickcascade::io
