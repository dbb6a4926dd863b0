#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "clickcascade/textfeat.hpp"
#include "clickcascade/topics.hpp"

namespace fixtures {

inline std::filesystem::path source_dir() { return CLICKCASCADE_SOURCE_DIR; }
inline std::filesystem::path test_data_dir() { return source_dir() / "tests" / "data"; }

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  std::filesystem::path dir = std::filesystem::path(CLICKCASCADE_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Ordinary least squares with an intercept by Gaussian elimination with
/// partial pivoting on the normal equations. Returns (w0, w).
inline std::pair<double, std::vector<double>> ols_normal_equations(const Eigen::MatrixXd& x,
                                                                   const Eigen::VectorXd& y) {
  const auto k = static_cast<std::size_t>(x.rows());
  const std::size_t p = static_cast<std::size_t>(x.cols()) + 1;
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t r = 0; r < k; ++r) {
    std::vector<double> row(p);
    row[0] = 1.0;
    for (std::size_t j = 1; j < p; ++j) row[j] = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j - 1));
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) a[i][j] += row[i] * row[j];
      a[i][p] += row[i] * y(static_cast<Eigen::Index>(r));
    }
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    std::swap(a[c], a[pivot]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= p; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<double> beta(p);
  for (std::size_t i = 0; i < p; ++i) beta[i] = a[i][p] / a[i][i];
  return {beta[0], std::vector<double>(beta.begin() + 1, beta.end())};
}

struct RandomProblem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

/// Dense Gaussian design with a sparse-ish true signal plus noise.
inline RandomProblem random_problem(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RandomProblem p{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
  for (Eigen::Index r = 0; r < p.x.rows(); ++r)
    for (Eigen::Index c = 0; c < p.x.cols(); ++c) p.x(r, c) = normal(gen) * (1.0 + 0.5 * c);
  Eigen::VectorXd truth(cols);
  for (Eigen::Index c = 0; c < truth.size(); ++c) truth(c) = c % 3 == 0 ? normal(gen) : 0.0;
  p.y = (p.x * truth).array() + 0.3 + 0.5 * Eigen::ArrayXd::NullaryExpr(rows, [&] { return normal(gen); });
  return p;
}

/// Two stories families with disjoint made-up vocabularies, ten stories each.
inline std::vector<clickcascade::textfeat::PackageRecord> disjoint_corpus(std::uint64_t seed) {
  std::vector<std::string> vocab_a, vocab_b;
  for (char c = 'a'; c <= 't'; ++c) {
    vocab_a.push_back(std::string("alp") + c + "k");
    vocab_b.push_back(std::string("zet") + c + "m");
  }
  std::mt19937_64 gen(seed);
  std::vector<clickcascade::textfeat::PackageRecord> records;
  for (int story = 0; story < 20; ++story) {
    const auto& vocab = story < 10 ? vocab_a : vocab_b;
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::string lede;
    for (int w = 0; w < 30; ++w) lede += vocab[pick(gen)] + " ";
    std::string headline;
    for (int w = 0; w < 6; ++w) headline += vocab[pick(gen)] + " ";
    records.push_back({"story" + std::to_string(story), headline, lede, 100, 10});
  }
  return records;
}

/// Share of a topic's top-10 terms that come from its majority vocabulary,
/// minimized over topics.
inline double topic_purity(const clickcascade::topics::LdaModel& model) {
  double worst = 1.0;
  for (std::size_t t = 0; t < model.n_topics; ++t) {
    const auto top = model.top_terms(t, 10);
    std::size_t from_a = 0;
    for (auto v : top) from_a += model.vocabulary[v].rfind("alp", 0) == 0 ? 1 : 0;
    const std::size_t majority = std::max(from_a, top.size() - from_a);
    worst = std::min(worst, static_cast<double>(majority) / static_cast<double>(top.size()));
  }
  return worst;
}

}  // namespace fixtures
