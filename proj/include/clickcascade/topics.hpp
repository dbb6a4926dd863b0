#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clickcascade/textfeat.hpp"

namespace clickcascade::topics {

using textfeat::PackageRecord;

/// Bidirectional term <-> index map.
class Vocabulary {
 public:
  std::size_t add(const std::string& term);
  std::optional<std::size_t> find(std::string_view term) const;
  const std::string& term(std::size_t index) const { return terms_.at(index); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// A story: its lede plus every distinct headline, as vocabulary indices.
struct Document {
  std::string story_id;
  std::vector<std::size_t> terms;
};

struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;
  /// Stories whose text was empty after preprocessing and pruning.
  std::vector<std::string> dropped_story_ids;
};

struct CorpusOptions {
  /// Terms appearing in fewer documents are dropped from the vocabulary.
  std::size_t min_document_frequency = 2;
};

/// Suffix-stripping stemmer: removes the first of "ing", "ed", "ly", "s"
/// that leaves a stem of at least three characters.
std::string stem(std::string_view word);

/// Lowercase, drop punctuation and stopwords, stem.
std::vector<std::string> preprocess(std::string_view text);

/// Concatenated story text for each test_id, in order of first appearance.
std::vector<std::pair<std::string, std::string>> story_texts(std::span<const PackageRecord> records);

/// Groups records by test_id into story documents. Throws InvalidInput on an
/// empty record list.
Corpus build_documents(std::span<const PackageRecord> records, const CorpusOptions& options = {});

struct LdaParams {
  std::size_t n_topics = 0;
  std::optional<double> alpha;  // defaults to 50 / n_topics
  double beta = 0.01;
  std::size_t iterations = 500;
  std::uint64_t seed = 0;
};

struct LdaModel {
  std::size_t n_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<std::string> vocabulary;
  std::vector<std::vector<std::int64_t>> topic_word_counts;  // K x V
  std::vector<std::int64_t> topic_totals;

  std::size_t vocabulary_size() const noexcept { return vocabulary.size(); }
  /// Most frequent vocabulary indices of a topic, ties broken by index.
  std::vector<std::size_t> top_terms(std::size_t topic, std::size_t count) const;
};

/// Called after each Gibbs sweep with the 1-based sweep number.
using SweepObserver = std::function<void(std::size_t sweep, const LdaModel& state)>;

/// Collapsed Gibbs sampler. Deterministic in (corpus, params).
LdaModel fit_lda(const Corpus& corpus, const LdaParams& params, const SweepObserver& observer = {});

/// Maps already-preprocessed terms onto the model vocabulary, skipping
/// unknown terms.
Document to_document(const LdaModel& model, std::string story_id,
                     std::span<const std::string> terms);

/// Posterior-mean topic proportions of a document under frozen model counts,
/// from 20 Gibbs inference sweeps. Falls back to the uniform vector when no
/// term is in the vocabulary.
std::vector<double> doc_topic_distribution(const LdaModel& model, const Document& doc,
                                           std::uint64_t seed = 0);

/// Topic proportions of each record's story as K feature columns named
/// topic_0 .. topic_{K-1}.
textfeat::ExtraColumns topic_columns(const LdaModel& model, std::span<const PackageRecord> records,
                                     std::uint64_t seed = 0);

}  // namespace clickcascade::topics
