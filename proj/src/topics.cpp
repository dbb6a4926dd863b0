#include "clickcascade/topics.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_set>

#include "clickcascade/error.hpp"
#include "clickcascade/rng.hpp"

namespace clickcascade::topics {

namespace {

constexpr std::size_t kInferenceSweeps = 20;
constexpr std::size_t kMinStemLength = 3;

std::size_t draw_topic(Rng& rng, std::vector<double>& weights) {
  double total = 0.0;
  for (double& w : weights) {
    total += w;
    w = total;
  }
  const double u = rng.uniform() * total;
  auto it = std::upper_bound(weights.begin(), weights.end(), u);
  if (it == weights.end()) --it;
  return static_cast<std::size_t>(it - weights.begin());
}

}  // namespace

std::size_t Vocabulary::add(const std::string& term) {
  auto [it, inserted] = index_.emplace(term, terms_.size());
  if (inserted) terms_.push_back(term);
  return it->second;
}

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string stem(std::string_view word) {
  for (std::string_view suffix : {"ing", "ed", "ly", "s"}) {
    if (word.size() >= suffix.size() + kMinStemLength &&
        word.substr(word.size() - suffix.size()) == suffix)
      return std::string(word.substr(0, word.size() - suffix.size()));
  }
  return std::string(word);
}

std::vector<std::string> preprocess(std::string_view text) {
  const auto& stop = textfeat::stopwords();
  std::vector<std::string> out;
  for (const auto& token : textfeat::tokenize(text)) {
    if (textfeat::is_punctuation_token(token)) continue;
    std::string word;
    for (char c : textfeat::to_lower(token))
      if (!std::ispunct(static_cast<unsigned char>(c))) word.push_back(c);
    if (word.empty() || stop.count(word)) continue;
    out.push_back(stem(word));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> story_texts(
    std::span<const PackageRecord> records) {
  struct Story {
    std::vector<std::string> ledes;
    std::vector<std::string> headlines;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Story> stories;
  for (const auto& r : records) {
    auto [it, inserted] = stories.try_emplace(r.test_id);
    if (inserted) order.push_back(r.test_id);
    auto add_unique = [](std::vector<std::string>& list, const std::string& s) {
      if (std::find(list.begin(), list.end(), s) == list.end()) list.push_back(s);
    };
    if (r.lede && !r.lede->empty()) add_unique(it->second.ledes, *r.lede);
    add_unique(it->second.headlines, r.headline);
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& id : order) {
    std::string text;
    for (const auto& part : stories[id].ledes) text += part + "\n";
    for (const auto& part : stories[id].headlines) text += part + "\n";
    out.emplace_back(id, std::move(text));
  }
  return out;
}

Corpus build_documents(std::span<const PackageRecord> records, const CorpusOptions& options) {
  if (records.empty()) throw InvalidInput("build_documents: no records");

  std::vector<std::pair<std::string, std::vector<std::string>>> raw;
  std::unordered_map<std::string, std::size_t> doc_frequency;
  for (auto& [id, text] : story_texts(records)) {
    auto terms = preprocess(text);
    std::unordered_set<std::string> seen(terms.begin(), terms.end());
    for (const auto& t : seen) ++doc_frequency[t];
    raw.emplace_back(id, std::move(terms));
  }

  Corpus corpus;
  for (auto& [id, terms] : raw) {
    Document doc{id, {}};
    for (const auto& t : terms)
      if (doc_frequency[t] >= options.min_document_frequency)
        doc.terms.push_back(corpus.vocabulary.add(t));
    if (doc.terms.empty())
      corpus.dropped_story_ids.push_back(id);
    else
      corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

std::vector<std::size_t> LdaModel::top_terms(std::size_t topic, std::size_t count) const {
  const auto& row = topic_word_counts.at(topic);
  std::vector<std::size_t> idx(row.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
  idx.resize(std::min(count, idx.size()));
  return idx;
}

LdaModel fit_lda(const Corpus& corpus, const LdaParams& params, const SweepObserver& observer) {
  if (params.n_topics == 0) throw InvalidInput("fit_lda: n_topics must be at least 1");
  if (params.iterations == 0) throw InvalidInput("fit_lda: iterations must be at least 1");
  if (corpus.documents.empty() || corpus.vocabulary.size() == 0)
    throw InvalidInput("fit_lda: empty corpus");

  const std::size_t K = params.n_topics;
  const std::size_t V = corpus.vocabulary.size();
  LdaModel model;
  model.n_topics = K;
  model.alpha = params.alpha.value_or(50.0 / static_cast<double>(K));
  model.beta = params.beta;
  if (!(model.alpha > 0.0) || !(model.beta > 0.0))
    throw InvalidInput("fit_lda: alpha and beta must be positive");
  model.vocabulary = corpus.vocabulary.terms();
  model.topic_word_counts.assign(K, std::vector<std::int64_t>(V, 0));
  model.topic_totals.assign(K, 0);

  Rng rng(params.seed);
  const auto& docs = corpus.documents;
  std::vector<std::vector<std::size_t>> assignment(docs.size());
  std::vector<std::vector<std::int64_t>> doc_topic(docs.size(), std::vector<std::int64_t>(K, 0));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::size_t w : docs[d].terms) {
      if (w >= V) throw InvalidInput("fit_lda: term index outside vocabulary");
      const std::size_t k = rng.uniform_index(K);
      assignment[d].push_back(k);
      ++doc_topic[d][k];
      ++model.topic_word_counts[k][w];
      ++model.topic_totals[k];
    }
  }

  const double v_beta = static_cast<double>(V) * model.beta;
  std::vector<double> weights(K);
  for (std::size_t sweep = 1; sweep <= params.iterations; ++sweep) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t n = 0; n < docs[d].terms.size(); ++n) {
        const std::size_t w = docs[d].terms[n];
        std::size_t k = assignment[d][n];
        --doc_topic[d][k];
        --model.topic_word_counts[k][w];
        --model.topic_totals[k];
        for (std::size_t t = 0; t < K; ++t)
          weights[t] = (static_cast<double>(doc_topic[d][t]) + model.alpha) *
                       (static_cast<double>(model.topic_word_counts[t][w]) + model.beta) /
                       (static_cast<double>(model.topic_totals[t]) + v_beta);
        k = draw_topic(rng, weights);
        assignment[d][n] = k;
        ++doc_topic[d][k];
        ++model.topic_word_counts[k][w];
        ++model.topic_totals[k];
      }
    }
    if (observer) observer(sweep, model);
  }
  return model;
}

Document to_document(const LdaModel& model, std::string story_id,
                     std::span<const std::string> terms) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t v = 0; v < model.vocabulary.size(); ++v) index.emplace(model.vocabulary[v], v);
  Document doc{std::move(story_id), {}};
  for (const auto& t : terms)
    if (auto it = index.find(t); it != index.end()) doc.terms.push_back(it->second);
  return doc;
}

std::vector<double> doc_topic_distribution(const LdaModel& model, const Document& doc,
                                           std::uint64_t seed) {
  const std::size_t K = model.n_topics;
  const std::size_t V = model.vocabulary_size();
  if (K == 0) throw InvalidInput("doc_topic_distribution: model not fitted");

  std::vector<std::size_t> terms;
  for (std::size_t w : doc.terms)
    if (w < V) terms.push_back(w);
  if (terms.empty()) return std::vector<double>(K, 1.0 / static_cast<double>(K));

  Rng rng(seed);
  std::vector<std::size_t> assignment(terms.size());
  std::vector<std::int64_t> counts(K, 0);
  for (std::size_t n = 0; n < terms.size(); ++n) {
    assignment[n] = rng.uniform_index(K);
    ++counts[assignment[n]];
  }
  const double v_beta = static_cast<double>(V) * model.beta;
  std::vector<double> weights(K);
  for (std::size_t sweep = 0; sweep < kInferenceSweeps; ++sweep) {
    for (std::size_t n = 0; n < terms.size(); ++n) {
      --counts[assignment[n]];
      for (std::size_t t = 0; t < K; ++t)
        weights[t] = (static_cast<double>(counts[t]) + model.alpha) *
                     (static_cast<double>(model.topic_word_counts[t][terms[n]]) + model.beta) /
                     (static_cast<double>(model.topic_totals[t]) + v_beta);
      assignment[n] = draw_topic(rng, weights);
      ++counts[assignment[n]];
    }
  }
  const double denom = static_cast<double>(terms.size()) + static_cast<double>(K) * model.alpha;
  std::vector<double> theta(K);
  for (std::size_t t = 0; t < K; ++t) theta[t] = (static_cast<double>(counts[t]) + model.alpha) / denom;
  return theta;
}

textfeat::ExtraColumns topic_columns(const LdaModel& model, std::span<const PackageRecord> records,
                                     std::uint64_t seed) {
  textfeat::ExtraColumns columns;
  for (std::size_t k = 0; k < model.n_topics; ++k) columns.names.push_back("topic_" + std::to_string(k));

  std::unordered_map<std::string, std::vector<double>> by_story;
  std::uint64_t story_index = 0;
  for (const auto& [id, text] : story_texts(records)) {
    const auto terms = preprocess(text);
    const auto doc = to_document(model, id, terms);
    by_story.emplace(id, doc_topic_distribution(model, doc, derive_seed(seed, story_index++)));
  }
  for (const auto& r : records) columns.values.push_back(by_story.at(r.test_id));
  return columns;
}

}  // namespace clickcascade::topics
