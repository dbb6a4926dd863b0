#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

namespace clickcascade::textfeat {

/// One tested presentation of a story, as recorded by the A/B archive.
struct PackageRecord {
  std::string test_id;
  std::string headline;
  std::optional<std::string> lede;
  std::uint64_t impressions = 0;
  std::uint64_t clicks = 0;
};

/// Problems with a record's own invariants (empty headline, clicks above
/// impressions). Empty when the record is well formed.
std::vector<std::string> record_problems(const PackageRecord& record);

/// A weighted word list. Terms are lowercase and unique.
class Lexicon {
 public:
  using Entries = std::map<std::string, double, std::less<>>;

  /// Throws InvalidInput when `entries` is empty or a term is not lowercase.
  Lexicon(std::string name, Entries entries);

  const std::string& name() const noexcept { return name_; }
  const Entries& entries() const noexcept { return entries_; }
  std::optional<double> weight(std::string_view term) const;
  double max_weight() const noexcept { return max_weight_; }

 private:
  std::string name_;
  Entries entries_;
  double max_weight_ = 0.0;
};

enum class FeatureKind { formal, lexicon, topic };

std::string_view to_string(FeatureKind kind);

struct FeatureDescriptor {
  std::size_t index = 0;
  std::string name;
  FeatureKind kind = FeatureKind::formal;
};

/// Headline-by-feature matrix. A zero entry encodes feature absence.
struct FeatureMatrix {
  std::vector<FeatureDescriptor> descriptors;
  Eigen::MatrixXd rows;              // K x M
  std::vector<double> outcomes;      // click-through rate per row
  std::vector<std::string> row_ids;

  std::size_t n_rows() const noexcept { return outcomes.size(); }
  std::size_t n_features() const noexcept { return descriptors.size(); }
  std::vector<std::string> feature_names() const;
};

/// Additional named columns aligned with the record list (topic proportions).
struct ExtraColumns {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // one vector per record
  FeatureKind kind = FeatureKind::topic;
};

enum class HeadlineType { normal, question, howto, number, reader };

std::string_view to_string(HeadlineType type);

/// All five headline types in column order.
std::span<const HeadlineType> all_headline_types();

using FeatureMap = std::map<std::string, double>;

/// Built-in English stopword list (data/stopwords_en.txt).
const std::unordered_set<std::string>& stopwords();

/// Whitespace tokenizer that splits the punctuation characters
/// . , ! ? ; : " ' and the em dash into single-character tokens.
std::vector<std::string> tokenize(std::string_view text);

/// True for tokens produced from the punctuation set above.
bool is_punctuation_token(std::string_view token);

/// ASCII lowercase copy.
std::string to_lower(std::string_view text);

/// Names of the formal features in column order.
std::span<const std::string_view> formal_feature_names();

/// Formal clickbait features of a headline. Throws InvalidInput on a blank
/// headline or one with no word tokens.
FeatureMap extract_formal(std::string_view headline);

/// Throws InvalidInput on a blank headline.
HeadlineType classify_headline_type(std::string_view headline);

/// Mean lexicon weight over alphabetic tokens; 0 when there are none.
double score_lexicon(std::span<const std::string> tokens, const Lexicon& lexicon);

/// Builds the headline-feature matrix: formal features, one column per
/// lexicon, five headline-type indicators, then any extra columns. Records
/// with zero impressions or clicks above impressions are reported together in
/// a single ValidationError.
FeatureMatrix build_matrix(std::span<const PackageRecord> records,
                           std::span<const Lexicon> lexicons,
                           const std::optional<ExtraColumns>& extra = std::nullopt);

}  // namespace clickcascade::textfeat
