#include "clickcascade/textfeat.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

#include "clickcascade/error.hpp"

namespace clickcascade::textfeat {

// Defined in the generated stopwords_data.cpp.
extern const char* const kStopwordData;

namespace {

constexpr std::string_view kEmDash = "\xE2\x80\x94";
constexpr std::string_view kLeftQuote = "\xE2\x80\x9C";
constexpr std::string_view kRightQuote = "\xE2\x80\x9D";

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_ascii_punct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':': case '"': case '\'':
      return true;
    default:
      return false;
  }
}

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool is_blank(std::string_view s) { return std::all_of(s.begin(), s.end(), is_space); }

template <std::size_t N>
bool in(std::string_view word, const std::string_view (&list)[N]) {
  return std::find(std::begin(list), std::end(list), word) != std::end(list);
}

constexpr std::string_view kPronouns[] = {
    "i",     "me",     "my",   "mine",   "myself", "you",      "your",       "yours",
    "yourself", "yourselves", "he", "him", "his",   "himself", "she",  "her",
    "hers",  "herself", "it",  "its",    "itself", "we",       "us",         "our",
    "ours",  "ourselves", "they", "them", "their", "theirs",   "themselves"};

constexpr std::string_view kYouForms[] = {"you", "your", "yours", "yourself",
                                                              "yourselves"};

constexpr std::string_view kInterrogatives[] = {
    "who", "what", "when", "where", "why", "how", "is", "are", "do", "does", "can", "should"};

constexpr std::string_view kDemonstratives[] = {"this", "that", "these",
                                                                    "those"};

bool is_all_caps_word(std::string_view token) {
  std::size_t letters = 0;
  for (char c : token) {
    if (std::islower(static_cast<unsigned char>(c))) return false;
    if (is_letter(c)) ++letters;
  }
  return letters >= 2;
}

bool is_integer(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), is_digit);
}

bool is_alphabetic(std::string_view token) {
  if (token.empty() || !is_letter(token.front())) return false;
  return std::all_of(token.begin(), token.end(), [](char c) { return is_letter(c) || c == '-'; });
}

std::vector<std::string> word_tokens(const std::vector<std::string>& tokens) {
  std::vector<std::string> words;
  for (const auto& t : tokens)
    if (!is_punctuation_token(t)) words.push_back(t);
  return words;
}

constexpr std::array<std::string_view, 16> kFormalNames = {
    "n_chars",          "n_words",         "avg_word_len",     "n_sentences",
    "n_exclamation",    "n_question_mark", "n_dots",           "contains_number",
    "contains_pronoun", "contains_you",    "starts_how_to",    "starts_interrogative",
    "contains_quote",   "stopword_ratio",  "forward_reference", "all_caps_word"};

constexpr std::array<HeadlineType, 5> kTypes = {HeadlineType::normal, HeadlineType::question,
                                                HeadlineType::howto, HeadlineType::number,
                                                HeadlineType::reader};

}  // namespace

std::vector<std::string> record_problems(const PackageRecord& record) {
  std::vector<std::string> problems;
  if (is_blank(record.headline)) problems.push_back("empty headline");
  if (record.clicks > record.impressions) problems.push_back("clicks exceed impressions");
  return problems;
}

Lexicon::Lexicon(std::string name, Entries entries)
    : name_(std::move(name)), entries_(std::move(entries)) {
  if (entries_.empty()) throw InvalidInput("lexicon '" + name_ + "' has no entries");
  bool first = true;
  for (const auto& [term, w] : entries_) {
    if (term.empty() || term != to_lower(term))
      throw InvalidInput("lexicon '" + name_ + "': term '" + term + "' is not lowercase");
    max_weight_ = first ? w : std::max(max_weight_, w);
    first = false;
  }
}

std::optional<double> Lexicon::weight(std::string_view term) const {
  auto it = entries_.find(term);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::formal: return "formal";
    case FeatureKind::lexicon: return "lexicon";
    case FeatureKind::topic: return "topic";
  }
  return "formal";
}

std::vector<std::string> FeatureMatrix::feature_names() const {
  std::vector<std::string> names;
  names.reserve(descriptors.size());
  for (const auto& d : descriptors) names.push_back(d.name);
  return names;
}

std::string_view to_string(HeadlineType type) {
  switch (type) {
    case HeadlineType::normal: return "normal";
    case HeadlineType::question: return "question";
    case HeadlineType::howto: return "howto";
    case HeadlineType::number: return "number";
    case HeadlineType::reader: return "reader";
  }
  return "normal";
}

std::span<const HeadlineType> all_headline_types() { return kTypes; }

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> out;
    std::istringstream in(kStopwordData);
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && is_space(line.back())) line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      out.insert(line);
    }
    return out;
  }();
  return words;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_punctuation_token(std::string_view token) {
  return (token.size() == 1 && is_ascii_punct(token.front())) || token == kEmDash;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (is_space(c)) {
      flush();
      ++i;
    } else if (is_ascii_punct(c)) {
      flush();
      tokens.emplace_back(1, c);
      ++i;
    } else if (text.substr(i, kEmDash.size()) == kEmDash) {
      flush();
      tokens.emplace_back(kEmDash);
      i += kEmDash.size();
    } else {
      current.push_back(c);
      ++i;
    }
  }
  flush();
  return tokens;
}

std::span<const std::string_view> formal_feature_names() { return kFormalNames; }

FeatureMap extract_formal(std::string_view headline) {
  if (is_blank(headline)) throw InvalidInput("extract_formal: empty headline");
  const auto tokens = tokenize(headline);
  const auto words = word_tokens(tokens);
  if (words.empty()) throw InvalidInput("extract_formal: headline has no words");

  std::vector<std::string> lower;
  lower.reserve(words.size());
  for (const auto& w : words) lower.push_back(to_lower(w));

  std::size_t chars = 0;
  for (const auto& t : tokens) chars += code_points(t);
  std::size_t word_chars = 0;
  for (const auto& w : words) word_chars += code_points(w);

  std::size_t sentences = 0;
  bool open = false;
  std::size_t exclamations = 0, questions = 0, dots = 0;
  bool quote = false;
  for (const auto& t : tokens) {
    const bool terminator = t == "." || t == "!" || t == "?";
    if (t == "!") ++exclamations;
    if (t == "?") ++questions;
    if (t == ".") ++dots;
    if (t == "\"" || t.find(kLeftQuote) != std::string::npos ||
        t.find(kRightQuote) != std::string::npos)
      quote = true;
    if (terminator) {
      if (open) ++sentences;
      open = false;
    } else if (!is_punctuation_token(t)) {
      open = true;
    }
  }
  if (open) ++sentences;

  const auto& stop = stopwords();
  std::size_t stop_count = 0;
  bool number = false, pronoun = false, you = false, demonstrative = false, caps = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (stop.count(lower[i])) ++stop_count;
    if (std::any_of(words[i].begin(), words[i].end(), is_digit)) number = true;
    if (in(lower[i], kPronouns)) pronoun = true;
    if (in(lower[i], kYouForms)) you = true;
    if (in(lower[i], kDemonstratives)) demonstrative = true;
    if (is_all_caps_word(words[i])) caps = true;
  }
  const bool how_to = lower.size() >= 2 && lower[0] == "how" && lower[1] == "to";

  auto flag = [](bool b) { return b ? 1.0 : 0.0; };
  const double n_words = static_cast<double>(words.size());
  return FeatureMap{
      {"n_chars", static_cast<double>(chars)},
      {"n_words", n_words},
      {"avg_word_len", static_cast<double>(word_chars) / n_words},
      {"n_sentences", static_cast<double>(sentences)},
      {"n_exclamation", static_cast<double>(exclamations)},
      {"n_question_mark", static_cast<double>(questions)},
      {"n_dots", static_cast<double>(dots)},
      {"contains_number", flag(number)},
      {"contains_pronoun", flag(pronoun)},
      {"contains_you", flag(you)},
      {"starts_how_to", flag(how_to)},
      {"starts_interrogative", flag(in(lower.front(), kInterrogatives))},
      {"contains_quote", flag(quote)},
      {"stopword_ratio", static_cast<double>(stop_count) / n_words},
      {"forward_reference", flag(demonstrative)},
      {"all_caps_word", flag(caps)},
  };
}

HeadlineType classify_headline_type(std::string_view headline) {
  if (is_blank(headline)) throw InvalidInput("classify_headline_type: empty headline");
  const auto tokens = tokenize(headline);
  std::vector<std::string> lower_words;
  for (const auto& t : tokens)
    if (!is_punctuation_token(t)) lower_words.push_back(to_lower(t));

  if (lower_words.size() >= 2 && lower_words[0] == "how" && lower_words[1] == "to")
    return HeadlineType::howto;
  if (is_integer(tokens.front())) return HeadlineType::number;
  if (tokens.back() == "?" || in(to_lower(tokens.front()), kInterrogatives))
    return HeadlineType::question;
  if (std::any_of(lower_words.begin(), lower_words.end(),
                  [](const std::string& w) { return w == "you" || w == "your"; }))
    return HeadlineType::reader;
  return HeadlineType::normal;
}

double score_lexicon(std::span<const std::string> tokens, const Lexicon& lexicon) {
  std::size_t alphabetic = 0;
  double total = 0.0;
  for (const auto& t : tokens) {
    if (!is_alphabetic(t)) continue;
    ++alphabetic;
    if (auto w = lexicon.weight(to_lower(t))) total += *w;
  }
  return alphabetic == 0 ? 0.0 : total / static_cast<double>(alphabetic);
}

FeatureMatrix build_matrix(std::span<const PackageRecord> records,
                           std::span<const Lexicon> lexicons,
                           const std::optional<ExtraColumns>& extra) {
  std::vector<std::string> problems;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    std::vector<std::string> issues = record_problems(r);
    if (r.impressions == 0) issues.insert(issues.begin(), "zero impressions");
    for (const auto& issue : issues)
      problems.push_back("row " + std::to_string(k + 1) + " (test_id " + r.test_id + "): " + issue);
  }
  if (extra) {
    if (extra->values.size() != records.size())
      problems.push_back("extra columns have " + std::to_string(extra->values.size()) +
                         " rows, expected " + std::to_string(records.size()));
    for (std::size_t k = 0; k < extra->values.size(); ++k)
      if (extra->values[k].size() != extra->names.size())
        problems.push_back("extra column row " + std::to_string(k + 1) + " has wrong width");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  FeatureMatrix m;
  auto add = [&](std::string name, FeatureKind kind) {
    m.descriptors.push_back({m.descriptors.size(), std::move(name), kind});
  };
  for (auto name : kFormalNames) add(std::string(name), FeatureKind::formal);
  for (const auto& lex : lexicons) add("lex_" + lex.name(), FeatureKind::lexicon);
  for (auto type : kTypes) add("type_" + std::string(to_string(type)), FeatureKind::formal);
  if (extra)
    for (const auto& name : extra->names) add(name, extra->kind);

  m.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(records.size()),
                                 static_cast<Eigen::Index>(m.descriptors.size()));
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    const auto row = static_cast<Eigen::Index>(k);
    Eigen::Index col = 0;
    const auto formal = extract_formal(r.headline);
    for (auto name : kFormalNames) m.rows(row, col++) = formal.at(std::string(name));
    const auto tokens = tokenize(r.headline);
    for (const auto& lex : lexicons) m.rows(row, col++) = score_lexicon(tokens, lex);
    const auto type = classify_headline_type(r.headline);
    for (auto t : kTypes) m.rows(row, col++) = t == type ? 1.0 : 0.0;
    if (extra)
      for (double v : extra->values[k]) m.rows(row, col++) = v;
    m.outcomes.push_back(static_cast<double>(r.clicks) / static_cast<double>(r.impressions));
    m.row_ids.push_back(r.test_id);
  }
  return m;
}

}  // namespace clickcascade::textfeat
