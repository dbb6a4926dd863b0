#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "clickcascade/error.hpp"
#include "clickcascade/io.hpp"
#include "clickcascade/textfeat.hpp"
#include "fixtures.hpp"

using namespace clickcascade;
using namespace clickcascade::textfeat;

using Tokens = std::vector<std::string>;

TEST_CASE("tokenize splits punctuation into single tokens") {
  CHECK(tokenize("He Said WHOA!") == Tokens{"He", "Said", "WHOA", "!"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("9 things... wow") == Tokens{"9", "things", ".", ".", ".", "wow"});
  CHECK(tokenize("a\xE2\x80\x94" "b") == Tokens{"a", "\xE2\x80\x94", "b"});
  CHECK(tokenize("don't") == Tokens{"don", "'", "t"});
}

TEST_CASE("extract_formal on the forward-reference example") {
  const auto f = extract_formal("She Did Not Expect THIS");
  CHECK(f.at("contains_pronoun") == 1.0);
  CHECK(f.at("forward_reference") == 1.0);
  CHECK(f.at("all_caps_word") == 1.0);
  CHECK(f.at("n_words") == 5.0);
}

TEST_CASE("extract_formal small examples") {
  const auto how = extract_formal("How To Fix It?");
  CHECK(how.at("starts_how_to") == 1.0);
  CHECK(how.at("n_question_mark") == 1.0);
  CHECK(how.at("contains_pronoun") == 1.0);

  const auto word = extract_formal("Word");
  CHECK(word.at("n_words") == 1.0);
  CHECK(word.at("stopword_ratio") == 0.0);
  for (auto name : {"contains_number", "contains_pronoun", "contains_you", "starts_how_to",
                    "starts_interrogative", "contains_quote", "forward_reference", "all_caps_word"})
    CHECK(word.at(name) == 0.0);
}

TEST_CASE("extract_formal rejects blank headlines") {
  CHECK_THROWS_AS(extract_formal(""), InvalidInput);
  CHECK_THROWS_AS(extract_formal("   "), InvalidInput);
  CHECK_THROWS_AS(extract_formal("?!"), InvalidInput);
}

TEST_CASE("golden headlines match exactly") {
  std::ifstream in(fixtures::test_data_dir() / "golden_headlines.json");
  REQUIRE(in);
  const auto cases = nlohmann::json::parse(in);
  REQUIRE(cases.size() == 25);
  for (const auto& c : cases) {
    const std::string headline = c.at("headline");
    CAPTURE(headline);
    const auto got = extract_formal(headline);
    const auto& want = c.at("features");
    CHECK(got.size() == want.size());
    for (const auto& [name, value] : want.items()) {
      CAPTURE(name);
      CHECK(got.at(name) == value.get<double>());
    }
    CHECK(to_string(classify_headline_type(headline)) == c.at("type").get<std::string>());
  }
}

TEST_CASE("headline type precedence") {
  CHECK(classify_headline_type("How To Win") == HeadlineType::howto);
  CHECK(classify_headline_type("27 Photos You Must See") == HeadlineType::number);
  CHECK(classify_headline_type("The Cat Sat") == HeadlineType::normal);
  CHECK(classify_headline_type("Why Now") == HeadlineType::question);
  CHECK(classify_headline_type("It Works?") == HeadlineType::question);
  CHECK(classify_headline_type("This Is For You") == HeadlineType::reader);
  CHECK(classify_headline_type("You're Next") == HeadlineType::reader);
  CHECK(classify_headline_type("How to Ask Why?") == HeadlineType::howto);
  CHECK_THROWS_AS(classify_headline_type(" "), InvalidInput);
}

TEST_CASE("lexicon scoring") {
  const Lexicon lex("pos", {{"good", 1.0}, {"great", 1.0}, {"awful", 0.5}});
  const Tokens all{"Good", "great"};
  CHECK(score_lexicon(all, lex) == 1.0);
  const Tokens none{"cat", "dog"};
  CHECK(score_lexicon(none, lex) == 0.0);
  const Tokens half{"good", "cat", "great", "dog", "!"};
  CHECK(score_lexicon(half, lex) == 0.5);
  CHECK(score_lexicon(Tokens{}, lex) == 0.0);
  CHECK(score_lexicon(Tokens{"!", "?"}, lex) == 0.0);
  CHECK(score_lexicon(Tokens{"awful", "2024"}, lex) == 0.5);
}

TEST_CASE("lexicon invariants") {
  CHECK_THROWS_AS(Lexicon("empty", {}), InvalidInput);
  CHECK_THROWS_AS(Lexicon("upper", {{"Good", 1.0}}), InvalidInput);
}

TEST_CASE("build_matrix outcome, shape and order") {
  const auto lexicons = io::load_lexicon_dir(fixtures::source_dir() / "data" / "lexicons");
  REQUIRE(lexicons.size() == 3);
  const std::vector<PackageRecord> records{{"t1", "Median Story Here", std::nullopt, 14342, 201},
                                           {"t2", "You Will Not Believe This", std::nullopt, 100, 7}};
  const auto m = build_matrix(records, lexicons);
  CHECK(m.rows.rows() == 2);
  CHECK(m.rows.cols() == 24);
  CHECK(m.outcomes.size() == 2);
  CHECK(m.outcomes[0] == doctest::Approx(0.014015).epsilon(1e-4));
  CHECK(m.row_ids == std::vector<std::string>{"t1", "t2"});
  for (std::size_t i = 0; i < m.descriptors.size(); ++i) CHECK(m.descriptors[i].index == i);
  CHECK(m.descriptors[16].name == "lex_arousal");
  CHECK(m.descriptors[19].name == "type_normal");
  CHECK(m.rows(1, 23) == 1.0);  // type_reader
}

TEST_CASE("build_matrix reports every bad record") {
  const std::vector<PackageRecord> records{{"ok", "Fine", std::nullopt, 10, 1},
                                           {"z", "Zero", std::nullopt, 0, 0},
                                           {"c", "Clicks", std::nullopt, 5, 10}};
  try {
    build_matrix(records, {});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    REQUIRE(e.problems().size() == 2);
    CHECK(e.problems()[0].find("zero impressions") != std::string::npos);
    CHECK(e.problems()[0].find("row 2") != std::string::npos);
    CHECK(e.problems()[1].find("clicks exceed impressions") != std::string::npos);
  }
}

TEST_CASE("extra columns are appended with their kind") {
  const std::vector<PackageRecord> records{{"a", "One", std::nullopt, 10, 1},
                                           {"b", "Two", std::nullopt, 10, 2}};
  ExtraColumns extra{{"topic_0", "topic_1"}, {{0.25, 0.75}, {0.5, 0.5}}, FeatureKind::topic};
  const auto m = build_matrix(records, {}, extra);
  CHECK(m.n_features() == 23);
  CHECK(m.descriptors.back().kind == FeatureKind::topic);
  CHECK(m.rows(0, 22) == 0.75);
}

TEST_CASE("property: formal features are well formed on random headlines") {
  std::mt19937_64 gen(11);
  const std::vector<std::string> pieces{"How", "to", "THIS", "you", "Cat", "9", "ran", "!", "?",
                                        "...", "\"", "that", "WOW", "is", "your", ",", "the",
                                        "\xE2\x80\x94", "Hello", "x"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), len(1, 12);
  const auto names = formal_feature_names();
  const std::set<std::string> keys(names.begin(), names.end());
  for (int trial = 0; trial < 500; ++trial) {
    std::string h = "Start";
    for (std::size_t i = 0, n = len(gen); i < n; ++i) h += " " + pieces[pick(gen)];
    CAPTURE(h);
    const auto f = extract_formal(h);
    std::set<std::string> got;
    for (const auto& [k, v] : f) {
      got.insert(k);
      CHECK(v >= 0.0);
    }
    CHECK(got == keys);
    CHECK(f.at("stopword_ratio") <= 1.0);
    CHECK(f.at("n_chars") >= f.at("n_words"));
    CHECK(f.at("n_words") >= 1.0);
    CHECK(f == extract_formal(h));
    const auto type = classify_headline_type(h);
    CHECK(std::count(all_headline_types().begin(), all_headline_types().end(), type) == 1);
  }
}

TEST_CASE("stopword list is loaded") {
  CHECK(stopwords().count("the") == 1);
  CHECK(stopwords().count("cat") == 0);
  CHECK(stopwords().size() > 100);
}
