#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "agentrec/conversation_state.hpp"
#include "agentrec/errors.hpp"
#include "oracles.hpp"

using namespace agentrec;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const Lexicon& lex() { return Lexicon::builtin(); }

ConversationEncoder encoder(EncoderConfig cfg = {}) {
  return ConversationEncoder(std::make_shared<LexiconAnalyzer>(lex()), cfg);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

TEST(Lexicon, BuiltinMatchesShippedFile) {
  const auto from_file = Lexicon::load(std::string(AGENTREC_SOURCE_DIR) + "/config/lexicon.conf");
  EXPECT_EQ(from_file.attributes(), lex().attributes());
  EXPECT_EQ(from_file.intents(), lex().intents());
  EXPECT_EQ(from_file.vocab_size(), lex().vocab_size());
}

TEST(Lexicon, ShippedTableMapsTheDocumentedTerms) {
  const auto text = read_file(std::string(AGENTREC_SOURCE_DIR) + "/config/lexicon.conf");
  EXPECT_NE(text.find("recommend = RequestRecommendation"), std::string::npos);
  EXPECT_NE(text.find("jazz = 7"), std::string::npos);
  EXPECT_NE(text.find("horror = 3"), std::string::npos);
  EXPECT_EQ(lex().attributes().at("jazz"), 7u);
  EXPECT_EQ(lex().attributes().at("horror"), 3u);
  EXPECT_EQ(lex().attribute_term(7), "jazz");
}

TEST(Lexicon, ParseErrors) {
  EXPECT_THROW(Lexicon::parse("[attributes]\njazz\n"), InvalidConfig);
  EXPECT_THROW(Lexicon::parse("[intents]\nfoo = Nonsense\n"), InvalidConfig);
  EXPECT_THROW(Lexicon::parse("[bogus]\n"), InvalidConfig);
  EXPECT_THROW(Lexicon::load("/nonexistent/lexicon.conf"), NotFound);
}

TEST(Lexicon, VocabularyDefaultsToLargestIdPlusOne) {
  const auto l = Lexicon::parse("[attributes]\na = 0\nb = 4\n");
  EXPECT_EQ(l.vocab_size(), 5u);
  EXPECT_EQ(l.attribute_term(2), "attr2");
}

TEST(Tokenize, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("I don't LIKE  sci-fi!"),
            (std::vector<std::string>{"i", "don", "t", "like", "sci", "fi"}));
  EXPECT_TRUE(tokenize("  ,;  ").empty());
}

TEST(Tokenize, HashIsFnv1a) {
  for (const char* s : {"", "a", "jazz", "recommend"}) EXPECT_EQ(hash_token(s), fnv1a(s)) << s;
}

TEST(ClassifyIntent, RecommendRequest) {
  const auto d = classify_intent("recommend me a movie", lex());
  EXPECT_EQ(d.argmax(), Intent::RequestRecommendation);
}

TEST(ClassifyIntent, EmptyTextRejected) {
  EXPECT_THROW(classify_intent("", lex()), InvalidUtterance);
  EXPECT_THROW(classify_intent("  \t\n", lex()), InvalidUtterance);
}

TEST(ClassifyIntent, NoHitsGivesUniform) {
  const auto d = classify_intent("zzz qqq", lex());
  for (double p : d.probabilities) EXPECT_DOUBLE_EQ(p, 0.2);
}

TEST(ClassifyIntent, SmoothedCounts) {
  // one RequestRecommendation hit, smoothing 0.25 over five labels
  const auto d = classify_intent("recommend", lex(), 0.25);
  EXPECT_NEAR(d[Intent::RequestRecommendation], 1.25 / 2.25, 1e-15);
  EXPECT_NEAR(d[Intent::Chitchat], 0.25 / 2.25, 1e-15);
}

TEST(ClassifyIntent, SumsToOneOnRandomStrings) {
  oracle::Gen g(11);
  std::vector<std::string> words;
  for (const auto& [w, _] : lex().intents()) words.push_back(w);
  for (const auto& [w, _] : lex().attributes()) words.push_back(w);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text = "x";
    const auto n = g.below(12);
    for (std::size_t i = 0; i < n; ++i) {
      if (g.below(2)) {
        text += " " + words[g.below(words.size())];
      } else {
        text.push_back(" abc!?'-xyz0123"[g.below(15)]);
      }
    }
    const auto d = classify_intent(text, lex());
    const double sum = std::accumulate(d.probabilities.begin(), d.probabilities.end(), 0.0);
    ASSERT_NEAR(sum, 1.0, 1e-9) << text;
    for (double p : d.probabilities) ASSERT_GT(p, 0.0);
  }
}

TEST(ExtractPreferences, PositiveStatement) {
  EXPECT_EQ(extract_preferences("I love jazz", lex()), (std::vector<PreferenceStatement>{{7, 1.0, 1.0}}));
}

TEST(ExtractPreferences, NegatedStatement) {
  EXPECT_EQ(extract_preferences("not into horror", lex()), (std::vector<PreferenceStatement>{{3, -1.0, 1.0}}));
}

TEST(ExtractPreferences, NoHits) { EXPECT_TRUE(extract_preferences("hello there", lex()).empty()); }

TEST(ExtractPreferences, NegationWindowIsTwoTokens) {
  EXPECT_EQ(extract_preferences("not really jazz", lex())[0].polarity, -1.0);
  EXPECT_EQ(extract_preferences("not really into jazz", lex())[0].polarity, 1.0);
  EXPECT_EQ(extract_preferences("i don't want jazz", lex())[0].polarity, -1.0);
  EXPECT_EQ(extract_preferences("i hate jazz", lex())[0].polarity, -1.0);
}

TEST(ExtractPreferences, OneStatementPerMatchedTerm) {
  const auto s = extract_preferences("jazz and rock but no horror", lex());
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (PreferenceStatement{7, 1.0, 1.0}));
  EXPECT_EQ(s[1], (PreferenceStatement{8, 1.0, 1.0}));
  EXPECT_EQ(s[2], (PreferenceStatement{3, -1.0, 1.0}));
}

TEST(ExtractPreferences, NotPrefixFlipsEveryTerm) {
  for (const auto& [term, id] : lex().attributes()) {
    const auto plain = extract_preferences("i like " + term, lex());
    const auto negated = extract_preferences("i like not " + term, lex());
    ASSERT_EQ(plain.size(), 1u);
    ASSERT_EQ(negated.size(), 1u);
    EXPECT_EQ(plain[0].attribute_id, id);
    EXPECT_EQ(plain[0].polarity, -negated[0].polarity) << term;
  }
}

TEST(ExtractPreferences, IdsBelowVocabulary) {
  oracle::Gen g(5);
  std::vector<std::string> words{"not", "no", "jazz", "kids", "funny", "the", "retro", "horror"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (std::size_t i = 0, n = 1 + g.below(8); i < n; ++i) text += words[g.below(words.size())] + " ";
    for (const auto& s : extract_preferences(text, lex())) ASSERT_LT(s.attribute_id, lex().vocab_size());
  }
}

TEST(EncodeState, FirstTurnHi) {
  const auto enc = encoder();
  ConversationHistory h("s");
  const auto st = enc.encode_state({"hi", Role::User, 0, 0}, h);
  ASSERT_EQ(st.features.size(), 32u);
  const std::size_t bucket = fnv1a("hi") % 24;
  for (std::size_t b = 0; b < 24; ++b) EXPECT_EQ(st.features[5 + b], b == bucket ? 1.0 : 0.0) << b;
  EXPECT_EQ(st.features[29], 0.0);
  EXPECT_EQ(st.features[30], 0.0);
  EXPECT_EQ(st.features[31], 0.0);
  const auto intent = classify_intent("hi", lex());
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(st.features[i], intent.probabilities[i]);
}

TEST(EncodeState, Deterministic) {
  const auto enc = encoder();
  ConversationHistory h("s");
  h.append({"i love jazz", Role::User, 0, 0});
  h.append({"not into horror", Role::User, 1, 5});
  const Utterance u{"what else do you have", Role::User, 2, 9};
  const auto a = enc.encode_state(u, h);
  const auto b = enc.encode_state(u, h);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.statements, b.statements);
}

TEST(EncodeState, TurnMismatchIsDesync) {
  const auto enc = encoder();
  ConversationHistory h("s");
  for (std::size_t t = 0; t < 5; ++t) h.append({"hi", Role::User, t, 0});
  EXPECT_THROW(enc.encode_state({"hi", Role::User, 3, 0}, h), StateDesync);
}

TEST(EncodeState, HistoryAppendChecksOrder) {
  ConversationHistory h("s");
  h.append({"hi", Role::User, 0, 0});
  EXPECT_THROW(h.append({"hi", Role::User, 2, 0}), StateDesync);
}

TEST(EncodeState, HistoryFeatures) {
  const auto enc = encoder();
  ConversationHistory h("s");
  h.append({"i love jazz", Role::User, 0, 0});
  h.append({"not into horror", Role::User, 1, 0});
  const auto st = enc.encode_state({"rock please", Role::User, 2, 0}, h);
  EXPECT_DOUBLE_EQ(st.features[29], 2.0 / 20.0);
  EXPECT_DOUBLE_EQ(st.features[30], 3.0 / 3.0);
  EXPECT_DOUBLE_EQ(st.features[31], (1.0 - 1.0 + 1.0) / 3.0);
}

TEST(EncodeState, TurnFeatureSaturates) {
  const auto enc = encoder();
  ConversationHistory h("s");
  for (std::size_t t = 0; t < 25; ++t) h.append({"ok", Role::User, t, 0});
  EXPECT_EQ(enc.encode_state({"ok", Role::User, 25, 0}, h).features[29], 1.0);
}

TEST(EncodeState, BagOfTokensIsUnitNorm) {
  const auto enc = encoder();
  oracle::Gen g(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    for (std::size_t i = 0, n = 1 + g.below(10); i < n; ++i) {
      text += std::string(1 + g.below(4), static_cast<char>('a' + g.below(26))) + " ";
    }
    const auto st = enc.encode_state({text, Role::User, 0, 0}, ConversationHistory("s"));
    double sq = 0.0;
    for (std::size_t b = 5; b < 29; ++b) sq += st.features[b] * st.features[b];
    ASSERT_NEAR(std::sqrt(sq), 1.0, 1e-9);
    for (double f : st.features) ASSERT_TRUE(std::isfinite(f));
  }
}

TEST(EncodeState, CustomDimension) {
  const auto enc = encoder({64, 20});
  const auto st = enc.encode_state({"hello", Role::User, 0, 0}, ConversationHistory("s"));
  EXPECT_EQ(st.features.size(), 64u);
  EXPECT_EQ(enc.bucket_count(), 56u);
  EXPECT_THROW(encoder({8, 20}), InvalidConfig);
}

TEST(ConvAgent, SignedOverlapWithAttributes) {
  std::vector<Candidate> items(3);
  items[0].attributes = std::vector<double>(16, 0.0);
  items[1].attributes = std::vector<double>(16, 0.0);
  items[2].attributes = std::vector<double>(16, 0.0);
  items[0].attributes[7] = 0.8;
  items[1].attributes[3] = 1.0;
  items[2].attributes[7] = 0.5;
  items[2].attributes[3] = 0.5;
  ConversationState st;
  st.statements = extract_preferences("jazz but not horror", lex());
  const auto s = score_candidates_conv(st, items);
  EXPECT_EQ(s.agent, AgentId::Conv);
  EXPECT_DOUBLE_EQ(s.scores[0], 0.8);
  EXPECT_DOUBLE_EQ(s.scores[1], -1.0);
  EXPECT_DOUBLE_EQ(s.scores[2], 0.0);
  st.statements.clear();
  EXPECT_EQ(score_candidates_conv(st, items).scores, (std::vector<double>{0, 0, 0}));
}
