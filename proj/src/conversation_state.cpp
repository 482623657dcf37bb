#include "agentrec/conversation_state.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "agentrec/errors.hpp"

namespace agentrec {

namespace {

constexpr const char* kIntentNames[kNumIntents] = {
    "ProvidePreference", "RequestRecommendation", "GiveFeedback", "Clarify", "Chitchat"};

// Number of tokens before an attribute term that are searched for a negation.
constexpr std::size_t kNegationWindow = 2;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

#include "builtin_lexicon.inc"

}  // namespace

void ConversationHistory::append(Utterance utterance) {
  if (utterance.turn_index != utterances_.size()) {
    throw StateDesync("utterance turn " + std::to_string(utterance.turn_index) +
                      " appended to history of length " + std::to_string(utterances_.size()));
  }
  utterances_.push_back(std::move(utterance));
}

const char* to_string(Intent intent) { return kIntentNames[static_cast<std::size_t>(intent)]; }

Intent intent_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNumIntents; ++i) {
    if (name == kIntentNames[i]) return static_cast<Intent>(i);
  }
  throw InvalidConfig("unknown intent label '" + std::string(name) + "'");
}

Intent IntentDistribution::argmax() const {
  const auto it = std::max_element(probabilities.begin(), probabilities.end());
  return static_cast<Intent>(it - probabilities.begin());
}

IntentDistribution IntentDistribution::uniform() {
  IntentDistribution d;
  d.probabilities.fill(1.0 / kNumIntents);
  return d;
}

// ---------------------------------------------------------------------------
// Lexicon

void Lexicon::add_attribute(std::string term, std::size_t attribute_id) {
  canonical_terms_.emplace(attribute_id, term);
  attributes_[std::move(term)] = attribute_id;
  if (!vocab_size_fixed_) vocab_size_ = std::max(vocab_size_, attribute_id + 1);
  if (attribute_id >= vocab_size_) {
    throw InvalidConfig("attribute id " + std::to_string(attribute_id) +
                        " exceeds declared vocabulary size " + std::to_string(vocab_size_));
  }
}

void Lexicon::add_intent(std::string term, Intent intent) { intents_[std::move(term)] = intent; }

void Lexicon::add_negation(std::string term) { negations_.insert(std::move(term)); }

void Lexicon::set_vocab_size(std::size_t size) {
  for (const auto& [term, id] : attributes_) {
    if (id >= size) throw InvalidConfig("vocabulary size smaller than attribute id of '" + term + "'");
  }
  vocab_size_ = size;
  vocab_size_fixed_ = true;
}

std::string Lexicon::attribute_term(std::size_t attribute_id) const {
  const auto it = canonical_terms_.find(attribute_id);
  if (it != canonical_terms_.end()) return it->second;
  return "attr" + std::to_string(attribute_id);
}

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = [&] { return " (line " + std::to_string(line_no) + ")"; };
    if (line.front() == '[') {
      if (line.back() != ']') throw InvalidConfig("unterminated section header" + where());
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    if (section == "negations") {
      lex.add_negation(std::string(line));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw InvalidConfig("expected `key = value`" + where());
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) throw InvalidConfig("empty key or value" + where());
    if (section == "attributes") {
      std::size_t id = 0;
      try {
        std::size_t used = 0;
        id = std::stoul(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw InvalidConfig("attribute id must be a non-negative integer" + where());
      }
      lex.add_attribute(key, id);
    } else if (section == "intents") {
      lex.add_intent(key, intent_from_string(value));
    } else if (section == "vocabulary") {
      if (key != "size") throw InvalidConfig("unknown vocabulary key '" + key + "'" + where());
      lex.set_vocab_size(std::stoul(value));
    } else {
      throw InvalidConfig("entry outside a known section" + where());
    }
  }
  if (lex.vocab_size() == 0) throw InvalidConfig("lexicon defines no attributes");
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open lexicon file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = parse(kBuiltinLexicon);
  return lex;
}

// ---------------------------------------------------------------------------
// Tokens and hashing

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t hash_token(std::string_view token) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Intent and preference extraction

IntentDistribution classify_intent(std::string_view text, const Lexicon& lexicon, double smoothing) {
  if (is_blank(text)) throw InvalidUtterance("utterance text is empty");
  std::array<double, kNumIntents> counts{};
  for (const auto& token : tokenize(text)) {
    const auto it = lexicon.intents().find(token);
    if (it != lexicon.intents().end()) counts[static_cast<std::size_t>(it->second)] += 1.0;
  }
  double total = 0.0;
  for (auto& c : counts) {
    c += smoothing;
    total += c;
  }
  IntentDistribution dist;
  for (std::size_t i = 0; i < kNumIntents; ++i) dist.probabilities[i] = counts[i] / total;
  return dist;
}

std::vector<PreferenceStatement> extract_preferences(std::string_view text, const Lexicon& lexicon) {
  if (lexicon.vocab_size() == 0) throw InvalidConfig("empty attribute vocabulary");
  const auto tokens = tokenize(text);
  std::vector<PreferenceStatement> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto it = lexicon.attributes().find(tokens[i]);
    if (it == lexicon.attributes().end()) continue;
    bool negated = false;
    for (std::size_t back = 1; back <= kNegationWindow && back <= i; ++back) {
      if (lexicon.is_negation(tokens[i - back])) negated = true;
    }
    out.push_back({it->second, negated ? -1.0 : 1.0, 1.0});
  }
  return out;
}

UtteranceAnalysis LexiconAnalyzer::analyze(const Utterance& utterance,
                                           const ConversationHistory& /*history*/) const {
  return {classify_intent(utterance.text, lexicon_, smoothing_),
          extract_preferences(utterance.text, lexicon_)};
}

// ---------------------------------------------------------------------------
// State encoding

ConversationEncoder::ConversationEncoder(std::shared_ptr<const UtteranceAnalyzer> analyzer,
                                         EncoderConfig config)
    : analyzer_(std::move(analyzer)), config_(config) {
  if (!analyzer_) throw InvalidConfig("encoder needs an analyzer");
  if (config_.feature_dim <= 8) throw InvalidConfig("feature dimension must exceed 8");
  if (config_.turn_horizon == 0) throw InvalidConfig("turn horizon must be positive");
}

ConversationState ConversationEncoder::encode_state(const Utterance& utterance,
                                                    const ConversationHistory& history) const {
  if (utterance.turn_index != history.size()) {
    throw StateDesync("utterance turn " + std::to_string(utterance.turn_index) +
                      " does not follow history of length " + std::to_string(history.size()));
  }
  const auto analysis = analyzer_->analyze(utterance, history);

  ConversationState state;
  state.intent = analysis.intent;
  state.statements = analysis.statements;
  state.turn_index = utterance.turn_index;

  const std::size_t dim = config_.feature_dim;
  const std::size_t buckets = bucket_count();
  state.features.assign(dim, 0.0);
  for (std::size_t i = 0; i < kNumIntents; ++i) state.features[i] = state.intent.probabilities[i];

  double norm_sq = 0.0;
  for (const auto& token : tokenize(utterance.text)) {
    state.features[kNumIntents + hash_token(token) % buckets] += 1.0;
  }
  for (std::size_t b = 0; b < buckets; ++b) norm_sq += state.features[kNumIntents + b] * state.features[kNumIntents + b];
  if (norm_sq > 0.0) {
    const double norm = std::sqrt(norm_sq);
    for (std::size_t b = 0; b < buckets; ++b) state.features[kNumIntents + b] /= norm;
  }

  std::size_t statement_count = analysis.statements.size();
  double polarity_sum = 0.0;
  for (const auto& s : analysis.statements) polarity_sum += s.polarity;
  for (const auto& past : history.utterances()) {
    if (past.role != Role::User) continue;
    for (const auto& s : analyzer_->analyze(past, history).statements) {
      ++statement_count;
      polarity_sum += s.polarity;
    }
  }

  const double turn = static_cast<double>(utterance.turn_index);
  state.features[dim - 3] = std::min(turn / static_cast<double>(config_.turn_horizon), 1.0);
  state.features[dim - 2] = static_cast<double>(statement_count) / (turn + 1.0);
  state.features[dim - 1] = statement_count ? polarity_sum / static_cast<double>(statement_count) : 0.0;
  return state;
}

AgentScores score_candidates_conv(const ConversationState& state,
                                  const std::vector<Candidate>& candidates) {
  AgentScores out{AgentId::Conv, std::vector<double>(candidates.size(), 0.0)};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& attrs = candidates[i].attributes;
    double acc = 0.0;
    for (const auto& s : state.statements) {
      if (s.attribute_id < attrs.size()) acc += s.polarity * s.strength * attrs[s.attribute_id];
    }
    out.scores[i] = acc;
  }
  return out;
}

}  // namespace agentrec
