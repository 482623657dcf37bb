#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "agentrec/types.hpp"

namespace agentrec {

enum class Role { User, System };

struct Utterance {
  std::string text;
  Role role = Role::User;
  std::size_t turn_index = 0;
  std::int64_t timestamp_ms = 0;
};

/// Append-only, ordered by turn_index.
class ConversationHistory {
 public:
  explicit ConversationHistory(std::string session_id = {}) : session_id_(std::move(session_id)) {}

  const std::string& session_id() const { return session_id_; }
  const std::vector<Utterance>& utterances() const { return utterances_; }
  std::size_t size() const { return utterances_.size(); }

  /// Throws StateDesync unless utterance.turn_index == size().
  void append(Utterance utterance);

 private:
  std::string session_id_;
  std::vector<Utterance> utterances_;
};

enum class Intent { ProvidePreference = 0, RequestRecommendation, GiveFeedback, Clarify, Chitchat };

inline constexpr std::size_t kNumIntents = 5;

const char* to_string(Intent intent);
Intent intent_from_string(std::string_view name);

struct IntentDistribution {
  std::array<double, kNumIntents> probabilities{};

  double operator[](Intent i) const { return probabilities[static_cast<std::size_t>(i)]; }
  Intent argmax() const;

  static IntentDistribution uniform();
};

struct PreferenceStatement {
  std::size_t attribute_id = 0;
  double polarity = 1.0;   // [-1, +1]
  double strength = 1.0;   // (0, 1]

  friend bool operator==(const PreferenceStatement&, const PreferenceStatement&) = default;
};

struct ConversationState {
  IntentDistribution intent;
  std::vector<PreferenceStatement> statements;
  std::size_t turn_index = 0;
  std::vector<double> features;
};

/// Attribute lexicon, intent keyword table and negation tokens.
///
/// Text format, one entry per line, `#` starts a comment:
///
///     [attributes]
///     jazz = 7
///     [intents]
///     recommend = RequestRecommendation
///     [negations]
///     not
///
/// The vocabulary size is one past the largest attribute id unless a
/// `[vocabulary]` section sets `size = N`.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::filesystem::path& path);
  /// The lexicon shipped in config/lexicon.conf, compiled in.
  static const Lexicon& builtin();

  void add_attribute(std::string term, std::size_t attribute_id);
  void add_intent(std::string term, Intent intent);
  void add_negation(std::string term);
  void set_vocab_size(std::size_t size);

  std::size_t vocab_size() const { return vocab_size_; }
  const std::unordered_map<std::string, std::size_t>& attributes() const { return attributes_; }
  const std::unordered_map<std::string, Intent>& intents() const { return intents_; }
  bool is_negation(const std::string& token) const { return negations_.count(token) > 0; }

  /// First term registered for the attribute, or "attr<N>" if none.
  std::string attribute_term(std::size_t attribute_id) const;

 private:
  std::unordered_map<std::string, std::size_t> attributes_;
  std::unordered_map<std::string, Intent> intents_;
  std::unordered_set<std::string> negations_;
  std::map<std::size_t, std::string> canonical_terms_;
  std::size_t vocab_size_ = 0;
  bool vocab_size_fixed_ = false;
};

/// Lowercase, split on non-alphanumeric ASCII.
std::vector<std::string> tokenize(std::string_view text);

/// 64-bit FNV-1a.
std::uint64_t hash_token(std::string_view token);

/// Throws InvalidUtterance on empty or whitespace-only text.
IntentDistribution classify_intent(std::string_view text, const Lexicon& lexicon,
                                   double smoothing = 0.25);

std::vector<PreferenceStatement> extract_preferences(std::string_view text, const Lexicon& lexicon);

/// Seam for an external language model: given the utterance and its history,
/// return intents and explicit preference statements.
struct UtteranceAnalysis {
  IntentDistribution intent;
  std::vector<PreferenceStatement> statements;
};

class UtteranceAnalyzer {
 public:
  virtual ~UtteranceAnalyzer() = default;
  virtual UtteranceAnalysis analyze(const Utterance& utterance,
                                    const ConversationHistory& history) const = 0;
};

/// Deterministic keyword analyzer; the default backend.
class LexiconAnalyzer final : public UtteranceAnalyzer {
 public:
  explicit LexiconAnalyzer(Lexicon lexicon, double smoothing = 0.25)
      : lexicon_(std::move(lexicon)), smoothing_(smoothing) {}

  UtteranceAnalysis analyze(const Utterance& utterance,
                            const ConversationHistory& history) const override;

  const Lexicon& lexicon() const { return lexicon_; }

 private:
  Lexicon lexicon_;
  double smoothing_;
};

struct EncoderConfig {
  std::size_t feature_dim = 32;     // D_c, must be > 8
  std::size_t turn_horizon = 20;    // turn index normalizer
};

/// Builds the per-turn ConversationState. Feature layout (D = feature_dim):
///   [0,5)      intent probabilities
///   [5,D-3)    hashed bag of tokens, L2-normalized unless empty
///   D-3        min(turn_index / turn_horizon, 1)
///   D-2        statements so far / (turn_index + 1)
///   D-1        mean polarity of statements so far (0 if none)
class ConversationEncoder {
 public:
  ConversationEncoder(std::shared_ptr<const UtteranceAnalyzer> analyzer, EncoderConfig config = {});

  ConversationState encode_state(const Utterance& utterance, const ConversationHistory& history) const;

  const UtteranceAnalyzer& analyzer() const { return *analyzer_; }
  const EncoderConfig& config() const { return config_; }
  std::size_t bucket_count() const { return config_.feature_dim - 8; }

 private:
  std::shared_ptr<const UtteranceAnalyzer> analyzer_;
  EncoderConfig config_;
};

/// Conversation agent: per candidate, sum of polarity * strength * attribute
/// value over the statements extracted from the current utterance.
AgentScores score_candidates_conv(const ConversationState& state,
                                  const std::vector<Candidate>& candidates);

}  // namespace agentrec
