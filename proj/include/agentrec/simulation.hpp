#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "agentrec/config.hpp"
#include "agentrec/context_model.hpp"
#include "agentrec/coordinator.hpp"
#include "agentrec/engine.hpp"
#include "agentrec/rng.hpp"
#include "agentrec/tier_router.hpp"
#include "json.hpp"

namespace agentrec::sim {

struct SimUser {
  std::string user_id;
  std::vector<double> true_preferences;  // hidden ground truth in [-1,1]^V
  TimeBucket time_bucket = TimeBucket::Evening;
  LocationTag location_tag = LocationTag::Home;
  SocialSetting social_setting = SocialSetting::Alone;
  double mood = 0.0;
  std::size_t patience = 15;
  double accept_threshold = 0.6;
  double disclosure_rate = 0.5;
  std::uint64_t rng_seed = 0;

  ContextSnapshot context() const { return snapshot_context(time_bucket, location_tag, social_setting, mood); }
};

struct World {
  std::vector<Candidate> catalog;
  std::vector<SimUser> users;
  std::vector<SimUser> warmup;  // unlogged conversations run before the evaluated users
};

/// (preferences . attributes) / |attributes|_1
double true_affinity(const SimUser& user, const Candidate& item);

/// Items carry 3-4 active attributes; each user has 3-5 strong (|p| >= 0.7)
/// preferences, at least one of them positive, and at least one catalog item
/// at or above the acceptance threshold. Deterministic per seed.
/// Throws InvalidConfig when n_items < 20 or V < 4.
World generate_world(std::uint64_t seed, std::size_t vocab_size, std::size_t n_items,
                     std::size_t n_users, const SimulationConfig& sim, const Lexicon& lexicon);

/// Mutable per-conversation state of a simulated user.
class UserState {
 public:
  UserState(const SimUser& user, const std::vector<Candidate>& catalog);

  const SimUser& user() const { return *user_; }
  double affinity(const std::string& item_id) const;
  bool acceptable(const std::string& item_id) const;
  const std::set<std::string>& relevant() const { return relevant_; }
  const std::vector<bool>& disclosed() const { return disclosed_; }
  RandomStream& rng() { return rng_; }
  /// Strongest (by |preference|) attribute not yet disclosed, if any.
  std::optional<std::size_t> next_disclosure() const;
  void mark_disclosed(std::size_t attribute) { disclosed_[attribute] = true; }

 private:
  const SimUser* user_;
  std::unordered_map<std::string, double> affinity_;
  std::set<std::string> relevant_;
  std::vector<bool> disclosed_;
  RandomStream rng_;
};

struct SimResponse {
  std::string utterance;
  FeedbackSignal feedback;
  bool accepted = false;
  std::optional<std::size_t> disclosed_attribute;
};

/// First message of a conversation.
std::string opening_utterance(UserState& state, const Lexicon& lexicon);

/// The user's reaction to one recommendation list: accept the first top-k
/// item at or above the threshold, otherwise maybe disclose a preference and
/// maybe click the top item.
SimResponse simulate_turn(UserState& state, const RankedList& response, std::size_t k,
                          const Lexicon& lexicon);

struct LoggedTurn {
  std::string utterance;
  TierDecision decision;
  Weights weights;
  std::vector<std::string> top_items;
  std::vector<double> top_scores;
  std::size_t work_units = 0;
  /// 0-based rank of the best-ranked acceptable item in the full list.
  std::size_t first_acceptable_rank = std::numeric_limits<std::size_t>::max();
  FeedbackSignal feedback;  // the user's reaction to this turn's list
};

enum class Outcome { Success, Abandoned };

struct ConversationLog {
  std::string user_id;
  std::uint64_t seed = 0;
  std::vector<LoggedTurn> turns;
  Outcome outcome = Outcome::Abandoned;
  std::size_t turns_used = 0;
  std::set<std::string> relevant;
};

ConversationLog run_conversation(Engine& engine, const SimUser& user, const World& world,
                                 std::size_t k, const Lexicon& lexicon);

double ndcg_at_k(const std::vector<std::string>& ranked, const std::map<std::string, int>& relevance,
                 std::size_t k);
double recall_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant,
                   std::size_t k);

/// Fraction of conversations where some turn ranked an acceptable item in
/// the top k. Throws InvalidConfig on an empty log set.
double success_at_k(const std::vector<ConversationLog>& logs, std::size_t k);
/// Mean over conversations of recall of the final turn's top k.
double mean_recall_at_k(const std::vector<ConversationLog>& logs, std::size_t k);
double mean_ndcg_at_k(const std::vector<ConversationLog>& logs, std::size_t k);
double avg_turns(const std::vector<ConversationLog>& logs);

struct SeedMetrics {
  std::uint64_t seed = 0;
  double success_at_k = 0.0;
  double recall_at_k = 0.0;
  double ndcg_at_k = 0.0;
  double avg_turns = 0.0;
  std::array<std::uint64_t, 3> tier_counts{};
};

struct MetricsReport {
  std::string variant;
  std::size_t k = 10;
  std::size_t n_users = 0;
  double success_at_k = 0.0;
  double recall_at_k = 0.0;
  double ndcg_at_k = 0.0;
  double avg_turns = 0.0;
  std::vector<SeedMetrics> per_seed;
  std::string config_fingerprint;
};

nlohmann::json to_json(const MetricsReport& report);

struct ExperimentConfig {
  EngineConfig engine;
  SimulationConfig simulation;
  std::string variant = "Full";
  std::vector<std::uint64_t> seeds{1};
  Lexicon lexicon = Lexicon::builtin();
};

struct ExperimentResult {
  MetricsReport report;
  std::vector<ConversationLog> logs;
};

/// Throws InvalidConfig for an unknown variant, no seeds or zero users.
ExperimentResult run_experiment(const ExperimentConfig& config);

nlohmann::json log_to_json(const ConversationLog& log);

/// Writes report.json and conversations.jsonl into out_dir.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// One synthetic query descriptor per line: turn_index, profile coverage and
/// utterance text separated by tabs.
struct QueryDescriptor {
  std::size_t turn_index = 0;
  double coverage = 0.0;
  std::string text;
};

std::vector<QueryDescriptor> parse_query_mix(const std::string& text);
std::vector<QueryDescriptor> load_query_mix(const std::filesystem::path& path);
std::string format_query_mix(const std::vector<QueryDescriptor>& queries);

/// Reference mix drawn from simulated conversations of the Full variant,
/// without warm-up users.
std::vector<QueryDescriptor> reference_query_mix(const ExperimentConfig& config, std::size_t count);

std::vector<double> complexity_values(const std::vector<QueryDescriptor>& queries, const Lexicon& lexicon,
                                      const EngineConfig& config);

// ---------------------------------------------------------------------------
// Non-stationary agent-reliability stream for the coordinator.

struct StreamConfig {
  std::size_t turns = 200;
  std::size_t switch_at = 50;
  AgentId reliable_before = AgentId::Pref;
  AgentId reliable_after = AgentId::Ctx;
  std::size_t candidates = 20;
  std::size_t k = 3;
  std::size_t state_dim = 34;  // D_c + 2
  std::size_t history_window = 5;
  std::size_t hidden_dim = 16;
  double learning_rate = 0.2;
  double init_scale = 1.0;
};

struct StreamResult {
  double cumulative_reward = 0.0;
  std::vector<double> rewards;
  std::vector<double> reliable_weight;  // weight on the currently reliable agent per turn
};

/// Each turn one hidden target item; the currently reliable agent scores it
/// highest, the others are noise. Reward is 1 when the target lands in the
/// top k of the fused ranking. With adaptive=false the weights stay uniform.
StreamResult run_nonstationary_stream(std::uint64_t seed, bool adaptive, const StreamConfig& config = {});

}  // namespace agentrec::sim
