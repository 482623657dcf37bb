#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "agentrec/config.hpp"
#include "agentrec/context_model.hpp"
#include "agentrec/conversation_state.hpp"
#include "agentrec/coordinator.hpp"
#include "agentrec/preference_model.hpp"
#include "agentrec/tier_router.hpp"

namespace agentrec {

/// System variants compared by the simulation harness.
enum class Variant { Full, FixedUniformWeights, NoRefineRound, Tier2Only };

const char* to_string(Variant v);
/// Throws InvalidConfig on an unknown name.
Variant variant_from_string(std::string_view name);

/// Output of a turn kept until the user's next feedback arrives, so the
/// reward can be credited to the weights that produced the list.
struct PendingTurn {
  RankedList ranked;
  Tier tier = Tier::Rapid;
  CoordinatorFeatures features;
  Weights weights;
};

struct Session {
  std::string id;
  ConversationHistory history;
  PreferenceProfile profile;
  ContextSnapshot context;
  PerformanceHistory performance;
  std::optional<PendingTurn> pending;
  std::optional<TierDecision> last_decision;
  Weights last_weights;
};

struct TurnResult {
  ConversationState state;
  TierDecision decision;
  Weights weights;
  RankedList ranked;
  std::size_t work_units = 0;
  /// Reward for the previous turn's list, computed from this turn's feedback.
  std::optional<TurnReward> credit;
  bool net_updated = false;
};

struct EngineCounters {
  std::array<std::uint64_t, 3> tier_requests{};
  std::uint64_t net_updates = 0;
  std::uint64_t numeric_errors = 0;
  CacheStats cache;
};

/// Runs the per-turn pipeline over a fixed candidate set. Shared state (the
/// gating network, its reward baseline, the response cache and counters) is
/// internally synchronized; a Session must only be driven by one thread at a
/// time.
class Engine {
 public:
  Engine(EngineConfig config, std::shared_ptr<const UtteranceAnalyzer> analyzer,
         std::vector<Candidate> candidates, Variant variant = Variant::Full);

  Session new_session(std::string id, ContextSnapshot context) const;

  /// credit previous turn -> encode_state -> complexity_score -> route ->
  /// execute_tier -> update_profile.
  TurnResult process_turn(Session& session, std::string_view text, const FeedbackSignal& feedback,
                          std::int64_t timestamp_ms = 0);

  /// Credits the pending turn with feedback that arrives without a new
  /// utterance (the end of a conversation).
  std::optional<TurnReward> settle_feedback(Session& session, const FeedbackSignal& feedback,
                                            bool* net_updated = nullptr);

  /// Scores and ranks for a routed turn. Rapid consults the cache (Pref agent
  /// on a miss); Reasoning fuses Pref, Ctx and Rank with the given weights;
  /// DeepCollab runs all four agents plus the refinement round. Sets
  /// decision.cache_hit and work_units.
  RankedList execute_tier(TierDecision& decision, const Session& session,
                          const ConversationState& state, std::string_view text,
                          const Weights& weights, std::size_t& work_units);

  Weights current_weights(const CoordinatorFeatures& features) const;

  WeightNet net() const;
  void set_net(WeightNet net);
  RewardBaseline baseline() const;
  EngineCounters counters() const;

  const EngineConfig& config() const { return config_; }
  const std::vector<Candidate>& candidates() const { return candidates_; }
  const ConversationEncoder& encoder() const { return encoder_; }
  Variant variant() const { return variant_; }
  ResponseCache& cache() { return cache_; }

 private:
  bool adaptive() const { return variant_ != Variant::FixedUniformWeights; }

  EngineConfig config_;
  ConversationEncoder encoder_;
  std::vector<Candidate> candidates_;
  std::vector<std::string> item_ids_;
  AttributeTable attributes_;
  Variant variant_;

  mutable std::shared_mutex net_mutex_;
  WeightNet net_;
  RewardBaseline baseline_;

  ResponseCache cache_;
  std::array<std::atomic<std::uint64_t>, 3> tier_requests_{};
  std::atomic<std::uint64_t> net_updates_{0};
  std::atomic<std::uint64_t> numeric_errors_{0};
};

}  // namespace agentrec
