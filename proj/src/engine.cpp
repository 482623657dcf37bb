#include "agentrec/engine.hpp"

#include <mutex>

#include "agentrec/errors.hpp"
#include "agentrec/ranking_agent.hpp"

namespace agentrec {

namespace {

constexpr const char* kVariantNames[] = {"Full", "FixedUniformWeights", "NoRefineRound", "Tier2Only"};

// Agent scoring passes per tier.
constexpr std::size_t kRapidMissUnits = 1;
constexpr std::size_t kReasoningUnits = 3;
constexpr std::size_t kDeepCollabUnits = 4;
constexpr std::size_t kRefineUnits = 2;

RankedList rank_single_agent(const AgentScores& scores, const std::vector<std::string>& ids) {
  const auto norm = minmax_normalize(scores.scores);
  const auto j = static_cast<std::size_t>(scores.agent);
  RankedList out;
  out.entries.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto& e = out.entries[i];
    e.item_id = ids[i];
    e.normalized[j] = norm[i];
    e.contributions[j] = norm[i];
    e.fused_score = norm[i];
  }
  sort_ranked(out.entries);
  return out;
}

}  // namespace

const char* to_string(Variant v) { return kVariantNames[static_cast<int>(v)]; }

Variant variant_from_string(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    if (name == kVariantNames[i]) return static_cast<Variant>(i);
  }
  throw InvalidConfig("unknown variant '" + std::string(name) + "'");
}

Engine::Engine(EngineConfig config, std::shared_ptr<const UtteranceAnalyzer> analyzer,
               std::vector<Candidate> candidates, Variant variant)
    : config_(std::move(config)),
      encoder_(std::move(analyzer), config_.encoder),
      candidates_(std::move(candidates)),
      attributes_(candidates_),
      variant_(variant),
      cache_(config_.router.cache_capacity, config_.router.cache_coverage_tolerance) {
  if (candidates_.empty()) throw InvalidConfig("engine needs at least one candidate");
  for (const auto& c : candidates_) item_ids_.push_back(c.item_id);
  // Validates the thresholds once up front.
  route(ComplexityScore{}, config_.router.thresholds);
  const std::size_t input_dim =
      config_.encoder.feature_dim + 2 + kNumAgents * config_.coordinator.history_window;
  net_ = WeightNet::seeded(input_dim, config_.coordinator.hidden_dim, config_.coordinator.init_seed,
                           config_.coordinator.init_scale);
  baseline_.factor = config_.coordinator.baseline_factor;
}

Session Engine::new_session(std::string id, ContextSnapshot context) const {
  Session s;
  s.history = ConversationHistory(id);
  s.id = std::move(id);
  s.profile = init_profile(attributes_.dimension());
  s.context = std::move(context);
  s.performance = PerformanceHistory(config_.coordinator.history_window);
  return s;
}

Weights Engine::current_weights(const CoordinatorFeatures& features) const {
  if (!adaptive()) return Weights::uniform();
  std::shared_lock lock(net_mutex_);
  return compute_weights(features, net_);
}

WeightNet Engine::net() const {
  std::shared_lock lock(net_mutex_);
  return net_;
}

void Engine::set_net(WeightNet net) {
  std::unique_lock lock(net_mutex_);
  net_ = std::move(net);
}

RewardBaseline Engine::baseline() const {
  std::shared_lock lock(net_mutex_);
  return baseline_;
}

EngineCounters Engine::counters() const {
  EngineCounters c;
  for (std::size_t t = 0; t < 3; ++t) c.tier_requests[t] = tier_requests_[t].load();
  c.net_updates = net_updates_.load();
  c.numeric_errors = numeric_errors_.load();
  c.cache = cache_.stats();
  return c;
}

std::optional<TurnReward> Engine::settle_feedback(Session& session, const FeedbackSignal& feedback,
                                                  bool* net_updated) {
  if (net_updated) *net_updated = false;
  if (!session.pending) return std::nullopt;
  const PendingTurn pending = std::move(*session.pending);
  session.pending.reset();

  const auto reward = turn_reward(pending.ranked, feedback, config_.coordinator.reward_k);
  session.performance.push(reward.per_agent);
  if (pending.tier == Tier::DeepCollab && adaptive()) {
    std::unique_lock lock(net_mutex_);
    try {
      net_ = update_net(net_, pending.features, pending.weights, reward, baseline_,
                        UpdateConfig{config_.coordinator.learning_rate});
      ++net_updates_;
      if (net_updated) *net_updated = true;
    } catch (const NumericError&) {
      ++numeric_errors_;
    }
  }
  return reward;
}

RankedList Engine::execute_tier(TierDecision& decision, const Session& session,
                                const ConversationState& state, std::string_view text,
                                const Weights& weights, std::size_t& work_units) {
  work_units = 0;
  decision.cache_hit = false;
  switch (decision.tier) {
    case Tier::Rapid: {
      const double coverage = profile_coverage(session.profile);
      const auto signature = query_signature(text, session.profile);
      if (auto cached = cache_.get(signature, coverage)) {
        decision.cache_hit = true;
        return std::move(*cached);
      }
      work_units = kRapidMissUnits;
      auto ranked = rank_single_agent(score_candidates_pref(session.profile, candidates_), item_ids_);
      cache_.put(signature, ranked, coverage);
      return ranked;
    }
    case Tier::Reasoning: {
      work_units = kReasoningUnits;
      // The conversation agent is not consulted; a constant vector normalizes
      // to 0.5 everywhere and leaves the ordering to the other three.
      std::vector<AgentScores> scores{
          {AgentId::Conv, std::vector<double>(candidates_.size(), 0.0)},
          score_candidates_pref(session.profile, candidates_),
          score_candidates_ctx(session.context, candidates_),
          score_candidates_rank(candidates_, session.profile, session.context, config_.attention)};
      return fuse_scores(weights, scores, item_ids_);
    }
    case Tier::DeepCollab: {
      work_units = kDeepCollabUnits;
      std::vector<AgentScores> scores{
          score_candidates_conv(state, candidates_),
          score_candidates_pref(session.profile, candidates_),
          score_candidates_ctx(session.context, candidates_),
          score_candidates_rank(candidates_, session.profile, session.context, config_.attention)};
      if (variant_ != Variant::NoRefineRound) {
        scores = refine_round(scores, candidates_, session.profile, session.context, state.statements,
                              config_.preference, config_.attention);
        work_units += kRefineUnits;
      }
      return fuse_scores(weights, scores, item_ids_);
    }
  }
  return {};
}

TurnResult Engine::process_turn(Session& session, std::string_view text, const FeedbackSignal& feedback,
                                std::int64_t timestamp_ms) {
  TurnResult result;
  Utterance utterance{std::string(text), Role::User, session.history.size(), timestamp_ms};
  result.state = encoder_.encode_state(utterance, session.history);
  result.credit = settle_feedback(session, feedback, &result.net_updated);

  const auto complexity = complexity_score(result.state, session.profile, config_.router.complexity);
  result.decision = route(complexity, config_.router.thresholds);
  if (variant_ == Variant::Tier2Only) result.decision.tier = Tier::Reasoning;

  const auto features = make_coordinator_features(result.state, profile_coverage(session.profile),
                                                   complexity.value, session.performance);
  result.weights = current_weights(features);
  result.ranked = execute_tier(result.decision, session, result.state, text, result.weights,
                               result.work_units);
  ++tier_requests_[static_cast<std::size_t>(result.decision.tier)];

  session.profile = update_profile(session.profile, feedback, result.state, attributes_, config_.preference);
  session.history.append(std::move(utterance));
  session.pending = PendingTurn{result.ranked, result.decision.tier, features, result.weights};
  session.last_decision = result.decision;
  session.last_weights = result.weights;
  return result;
}

}  // namespace agentrec
