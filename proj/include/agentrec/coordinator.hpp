#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentrec/context_model.hpp"
#include "agentrec/conversation_state.hpp"
#include "agentrec/preference_model.hpp"
#include "agentrec/ranking_agent.hpp"
#include "agentrec/types.hpp"

namespace agentrec {

using AgentVector = std::array<double, kNumAgents>;

/// Rolling window of per-agent rewards, most recent last.
class PerformanceHistory {
 public:
  explicit PerformanceHistory(std::size_t window = 5) : window_(window) {}

  void push(const AgentVector& rewards);
  /// Exactly window() rows; zero rows pad the front before the window fills.
  std::vector<AgentVector> rows() const;
  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
  std::deque<AgentVector> rows_;
};

struct CoordinatorFeatures {
  std::vector<double> state_features;    // ConversationState.features ++ [coverage, complexity]
  std::vector<AgentVector> perf_history; // k rows

  std::vector<double> flatten() const;
  std::size_t dimension() const { return state_features.size() + kNumAgents * perf_history.size(); }
};

CoordinatorFeatures make_coordinator_features(const ConversationState& state, double coverage,
                                              double complexity, const PerformanceHistory& history);

struct Weights {
  AgentVector w{0.25, 0.25, 0.25, 0.25};

  double operator[](AgentId a) const { return w[static_cast<std::size_t>(a)]; }
  static Weights uniform() { return {}; }
  friend bool operator==(const Weights&, const Weights&) = default;
};

/// Two-layer gating network: tanh hidden layer, linear output over the four
/// agents. Parameters live in one flat buffer laid out as
///   W1 (input x hidden, row-major) | b1 (hidden) | W2 (hidden x 4) | b2 (4)
class WeightNet {
 public:
  WeightNet() = default;
  /// All-zero parameters.
  WeightNet(std::size_t input_dim, std::size_t hidden_dim);

  /// Hidden weights uniform in +-scale/sqrt(input_dim), output layer zero so
  /// the initial weights are exactly uniform.
  static WeightNet seeded(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed,
                          double scale = 1.0);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  double& w1(std::size_t in, std::size_t h) { return params_[in * hidden_dim_ + h]; }
  double& b1(std::size_t h) { return params_[input_dim_ * hidden_dim_ + h]; }
  double& w2(std::size_t h, std::size_t o) { return params_[offset_w2() + h * kNumAgents + o]; }
  double& b2(std::size_t o) { return params_[offset_w2() + hidden_dim_ * kNumAgents + o]; }

  AgentVector logits(std::span<const double> input) const;

  /// Chain rule from a gradient on the four logits to the flat parameter
  /// buffer.
  std::vector<double> backprop(std::span<const double> input, const std::array<double, 4>& logit_grad) const;

  /// Gradient of advantage * log softmax(logits)[agent] with respect to the
  /// flat parameter buffer.
  std::vector<double> log_policy_gradient(std::span<const double> input, AgentId agent,
                                          double advantage) const;

  void save(const std::filesystem::path& path) const;
  static WeightNet load(const std::filesystem::path& path);
  std::string serialize() const;
  static WeightNet deserialize(const std::string& text);

  friend bool operator==(const WeightNet&, const WeightNet&) = default;

 private:
  std::size_t offset_w2() const { return input_dim_ * hidden_dim_ + hidden_dim_; }

  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  std::vector<double> params_;
};

/// softmax(net(flatten(features))). Throws NumericError on non-finite input
/// or parameters and InvalidConfig on a dimension mismatch.
Weights compute_weights(const CoordinatorFeatures& features, const WeightNet& net);

struct RankedEntry {
  std::string item_id;
  double fused_score = 0.0;
  AgentVector normalized{};     // per-agent min-max normalized score
  AgentVector contributions{};  // w_j * normalized_j; sums to fused_score
};

struct RankedList {
  std::vector<RankedEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> item_ids(std::size_t limit = SIZE_MAX) const;
  /// 0-based rank of the item, if present.
  std::optional<std::size_t> rank_of(const std::string& item_id) const;
};

/// Min-max to [0,1]; a constant vector maps to all 0.5.
std::vector<double> minmax_normalize(std::span<const double> scores);

/// Sorts by descending score, ties by ascending item id.
void sort_ranked(std::vector<RankedEntry>& entries);

/// fused_i = sum_j w_j * minmax(score_j)(i). Requires each agent exactly once
/// and every score vector aligned with item_ids.
RankedList fuse_scores(const Weights& weights, const std::vector<AgentScores>& agent_scores,
                       const std::vector<std::string>& item_ids);

/// One bounded inter-agent pass: the preference agent ingests the current
/// statements, then preference and ranking agents re-score. Conv and Ctx are
/// passed through. Returns the input untouched when there are no statements.
std::vector<AgentScores> refine_round(const std::vector<AgentScores>& outputs,
                                      const std::vector<Candidate>& candidates,
                                      const PreferenceProfile& profile, const ContextSnapshot& ctx,
                                      const std::vector<PreferenceStatement>& statements,
                                      const PreferenceConfig& pref_config = {},
                                      const AttentionGains& gains = {});

struct TurnReward {
  double reward = 0.0;
  AgentVector per_agent{};
  std::optional<std::string> accepted_item;
  /// Agent with the largest contribution to the accepted item.
  std::optional<AgentId> credited;
};

/// 1 if a liked or clicked item sits in the top k, else 0.
TurnReward turn_reward(const RankedList& ranked, const FeedbackSignal& feedback, std::size_t k);

struct RewardBaseline {
  double value = 0.0;
  double factor = 0.95;

  void observe(double reward) { value = factor * value + (1.0 - factor) * reward; }
};

struct UpdateConfig {
  double learning_rate = 0.05;
};

/// Gradient-bandit step on the gating network. The credited agent is the
/// reward's credited agent, or argmax w when the reward carries none. The
/// logits gradient is (reward - baseline) * (onehot - w). The baseline is
/// folded in after the step. Throws NumericError, leaving both arguments
/// untouched, if the step would produce non-finite parameters.
WeightNet update_net(const WeightNet& net, const CoordinatorFeatures& features, const Weights& w,
                     const TurnReward& reward, RewardBaseline& baseline,
                     const UpdateConfig& config = {});

}  // namespace agentrec
