#include "agentrec/coordinator.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "agentrec/errors.hpp"
#include "agentrec/rng.hpp"

namespace agentrec {

namespace {

constexpr const char* kNetMagic = "agentrec-weightnet";
constexpr int kNetVersion = 1;

}  // namespace

// ---------------------------------------------------------------------------
// Features

void PerformanceHistory::push(const AgentVector& rewards) {
  rows_.push_back(rewards);
  while (rows_.size() > window_) rows_.pop_front();
}

std::vector<AgentVector> PerformanceHistory::rows() const {
  std::vector<AgentVector> out(window_ - rows_.size(), AgentVector{});
  out.insert(out.end(), rows_.begin(), rows_.end());
  return out;
}

std::vector<double> CoordinatorFeatures::flatten() const {
  std::vector<double> out = state_features;
  out.reserve(dimension());
  for (const auto& row : perf_history) out.insert(out.end(), row.begin(), row.end());
  return out;
}

CoordinatorFeatures make_coordinator_features(const ConversationState& state, double coverage,
                                              double complexity, const PerformanceHistory& history) {
  CoordinatorFeatures f;
  f.state_features = state.features;
  f.state_features.push_back(coverage);
  f.state_features.push_back(complexity);
  f.perf_history = history.rows();
  return f;
}

// ---------------------------------------------------------------------------
// WeightNet

WeightNet::WeightNet(std::size_t input_dim, std::size_t hidden_dim)
    : input_dim_(input_dim),
      hidden_dim_(hidden_dim),
      params_(input_dim * hidden_dim + hidden_dim + hidden_dim * kNumAgents + kNumAgents, 0.0) {
  if (input_dim == 0 || hidden_dim == 0) throw InvalidConfig("weight net dimensions must be positive");
}

WeightNet WeightNet::seeded(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed,
                            double scale) {
  WeightNet net(input_dim, hidden_dim);
  RandomStream rng(seed, "weightnet.init");
  const double bound = scale / std::sqrt(static_cast<double>(input_dim));
  for (std::size_t i = 0; i < input_dim; ++i) {
    for (std::size_t h = 0; h < hidden_dim; ++h) net.w1(i, h) = rng.uniform(-bound, bound);
  }
  return net;
}

AgentVector WeightNet::logits(std::span<const double> input) const {
  if (input.size() != input_dim_) {
    throw InvalidConfig("weight net expects " + std::to_string(input_dim_) + " inputs, got " +
                        std::to_string(input.size()));
  }
  std::vector<double> hidden(hidden_dim_);
  const double* w1 = params_.data();
  const double* b1 = w1 + input_dim_ * hidden_dim_;
  const double* w2 = b1 + hidden_dim_;
  const double* b2 = w2 + hidden_dim_ * kNumAgents;
  for (std::size_t h = 0; h < hidden_dim_; ++h) hidden[h] = b1[h];
  for (std::size_t i = 0; i < input_dim_; ++i) {
    const double x = input[i];
    if (x == 0.0) continue;
    for (std::size_t h = 0; h < hidden_dim_; ++h) hidden[h] += x * w1[i * hidden_dim_ + h];
  }
  AgentVector out{};
  for (std::size_t o = 0; o < kNumAgents; ++o) out[o] = b2[o];
  for (std::size_t h = 0; h < hidden_dim_; ++h) {
    const double a = std::tanh(hidden[h]);
    for (std::size_t o = 0; o < kNumAgents; ++o) out[o] += a * w2[h * kNumAgents + o];
  }
  return out;
}

std::vector<double> WeightNet::backprop(std::span<const double> input,
                                        const std::array<double, 4>& logit_grad) const {
  if (input.size() != input_dim_) throw InvalidConfig("weight net input dimension mismatch");
  const double* w1 = params_.data();
  const double* b1 = w1 + input_dim_ * hidden_dim_;
  const double* w2 = b1 + hidden_dim_;

  std::vector<double> act(hidden_dim_);
  for (std::size_t h = 0; h < hidden_dim_; ++h) act[h] = b1[h];
  for (std::size_t i = 0; i < input_dim_; ++i) {
    for (std::size_t h = 0; h < hidden_dim_; ++h) act[h] += input[i] * w1[i * hidden_dim_ + h];
  }
  for (double& a : act) a = std::tanh(a);

  std::vector<double> grad(params_.size(), 0.0);
  const std::size_t off_b1 = input_dim_ * hidden_dim_;
  const std::size_t off_w2 = off_b1 + hidden_dim_;
  const std::size_t off_b2 = off_w2 + hidden_dim_ * kNumAgents;

  for (std::size_t o = 0; o < kNumAgents; ++o) grad[off_b2 + o] = logit_grad[o];
  std::vector<double> pre_grad(hidden_dim_, 0.0);
  for (std::size_t h = 0; h < hidden_dim_; ++h) {
    double back = 0.0;
    for (std::size_t o = 0; o < kNumAgents; ++o) {
      grad[off_w2 + h * kNumAgents + o] = act[h] * logit_grad[o];
      back += w2[h * kNumAgents + o] * logit_grad[o];
    }
    pre_grad[h] = back * (1.0 - act[h] * act[h]);
    grad[off_b1 + h] = pre_grad[h];
  }
  for (std::size_t i = 0; i < input_dim_; ++i) {
    if (input[i] == 0.0) continue;
    for (std::size_t h = 0; h < hidden_dim_; ++h) grad[i * hidden_dim_ + h] = input[i] * pre_grad[h];
  }
  return grad;
}

std::vector<double> WeightNet::log_policy_gradient(std::span<const double> input, AgentId agent,
                                                   double advantage) const {
  const auto z = logits(input);
  const auto p = math::softmax(z);
  std::array<double, 4> g{};
  for (std::size_t o = 0; o < kNumAgents; ++o) {
    g[o] = advantage * ((o == static_cast<std::size_t>(agent) ? 1.0 : 0.0) - p[o]);
  }
  return backprop(input, g);
}

std::string WeightNet::serialize() const {
  std::ostringstream out;
  char buf[32];
  const auto emit_row = [&](const double* row, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  };
  out << kNetMagic << " v" << kNetVersion << '\n';
  out << input_dim_ << ' ' << hidden_dim_ << ' ' << kNumAgents << '\n';
  const double* p = params_.data();
  for (std::size_t i = 0; i < input_dim_; ++i) emit_row(p + i * hidden_dim_, hidden_dim_);
  p += input_dim_ * hidden_dim_;
  emit_row(p, hidden_dim_);
  p += hidden_dim_;
  for (std::size_t h = 0; h < hidden_dim_; ++h) emit_row(p + h * kNumAgents, kNumAgents);
  p += hidden_dim_ * kNumAgents;
  emit_row(p, kNumAgents);
  return out.str();
}

WeightNet WeightNet::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string magic, version;
  std::size_t input = 0, hidden = 0, output = 0;
  if (!(in >> magic >> version) || magic != kNetMagic) throw InvalidConfig("not a weight net file");
  if (version != "v" + std::to_string(kNetVersion)) throw InvalidConfig("unsupported weight net version " + version);
  if (!(in >> input >> hidden >> output) || output != kNumAgents) throw InvalidConfig("bad weight net header");
  WeightNet net(input, hidden);
  for (double& v : net.params_) {
    if (!(in >> v)) throw InvalidConfig("truncated weight net file");
  }
  return net;
}

void WeightNet::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write " + path.string());
  out << serialize();
}

WeightNet WeightNet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

Weights compute_weights(const CoordinatorFeatures& features, const WeightNet& net) {
  const auto x = features.flatten();
  if (!math::all_finite(x)) throw NumericError("non-finite coordinator feature");
  if (!math::all_finite(net.parameters())) throw NumericError("non-finite weight net parameter");
  const auto z = net.logits(x);
  const auto p = math::softmax(z);
  Weights w;
  std::copy(p.begin(), p.end(), w.w.begin());
  return w;
}

// ---------------------------------------------------------------------------
// Fusion

std::vector<std::string> RankedList::item_ids(std::size_t limit) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < entries.size() && i < limit; ++i) out.push_back(entries[i].item_id);
  return out;
}

std::optional<std::size_t> RankedList::rank_of(const std::string& item_id) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].item_id == item_id) return i;
  }
  return std::nullopt;
}

std::vector<double> minmax_normalize(std::span<const double> scores) {
  std::vector<double> out(scores.size(), 0.5);
  if (scores.empty()) return out;
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - *lo) / range;
  return out;
}

void sort_ranked(std::vector<RankedEntry>& entries) {
  // sort indices, then move entries once
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = entries[x];
    const auto& b = entries[y];
    if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
    return a.item_id < b.item_id;
  });
  std::vector<RankedEntry> sorted;
  sorted.reserve(entries.size());
  for (const auto i : order) sorted.push_back(std::move(entries[i]));
  entries = std::move(sorted);
}

RankedList fuse_scores(const Weights& weights, const std::vector<AgentScores>& agent_scores,
                       const std::vector<std::string>& item_ids) {
  std::array<const AgentScores*, kNumAgents> by_agent{};
  for (const auto& s : agent_scores) {
    auto& slot = by_agent[static_cast<std::size_t>(s.agent)];
    if (slot) throw InvalidConfig(std::string("duplicate scores for agent ") + to_string(s.agent));
    if (s.scores.size() != item_ids.size()) {
      throw InvalidConfig(std::string("agent ") + to_string(s.agent) + " scored " +
                          std::to_string(s.scores.size()) + " items, expected " +
                          std::to_string(item_ids.size()));
    }
    slot = &s;
  }
  for (std::size_t j = 0; j < kNumAgents; ++j) {
    if (!by_agent[j]) throw InvalidConfig(std::string("missing scores for agent ") + to_string(kAllAgents[j]));
  }

  std::array<std::vector<double>, kNumAgents> norm;
  for (std::size_t j = 0; j < kNumAgents; ++j) norm[j] = minmax_normalize(by_agent[j]->scores);

  RankedList out;
  out.entries.resize(item_ids.size());
  for (std::size_t i = 0; i < item_ids.size(); ++i) {
    auto& e = out.entries[i];
    e.item_id = item_ids[i];
    double fused = 0.0;
    for (std::size_t j = 0; j < kNumAgents; ++j) {
      e.normalized[j] = norm[j][i];
      e.contributions[j] = weights.w[j] * norm[j][i];
      fused += e.contributions[j];
    }
    e.fused_score = fused;
  }
  sort_ranked(out.entries);
  return out;
}

std::vector<AgentScores> refine_round(const std::vector<AgentScores>& outputs,
                                      const std::vector<Candidate>& candidates,
                                      const PreferenceProfile& profile, const ContextSnapshot& ctx,
                                      const std::vector<PreferenceStatement>& statements,
                                      const PreferenceConfig& pref_config,
                                      const AttentionGains& gains) {
  if (statements.empty()) return outputs;
  const auto refined = ingest_statements(profile, statements, pref_config);
  std::vector<AgentScores> out = outputs;
  for (auto& s : out) {
    if (s.agent == AgentId::Pref) s = score_candidates_pref(refined, candidates);
    if (s.agent == AgentId::Rank) s = score_candidates_rank(candidates, refined, ctx, gains);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reward and online update

TurnReward turn_reward(const RankedList& ranked, const FeedbackSignal& feedback, std::size_t k) {
  if (k == 0) throw InvalidConfig("k must be at least 1");
  TurnReward out;
  const std::size_t limit = std::min(k, ranked.size());
  const auto accepted = [&](const std::string& id) {
    return std::find(feedback.liked_items.begin(), feedback.liked_items.end(), id) !=
               feedback.liked_items.end() ||
           std::find(feedback.clicks.begin(), feedback.clicks.end(), id) != feedback.clicks.end();
  };
  for (std::size_t r = 0; r < limit; ++r) {
    const auto& e = ranked.entries[r];
    if (!accepted(e.item_id)) continue;
    out.reward = 1.0;
    out.accepted_item = e.item_id;
    out.per_agent = e.normalized;
    std::size_t best = 0;
    for (std::size_t j = 1; j < kNumAgents; ++j) {
      if (e.contributions[j] > e.contributions[best]) best = j;
    }
    out.credited = kAllAgents[best];
    break;
  }
  return out;
}

WeightNet update_net(const WeightNet& net, const CoordinatorFeatures& features, const Weights& w,
                     const TurnReward& reward, RewardBaseline& baseline, const UpdateConfig& config) {
  if (!(reward.reward >= 0.0 && reward.reward <= 1.0)) throw InvalidConfig("reward outside [0, 1]");
  std::size_t target = 0;
  if (reward.reward > 0.0 && reward.credited) {
    target = static_cast<std::size_t>(*reward.credited);
  } else {
    target = static_cast<std::size_t>(std::max_element(w.w.begin(), w.w.end()) - w.w.begin());
  }
  const double advantage = reward.reward - baseline.value;
  std::array<double, 4> logit_grad{};
  for (std::size_t o = 0; o < kNumAgents; ++o) {
    logit_grad[o] = advantage * ((o == target ? 1.0 : 0.0) - w.w[o]);
  }

  WeightNet next = net;
  if (advantage != 0.0) {
    const auto grad = net.backprop(features.flatten(), logit_grad);
    if (!math::all_finite(grad)) throw NumericError("non-finite weight net gradient");
    auto params = next.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) params[p] += config.learning_rate * grad[p];
    if (!math::all_finite(next.parameters())) throw NumericError("weight net update diverged");
  }
  baseline.observe(reward.reward);
  return next;
}

}  // namespace agentrec
