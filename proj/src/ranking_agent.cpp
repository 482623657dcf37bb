#include "agentrec/ranking_agent.hpp"

#include <cmath>

namespace agentrec {

FactorWeights attention_weights(const PreferenceProfile& profile, const ContextSnapshot& ctx,
                                const AttentionGains& gains) {
  double ctx_magnitude = 0.0;
  for (const double v : ctx.features) ctx_magnitude += std::abs(v);
  if (!ctx.features.empty()) ctx_magnitude /= static_cast<double>(ctx.features.size());

  const std::array<double, 4> gate{profile_coverage(profile) * gains.gains[0],
                                   ctx_magnitude * gains.gains[1], gains.gains[2], gains.gains[3]};
  const auto soft = math::softmax(gate);
  FactorWeights w;
  for (std::size_t f = 0; f < 4; ++f) w.alpha[f] = soft[f];
  return w;
}

AgentScores score_candidates_rank(const std::vector<Candidate>& candidates,
                                  const PreferenceProfile& profile, const ContextSnapshot& ctx,
                                  const AttentionGains& gains) {
  const auto alpha = attention_weights(profile, ctx, gains);
  const auto pref = score_candidates_pref(profile, candidates);
  const auto context = score_candidates_ctx(ctx, candidates);
  AgentScores out{AgentId::Rank, std::vector<double>(candidates.size(), 0.0)};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.scores[i] = alpha[Factor::PreferenceFit] * pref.scores[i] +
                    alpha[Factor::ContextFit] * context.scores[i] +
                    alpha[Factor::Popularity] * candidates[i].popularity +
                    alpha[Factor::Novelty] * candidates[i].novelty;
  }
  return out;
}

}  // namespace agentrec
