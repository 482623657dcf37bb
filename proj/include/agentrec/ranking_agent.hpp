#pragma once

#include <array>
#include <vector>

#include "agentrec/context_model.hpp"
#include "agentrec/preference_model.hpp"
#include "agentrec/types.hpp"

namespace agentrec {

enum class Factor { PreferenceFit = 0, ContextFit, Popularity, Novelty };

struct FactorWeights {
  std::array<double, 4> alpha{0.25, 0.25, 0.25, 0.25};

  double operator[](Factor f) const { return alpha[static_cast<std::size_t>(f)]; }
};

/// Gains applied to the four gate inputs before the softmax.
struct AttentionGains {
  std::array<double, 4> gains{2.0, 2.0, 0.5, 0.5};
};

/// alpha = softmax([coverage * g0, mean|ctx| * g1, g2, g3])
FactorWeights attention_weights(const PreferenceProfile& profile, const ContextSnapshot& ctx,
                                const AttentionGains& gains = {});

/// score_i = alpha . [pref_fit_i, ctx_fit_i, popularity_i, novelty_i]
AgentScores score_candidates_rank(const std::vector<Candidate>& candidates,
                                  const PreferenceProfile& profile, const ContextSnapshot& ctx,
                                  const AttentionGains& gains = {});

}  // namespace agentrec
