#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace agentrec {

/// The four scoring agents, in the fixed order used by every 4-vector.
enum class AgentId { Conv = 0, Pref = 1, Ctx = 2, Rank = 3 };

inline constexpr std::size_t kNumAgents = 4;
inline constexpr std::array<AgentId, kNumAgents> kAllAgents = {
    AgentId::Conv, AgentId::Pref, AgentId::Ctx, AgentId::Rank};

const char* to_string(AgentId id);

/// One agent's scores, aligned to the candidate list it was computed from.
struct AgentScores {
  AgentId agent = AgentId::Conv;
  std::vector<double> scores;

  friend bool operator==(const AgentScores&, const AgentScores&) = default;
};

/// Candidate item. Attribute and context-affinity vectors are dense.
struct Candidate {
  std::string item_id;
  std::string name;
  std::vector<double> attributes;         // [0,1]^V
  std::vector<double> context_affinity;   // length kContextDim
  double popularity = 0.0;
  double novelty = 0.0;
};

namespace math {

/// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> logits);

double dot(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> v);

}  // namespace math

}  // namespace agentrec
