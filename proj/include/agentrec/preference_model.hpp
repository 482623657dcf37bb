#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "agentrec/conversation_state.hpp"
#include "agentrec/types.hpp"

namespace agentrec {

struct ExplicitRating {
  std::string item_id;
  double value = 0.0;  // [0,1]
};

/// Feedback about the previously shown recommendations.
struct FeedbackSignal {
  std::optional<ExplicitRating> explicit_rating;
  std::vector<std::string> liked_items;
  std::vector<std::string> disliked_items;
  std::vector<std::string> clicks;
  std::map<std::string, std::int64_t> dwell_ms;

  bool empty() const {
    return !explicit_rating && liked_items.empty() && disliked_items.empty() && clicks.empty() &&
           dwell_ms.empty();
  }
};

struct PreferenceProfile {
  std::vector<double> weights;     // [-1, 1]^V
  std::vector<double> confidence;  // [0, 1]^V
  std::int64_t last_turn = -1;

  std::size_t size() const { return weights.size(); }
  friend bool operator==(const PreferenceProfile&, const PreferenceProfile&) = default;
};

struct PreferenceConfig {
  double decay = 0.9;            // lambda
  double explicit_gain = 0.3;    // eta_e
  double implicit_gain = 0.1;    // eta_i
  double confidence_gain = 0.5;  // kappa
  double click_weight = 0.5;
  double dwell_weight = 0.5;
  double dwell_saturation_ms = 30000.0;
};

/// Read-only lookup from item id to attribute vector.
class AttributeTable {
 public:
  AttributeTable() = default;
  explicit AttributeTable(const std::vector<Candidate>& catalog);

  std::size_t dimension() const { return dimension_; }
  const std::vector<double>* find(const std::string& item_id) const;

 private:
  std::unordered_map<std::string, std::vector<double>> attributes_;
  std::size_t dimension_ = 0;
};

/// Throws InvalidConfig when vocab_size == 0.
PreferenceProfile init_profile(std::size_t vocab_size);

/// One exponential-moving-average step of the preference profile.
///
///   w' = clamp(decay * w + explicit_gain * e + implicit_gain * i, -1, 1)
///   c' = 1 - (1 - c) * (1 - touched * confidence_gain)
///
/// e sums statement polarity*strength per attribute, +attrs for liked items,
/// -attrs for disliked items and (2r-1)*attrs for an explicit rating r.
/// i sums click_weight*attrs per click and
/// dwell_weight*min(dwell/saturation, 1)*attrs per dwell entry.
/// Items missing from the catalog are ignored.
PreferenceProfile update_profile(const PreferenceProfile& prev, const FeedbackSignal& feedback,
                                 const ConversationState& conv, const AttributeTable& catalog,
                                 const PreferenceConfig& config = {});

/// Same update restricted to the explicit statements, without decay. Used by
/// the refinement round to let the preference agent see the current turn.
PreferenceProfile ingest_statements(const PreferenceProfile& profile,
                                    const std::vector<PreferenceStatement>& statements,
                                    const PreferenceConfig& config = {});

double profile_coverage(const PreferenceProfile& profile);

/// Indices of the n largest weights, ties broken by lower index.
std::vector<std::size_t> top_attributes(const PreferenceProfile& profile, std::size_t n);

/// score_i = (weights . attrs_i) / (|attrs_i|_1 + 1e-9)
AgentScores score_candidates_pref(const PreferenceProfile& profile,
                                  const std::vector<Candidate>& candidates);

}  // namespace agentrec
