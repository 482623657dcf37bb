#pragma once

#include <array>
#include <cstdint>
#include <list>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agentrec/conversation_state.hpp"
#include "agentrec/coordinator.hpp"
#include "agentrec/preference_model.hpp"

namespace agentrec {

enum class Tier { Rapid = 0, Reasoning = 1, DeepCollab = 2 };

const char* to_string(Tier tier);
Tier tier_from_string(std::string_view s);

struct ComplexityWeights {
  std::array<double, 3> beta{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::size_t turn_horizon = 20;
};

struct ComplexityScore {
  double value = 0.0;
  double history_len_norm = 0.0;
  double profile_incompleteness = 0.0;
  double ambiguity = 0.0;
};

/// Shannon entropy of the intent distribution divided by ln 5.
double normalized_intent_entropy(const IntentDistribution& intent);

/// c1 = min(turn / horizon, 1), c2 = 1 - coverage, c3 = normalized intent
/// entropy; value = beta . c.
ComplexityScore complexity_score(const ConversationState& conv, const PreferenceProfile& profile,
                                 const ComplexityWeights& weights = {});

/// Same formula from raw inputs.
ComplexityScore complexity_from_parts(std::size_t turn_index, double coverage,
                                      const IntentDistribution& intent,
                                      const ComplexityWeights& weights = {});

struct Thresholds {
  double rapid_upper = 0.4;      // tau1
  double reasoning_upper = 0.8;  // tau2
};

struct TierDecision {
  Tier tier = Tier::Rapid;
  ComplexityScore score;
  bool cache_hit = false;
};

/// value < tau1 -> Rapid, value < tau2 -> Reasoning, else DeepCollab.
/// Throws InvalidConfig unless 0 <= tau1 < tau2 <= 1.
TierDecision route(const ComplexityScore& score, const Thresholds& thresholds);

struct TierTargets {
  double rapid = 0.70;
  double reasoning = 0.25;
  double deep = 0.05;
};

/// Nearest-rank percentiles: tau is the smallest sample value with at least
/// the target fraction of the sample strictly below it.
/// Throws InvalidConfig for fewer than 100 values or degenerate thresholds.
Thresholds calibrate_thresholds(std::span<const double> sample, const TierTargets& targets = {});

/// Fraction of the sample routed to each tier.
std::array<double, 3> tier_fractions(std::span<const double> sample, const Thresholds& thresholds);

/// Signature of a Rapid-tier query: normalized utterance tokens plus the
/// three strongest profile attributes.
std::uint64_t query_signature(std::string_view text, const PreferenceProfile& profile);

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t invalidations = 0;

  double hit_rate() const {
    const auto total = hits + misses;
    return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
  }
};

/// Shared LRU of Rapid-tier results. An entry is dropped on lookup when the
/// caller's profile coverage has moved more than `coverage_tolerance` since
/// the entry was stored.
class ResponseCache {
 public:
  explicit ResponseCache(std::size_t capacity = 1024, double coverage_tolerance = 0.1);

  std::optional<RankedList> get(std::uint64_t signature, double coverage);
  void put(std::uint64_t signature, RankedList ranked, double coverage);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  CacheStats stats() const;
  void clear();

 private:
  struct Entry {
    std::uint64_t signature;
    RankedList ranked;
    double coverage;
  };

  mutable std::mutex mutex_;
  std::size_t capacity_;
  double coverage_tolerance_;
  std::list<Entry> lru_;  // front = most recently used
  std::unordered_map<std::uint64_t, std::list<Entry>::iterator> index_;
  CacheStats stats_;
};

}  // namespace agentrec
