#include "agentrec/tier_router.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agentrec/errors.hpp"

namespace agentrec {

const char* to_string(Tier tier) {
  switch (tier) {
    case Tier::Rapid: return "Rapid";
    case Tier::Reasoning: return "Reasoning";
    case Tier::DeepCollab: return "DeepCollab";
  }
  return "Unknown";
}

Tier tier_from_string(std::string_view s) {
  if (s == "Rapid") return Tier::Rapid;
  if (s == "Reasoning") return Tier::Reasoning;
  if (s == "DeepCollab") return Tier::DeepCollab;
  throw InvalidConfig("unknown tier '" + std::string(s) + "'");
}

double normalized_intent_entropy(const IntentDistribution& intent) {
  double h = 0.0;
  for (const double p : intent.probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::clamp(h / std::log(static_cast<double>(kNumIntents)), 0.0, 1.0);
}

ComplexityScore complexity_from_parts(std::size_t turn_index, double coverage,
                                      const IntentDistribution& intent,
                                      const ComplexityWeights& weights) {
  ComplexityScore s;
  s.history_len_norm =
      std::min(static_cast<double>(turn_index) / static_cast<double>(weights.turn_horizon), 1.0);
  s.profile_incompleteness = std::clamp(1.0 - coverage, 0.0, 1.0);
  s.ambiguity = normalized_intent_entropy(intent);
  s.value = weights.beta[0] * s.history_len_norm + weights.beta[1] * s.profile_incompleteness +
            weights.beta[2] * s.ambiguity;
  s.value = std::clamp(s.value, 0.0, 1.0);
  return s;
}

ComplexityScore complexity_score(const ConversationState& conv, const PreferenceProfile& profile,
                                 const ComplexityWeights& weights) {
  return complexity_from_parts(conv.turn_index, profile_coverage(profile), conv.intent, weights);
}

TierDecision route(const ComplexityScore& score, const Thresholds& t) {
  if (!(t.rapid_upper >= 0.0 && t.rapid_upper < t.reasoning_upper && t.reasoning_upper <= 1.0)) {
    throw InvalidConfig("thresholds must satisfy 0 <= tau1 < tau2 <= 1, got (" +
                        std::to_string(t.rapid_upper) + ", " + std::to_string(t.reasoning_upper) + ")");
  }
  TierDecision d;
  d.score = score;
  if (score.value < t.rapid_upper) {
    d.tier = Tier::Rapid;
  } else if (score.value < t.reasoning_upper) {
    d.tier = Tier::Reasoning;
  } else {
    d.tier = Tier::DeepCollab;
  }
  return d;
}

namespace {

double nearest_rank(const std::vector<double>& sorted, double fraction) {
  const double pos = std::ceil(fraction * static_cast<double>(sorted.size()) - 1e-9);
  const auto idx = static_cast<std::size_t>(std::max(pos, 0.0));
  return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace

Thresholds calibrate_thresholds(std::span<const double> sample, const TierTargets& targets) {
  if (sample.size() < 100) {
    throw InvalidConfig("calibration needs at least 100 complexity values, got " +
                        std::to_string(sample.size()));
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  Thresholds t{nearest_rank(sorted, targets.rapid),
               nearest_rank(sorted, targets.rapid + targets.reasoning)};
  if (!(t.rapid_upper < t.reasoning_upper)) {
    throw InvalidConfig("degenerate calibration sample: tau1 = tau2 = " + std::to_string(t.rapid_upper));
  }
  return t;
}

std::array<double, 3> tier_fractions(std::span<const double> sample, const Thresholds& thresholds) {
  std::array<double, 3> counts{};
  for (const double v : sample) {
    ComplexityScore s;
    s.value = v;
    counts[static_cast<std::size_t>(route(s, thresholds).tier)] += 1.0;
  }
  if (!sample.empty()) {
    for (double& c : counts) c /= static_cast<double>(sample.size());
  }
  return counts;
}

std::uint64_t query_signature(std::string_view text, const PreferenceProfile& profile) {
  std::string key;
  for (const auto& token : tokenize(text)) {
    key += token;
    key.push_back(' ');
  }
  key.push_back('|');
  for (const auto a : top_attributes(profile, 3)) {
    key += std::to_string(a);
    key.push_back(',');
  }
  return hash_token(key);
}

// ---------------------------------------------------------------------------

ResponseCache::ResponseCache(std::size_t capacity, double coverage_tolerance)
    : capacity_(capacity), coverage_tolerance_(coverage_tolerance) {
  if (capacity == 0) throw InvalidConfig("cache capacity must be positive");
}

std::optional<RankedList> ResponseCache::get(std::uint64_t signature, double coverage) {
  std::lock_guard lock(mutex_);
  const auto it = index_.find(signature);
  if (it == index_.end()) {
    ++stats_.misses;
    return std::nullopt;
  }
  if (std::abs(it->second->coverage - coverage) > coverage_tolerance_) {
    lru_.erase(it->second);
    index_.erase(it);
    ++stats_.invalidations;
    ++stats_.misses;
    return std::nullopt;
  }
  lru_.splice(lru_.begin(), lru_, it->second);
  ++stats_.hits;
  return it->second->ranked;
}

void ResponseCache::put(std::uint64_t signature, RankedList ranked, double coverage) {
  std::lock_guard lock(mutex_);
  if (const auto it = index_.find(signature); it != index_.end()) {
    it->second->ranked = std::move(ranked);
    it->second->coverage = coverage;
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  lru_.push_front({signature, std::move(ranked), coverage});
  index_[signature] = lru_.begin();
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().signature);
    lru_.pop_back();
    ++stats_.evictions;
  }
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return lru_.size();
}

CacheStats ResponseCache::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

void ResponseCache::clear() {
  std::lock_guard lock(mutex_);
  lru_.clear();
  index_.clear();
}

}  // namespace agentrec
