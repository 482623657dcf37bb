#include "agentrec/preference_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agentrec/errors.hpp"

namespace agentrec {

namespace {

constexpr double kL1Epsilon = 1e-9;

void add_scaled(std::vector<double>& acc, std::vector<bool>& touched, const std::vector<double>& v,
                double scale) {
  for (std::size_t a = 0; a < acc.size(); ++a) {
    if (v[a] == 0.0 || scale == 0.0) continue;
    acc[a] += scale * v[a];
    touched[a] = true;
  }
}

}  // namespace

AttributeTable::AttributeTable(const std::vector<Candidate>& catalog) {
  for (const auto& c : catalog) {
    if (dimension_ == 0) dimension_ = c.attributes.size();
    if (c.attributes.size() != dimension_) {
      throw InvalidConfig("item " + c.item_id + " has inconsistent attribute dimension");
    }
    attributes_[c.item_id] = c.attributes;
  }
}

const std::vector<double>* AttributeTable::find(const std::string& item_id) const {
  const auto it = attributes_.find(item_id);
  return it == attributes_.end() ? nullptr : &it->second;
}

PreferenceProfile init_profile(std::size_t vocab_size) {
  if (vocab_size == 0) throw InvalidConfig("vocabulary size must be at least 1");
  return {std::vector<double>(vocab_size, 0.0), std::vector<double>(vocab_size, 0.0), -1};
}

PreferenceProfile update_profile(const PreferenceProfile& prev, const FeedbackSignal& feedback,
                                 const ConversationState& conv, const AttributeTable& catalog,
                                 const PreferenceConfig& config) {
  const std::size_t dim = prev.weights.size();
  if (prev.confidence.size() != dim) throw InvalidConfig("profile weight/confidence length mismatch");
  if (catalog.dimension() != 0 && catalog.dimension() != dim) {
    throw InvalidConfig("profile has " + std::to_string(dim) + " attributes, catalog has " +
                        std::to_string(catalog.dimension()));
  }

  std::vector<double> explicit_part(dim, 0.0);
  std::vector<double> implicit_part(dim, 0.0);
  std::vector<bool> touched(dim, false);

  for (const auto& s : conv.statements) {
    if (s.attribute_id >= dim) throw InvalidConfig("statement attribute out of range");
    explicit_part[s.attribute_id] += s.polarity * s.strength;
    touched[s.attribute_id] = true;
  }
  const auto project = [&](const std::string& item, std::vector<double>& acc, double scale) {
    if (const auto* attrs = catalog.find(item)) add_scaled(acc, touched, *attrs, scale);
  };
  for (const auto& item : feedback.liked_items) project(item, explicit_part, 1.0);
  for (const auto& item : feedback.disliked_items) project(item, explicit_part, -1.0);
  if (feedback.explicit_rating) {
    project(feedback.explicit_rating->item_id, explicit_part,
            2.0 * std::clamp(feedback.explicit_rating->value, 0.0, 1.0) - 1.0);
  }
  for (const auto& item : feedback.clicks) project(item, implicit_part, config.click_weight);
  for (const auto& [item, ms] : feedback.dwell_ms) {
    const double sat = std::min(static_cast<double>(std::max<std::int64_t>(ms, 0)) / config.dwell_saturation_ms, 1.0);
    project(item, implicit_part, config.dwell_weight * sat);
  }

  PreferenceProfile next;
  next.weights.resize(dim);
  next.confidence.resize(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double w = config.decay * prev.weights[a] + config.explicit_gain * explicit_part[a] +
                     config.implicit_gain * implicit_part[a];
    next.weights[a] = std::clamp(w, -1.0, 1.0);
    const double t = touched[a] ? config.confidence_gain : 0.0;
    next.confidence[a] = std::clamp(1.0 - (1.0 - prev.confidence[a]) * (1.0 - t), 0.0, 1.0);
  }
  next.last_turn = static_cast<std::int64_t>(conv.turn_index);
  return next;
}

PreferenceProfile ingest_statements(const PreferenceProfile& profile,
                                    const std::vector<PreferenceStatement>& statements,
                                    const PreferenceConfig& config) {
  PreferenceProfile out = profile;
  for (const auto& s : statements) {
    if (s.attribute_id >= out.weights.size()) continue;
    auto& w = out.weights[s.attribute_id];
    w = std::clamp(w + config.explicit_gain * s.polarity * s.strength, -1.0, 1.0);
  }
  return out;
}

double profile_coverage(const PreferenceProfile& profile) {
  if (profile.confidence.empty()) return 0.0;
  return std::accumulate(profile.confidence.begin(), profile.confidence.end(), 0.0) /
         static_cast<double>(profile.confidence.size());
}

std::vector<std::size_t> top_attributes(const PreferenceProfile& profile, std::size_t n) {
  std::vector<std::size_t> idx(profile.weights.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return profile.weights[a] > profile.weights[b];
  });
  idx.resize(std::min(n, idx.size()));
  return idx;
}

AgentScores score_candidates_pref(const PreferenceProfile& profile,
                                  const std::vector<Candidate>& candidates) {
  AgentScores out{AgentId::Pref, std::vector<double>(candidates.size(), 0.0)};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& attrs = candidates[i].attributes;
    if (attrs.size() != profile.weights.size()) {
      throw InvalidConfig("candidate " + candidates[i].item_id + " attribute dimension mismatch");
    }
    double l1 = 0.0;
    for (const double v : attrs) l1 += std::abs(v);
    out.scores[i] = math::dot(profile.weights, attrs) / (l1 + kL1Epsilon);
  }
  return out;
}

}  // namespace agentrec
