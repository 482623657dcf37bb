#include "agentrec/context_model.hpp"

#include <cmath>
#include <string>

#include "agentrec/errors.hpp"

namespace agentrec {

namespace {

constexpr const char* kTimeNames[] = {"Morning", "Afternoon", "Evening", "Night"};
constexpr const char* kLocationNames[] = {"Home", "Work", "Transit", "Other"};
constexpr const char* kSocialNames[] = {"Alone", "WithFriends", "WithFamily"};

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const char* const (&names)[N], const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (s == names[i]) return static_cast<E>(i);
  }
  throw InvalidContext(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

}  // namespace

const char* to_string(TimeBucket v) { return kTimeNames[static_cast<int>(v)]; }
const char* to_string(LocationTag v) { return kLocationNames[static_cast<int>(v)]; }
const char* to_string(SocialSetting v) { return kSocialNames[static_cast<int>(v)]; }

TimeBucket time_bucket_from_string(std::string_view s) {
  return parse_enum<TimeBucket>(s, kTimeNames, "time bucket");
}
LocationTag location_from_string(std::string_view s) {
  return parse_enum<LocationTag>(s, kLocationNames, "location tag");
}
SocialSetting social_from_string(std::string_view s) {
  return parse_enum<SocialSetting>(s, kSocialNames, "social setting");
}

TimeBucket time_bucket_for_hour(int hour) {
  hour = ((hour % 24) + 24) % 24;
  if (hour >= 5 && hour < 12) return TimeBucket::Morning;
  if (hour >= 12 && hour < 17) return TimeBucket::Afternoon;
  if (hour >= 17 && hour < 22) return TimeBucket::Evening;
  return TimeBucket::Night;
}

ContextSnapshot snapshot_context(TimeBucket time, LocationTag location, SocialSetting social,
                                 double mood) {
  if (!(mood >= -1.0 && mood <= 1.0)) {
    throw InvalidContext("mood " + std::to_string(mood) + " outside [-1, 1]");
  }
  ContextSnapshot snap{time, location, social, mood, std::vector<double>(kContextDim, 0.0)};
  snap.features[static_cast<std::size_t>(time)] = 1.0;
  snap.features[4 + static_cast<std::size_t>(location)] = 1.0;
  snap.features[8 + static_cast<std::size_t>(social)] = 1.0;
  snap.features[11] = mood;
  return snap;
}

AgentScores score_candidates_ctx(const ContextSnapshot& ctx, const std::vector<Candidate>& candidates) {
  if (ctx.features.size() != kContextDim) throw InvalidConfig("context snapshot has wrong dimension");
  AgentScores out{AgentId::Ctx, std::vector<double>(candidates.size(), 0.0)};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& aff = candidates[i].context_affinity;
    if (aff.size() != kContextDim) {
      throw InvalidConfig("candidate " + candidates[i].item_id + " context affinity has length " +
                          std::to_string(aff.size()));
    }
    out.scores[i] = math::dot(ctx.features, aff) / static_cast<double>(kContextDim);
  }
  return out;
}

}  // namespace agentrec
