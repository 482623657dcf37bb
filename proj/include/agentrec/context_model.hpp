#pragma once

#include <string_view>
#include <vector>

#include "agentrec/types.hpp"

namespace agentrec {

enum class TimeBucket { Morning = 0, Afternoon, Evening, Night };
enum class LocationTag { Home = 0, Work, Transit, Other };
enum class SocialSetting { Alone = 0, WithFriends, WithFamily };

const char* to_string(TimeBucket v);
const char* to_string(LocationTag v);
const char* to_string(SocialSetting v);
TimeBucket time_bucket_from_string(std::string_view s);
LocationTag location_from_string(std::string_view s);
SocialSetting social_from_string(std::string_view s);

/// Maps an hour of day (0-23) to a bucket.
TimeBucket time_bucket_for_hour(int hour);

/// One-hot time (4) + one-hot location (4) + one-hot social (3) + mood.
inline constexpr std::size_t kContextDim = 12;

struct ContextSnapshot {
  TimeBucket time_bucket = TimeBucket::Morning;
  LocationTag location_tag = LocationTag::Home;
  SocialSetting social_setting = SocialSetting::Alone;
  double mood = 0.0;
  std::vector<double> features;

  friend bool operator==(const ContextSnapshot&, const ContextSnapshot&) = default;
};

/// Throws InvalidContext unless mood is in [-1, 1].
ContextSnapshot snapshot_context(TimeBucket time, LocationTag location, SocialSetting social,
                                 double mood);

/// score_i = (ctx.features . context_affinity_i) / kContextDim
AgentScores score_candidates_ctx(const ContextSnapshot& ctx, const std::vector<Candidate>& candidates);

}  // namespace agentrec
