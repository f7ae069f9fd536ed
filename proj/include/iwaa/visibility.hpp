#pragma once
// Wall reconstruction and in-wall visibility bounds.
//
// Visibility over a window is the integral of exposure(t) * presence(t).
// Exposure is piecewise constant (it changes only at wall events) and
// presence is 1, 0 or a one-sided exponential between seeker posts, so the
// integral is computed exactly piece by piece.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iwaa/activity.hpp"
#include "iwaa/ingest.hpp"
#include "iwaa/roles.hpp"
#include "iwaa/roster.hpp"

namespace iwaa {

struct WallEvent {
    Timestamp t;
    std::string event_id;
    UserId author_id;
    std::optional<UserId> retweeted_author_id;
};

// Chronological merge of the seeker's friends' tweets and retweets; replies
// never enter the wall.
struct Wall {
    UserId seeker_id;
    std::vector<WallEvent> events;  // sorted by (t, event_id)
};

Wall build_wall(const UserId& seeker, const Roster& roster, const ActivityMap& activity);

// A wall event counts as the expert's content when the expert authored it or
// it is a retweet of the expert.
inline bool attributed_to(const WallEvent& e, const UserId& expert) {
    return e.author_id == expert ||
           (e.retweeted_author_id && *e.retweeted_author_id == expert);
}

struct ExposureParams {
    int wall_depth = 100;    // k: posts until exposure reaches zero
    int decay_exponent = 2;  // m
};

struct PresenceParams {
    double bandwidth_left_hours = 0.047;   // a_l
    double bandwidth_right_hours = 0.047;  // a_r
    double session_gap_seconds = 240.0;    // posts closer than this: online
};

// [1 - min(n, k)/k]^m for n posts since the expert's last wall entry.
double exposure(size_t n, const ExposureParams& p);

// Asymmetric Laplace kernel around the closest post; 1 between posts closer
// than the session gap. Zero when the seeker has no posts.
double presence_at(Timestamp t, const std::vector<Timestamp>& seeker_posts,
                   const PresenceParams& p);

// All post times of a user (every kind; likes have no timestamps).
std::vector<Timestamp> post_times(const ActivitySequence& seq);

struct Bounds {
    double lower_seconds = 0;
    double upper_seconds = 0;
};

// Exact integral of exposure * presence (lower) and exposure * 1 (upper)
// over [t1, t2). Exposure state carries over from wall history before t1;
// before the expert's first wall entry exposure is zero.
Bounds visibility_bounds(const Wall& wall, const UserId& expert_id,
                         const std::vector<Timestamp>& seeker_posts, Timestamp t1,
                         Timestamp t2, const ExposureParams& ep, const PresenceParams& pp);

struct VisibilityBound {
    UserId seeker_id;
    UserId expert_id;
    std::string list_id;
    int day_index = 0;  // 1..days, counted back from list creation
    double lower_seconds = 0;
    double upper_seconds = 0;
    bool followed = false;
};

// Daily bounds for the `days` 24-hour buckets before the pair's List
// creation time: bucket d covers [t_l - d*24h, t_l - (d-1)*24h).
std::vector<VisibilityBound> pair_day_bounds(const Wall& wall, const PairRow& pair,
                                             const std::vector<Timestamp>& seeker_posts,
                                             const ExposureParams& ep,
                                             const PresenceParams& pp, int days = 30);

enum class ExpertGroup { All, Followed, Unfollowed };

struct SeekerAverage {
    double mean_lower_seconds_per_day = 0;
    double mean_upper_seconds_per_day = 0;
    size_t cells = 0;  // (pair, day) cells averaged
};

// Arithmetic mean over (day, expert) cells per seeker; seekers with no
// expert in the group are absent from the result.
std::map<UserId, SeekerAverage> average_visibility(const std::vector<VisibilityBound>& bounds,
                                                   ExpertGroup group);

struct FriendsVisibilityRow {
    UserId seeker_id;
    size_t friend_count = 0;
    double mean_upper_seconds_per_day = 0;
};

std::vector<FriendsVisibilityRow> friends_vs_visibility(
    const std::map<UserId, SeekerAverage>& averages_all, const Roster& roster);

}  // namespace iwaa
