#include "iwaa/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iwaa {

Wall build_wall(const UserId& seeker, const Roster& roster, const ActivityMap& activity) {
    Wall wall;
    wall.seeker_id = seeker;
    for (const auto& friend_id : roster.friends_of(seeker)) {
        auto it = activity.find(friend_id);
        if (it == activity.end()) continue;
        for (const auto& e : it->second.events) {
            if (e.kind == PostKind::Reply) continue;
            wall.events.push_back({e.created_at, e.event_id, e.author_id, e.retweeted_author_id});
        }
    }
    std::sort(wall.events.begin(), wall.events.end(),
              [](const WallEvent& a, const WallEvent& b) {
                  if (a.t != b.t) return a.t < b.t;
                  return a.event_id < b.event_id;
              });
    return wall;
}

double exposure(size_t n, const ExposureParams& p) {
    if (p.wall_depth < 1 || p.decay_exponent < 1)
        throw ConfigError("exposure: k and m must be >= 1");
    const double k = static_cast<double>(p.wall_depth);
    const double clipped = std::min(static_cast<double>(n), k);
    return std::pow(1.0 - clipped / k, p.decay_exponent);
}

std::vector<Timestamp> post_times(const ActivitySequence& seq) {
    std::vector<Timestamp> out;
    out.reserve(seq.events.size());
    for (const auto& e : seq.events) out.push_back(e.created_at);
    return out;
}

namespace {

constexpr int64_t kFarPast = std::numeric_limits<int64_t>::min() / 4;
constexpr int64_t kFarFuture = std::numeric_limits<int64_t>::max() / 4;

// Presence between seeker posts is one of three shapes.
struct PresenceSegment {
    enum Kind { One, DecayRight, DecayLeft } kind;  // DecayRight: away from an
    // earlier post; DecayLeft: toward a later post.
    int64_t start_us;
    int64_t end_us;
    int64_t anchor_us;  // the post the kernel is centered on
};

// Covers (-inf, +inf). Empty when the seeker never posted (presence 0).
std::vector<PresenceSegment> presence_segments(const std::vector<Timestamp>& posts,
                                               const PresenceParams& p) {
    std::vector<PresenceSegment> segs;
    if (posts.empty()) return segs;
    const int64_t gap_us = static_cast<int64_t>(p.session_gap_seconds * 1e6);
    segs.push_back({PresenceSegment::DecayLeft, kFarPast, posts.front().us, posts.front().us});
    for (size_t i = 0; i + 1 < posts.size(); ++i) {
        const int64_t a = posts[i].us, b = posts[i + 1].us;
        if (b - a <= gap_us) {
            segs.push_back({PresenceSegment::One, a, b, a});
        } else {
            // at the midpoint both posts are equidistant; the earlier one wins
            const int64_t mid = a + (b - a) / 2;
            segs.push_back({PresenceSegment::DecayRight, a, mid, a});
            segs.push_back({PresenceSegment::DecayLeft, mid, b, b});
        }
    }
    segs.push_back({PresenceSegment::DecayRight, posts.back().us, kFarFuture, posts.back().us});
    return segs;
}

double seconds(int64_t us) { return static_cast<double>(us) * 1e-6; }

// Integral of the segment's presence over [u, v] (u, v inside the segment).
double presence_integral(const PresenceSegment& s, int64_t u, int64_t v,
                         const PresenceParams& p) {
    switch (s.kind) {
        case PresenceSegment::One:
            return seconds(v - u);
        case PresenceSegment::DecayRight: {
            const double a = p.bandwidth_right_hours * 3600.0;
            return a * (std::exp(-seconds(u - s.anchor_us) / a) -
                        std::exp(-seconds(v - s.anchor_us) / a));
        }
        case PresenceSegment::DecayLeft: {
            const double a = p.bandwidth_left_hours * 3600.0;
            return a * (std::exp(-seconds(s.anchor_us - v) / a) -
                        std::exp(-seconds(s.anchor_us - u) / a));
        }
    }
    return 0;
}

double presence_value(const PresenceSegment& s, int64_t t_us, const PresenceParams& p) {
    switch (s.kind) {
        case PresenceSegment::One:
            return 1.0;
        case PresenceSegment::DecayRight:
            return std::exp(-seconds(t_us - s.anchor_us) / (p.bandwidth_right_hours * 3600.0));
        case PresenceSegment::DecayLeft:
            return std::exp(-seconds(s.anchor_us - t_us) / (p.bandwidth_left_hours * 3600.0));
    }
    return 0;
}

// Exposure state while sweeping the wall: last expert entry and the count of
// other posts since it.
struct ExposureState {
    bool seen_expert = false;
    size_t n = 0;

    void apply(const WallEvent& e, const UserId& expert) {
        if (attributed_to(e, expert)) {
            seen_expert = true;
            n = 0;
        } else if (seen_expert) {
            ++n;
        }
    }
    double value(const ExposureParams& p) const {
        return seen_expert ? exposure(n, p) : 0.0;
    }
};

}  // namespace

double presence_at(Timestamp t, const std::vector<Timestamp>& seeker_posts,
                   const PresenceParams& p) {
    if (p.bandwidth_left_hours <= 0 || p.bandwidth_right_hours <= 0 ||
        p.session_gap_seconds <= 0)
        throw ConfigError("presence: bandwidths and session gap must be positive");
    const auto segs = presence_segments(seeker_posts, p);
    if (segs.empty()) return 0.0;
    // last segment with start <= t (boundaries belong to the earlier segment,
    // where both branches agree anyway)
    auto it = std::upper_bound(segs.begin(), segs.end(), t.us,
                               [](int64_t v, const PresenceSegment& s) { return v < s.start_us; });
    if (it != segs.begin()) --it;
    return presence_value(*it, t.us, p);
}

Bounds visibility_bounds(const Wall& wall, const UserId& expert_id,
                         const std::vector<Timestamp>& seeker_posts, Timestamp t1,
                         Timestamp t2, const ExposureParams& ep, const PresenceParams& pp) {
    if (t2 < t1) throw ConfigError("visibility_bounds: inverted window");
    if (pp.bandwidth_left_hours <= 0 || pp.bandwidth_right_hours <= 0 ||
        pp.session_gap_seconds <= 0)
        throw ConfigError("visibility_bounds: bad presence params");

    const auto segs = presence_segments(seeker_posts, pp);

    // Breakpoints: window edges, wall events (exposure changes) and presence
    // segment boundaries inside the window.
    std::vector<int64_t> bps;
    bps.push_back(t1.us);
    bps.push_back(t2.us);
    for (const auto& e : wall.events)
        if (t1.us < e.t.us && e.t.us < t2.us) bps.push_back(e.t.us);
    for (const auto& s : segs)
        if (t1.us < s.start_us && s.start_us < t2.us) bps.push_back(s.start_us);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    ExposureState state;
    size_t ev = 0;
    while (ev < wall.events.size() && wall.events[ev].t.us < t1.us)
        state.apply(wall.events[ev++], expert_id);

    size_t seg = 0;
    Bounds out;
    for (size_t i = 0; i + 1 < bps.size(); ++i) {
        const int64_t u = bps[i], v = bps[i + 1];
        while (ev < wall.events.size() && wall.events[ev].t.us <= u)
            state.apply(wall.events[ev++], expert_id);
        const double f = state.value(ep);
        if (f == 0.0) continue;
        out.upper_seconds += f * seconds(v - u);
        if (!segs.empty()) {
            while (seg + 1 < segs.size() && segs[seg].end_us <= u) ++seg;
            out.lower_seconds += f * presence_integral(segs[seg], u, v, pp);
        }
    }
    return out;
}

std::vector<VisibilityBound> pair_day_bounds(const Wall& wall, const PairRow& pair,
                                             const std::vector<Timestamp>& seeker_posts,
                                             const ExposureParams& ep,
                                             const PresenceParams& pp, int days) {
    std::vector<VisibilityBound> out;
    out.reserve(days);
    for (int d = 1; d <= days; ++d) {
        const Timestamp lo = pair.list_created_at - Duration::from_days(d);
        const Timestamp hi = pair.list_created_at - Duration::from_days(d - 1);
        const Bounds b = visibility_bounds(wall, pair.expert_id, seeker_posts, lo, hi, ep, pp);
        out.push_back({pair.seeker_id, pair.expert_id, pair.list_id, d, b.lower_seconds,
                       b.upper_seconds, pair.seeker_follows_expert});
    }
    return out;
}

std::map<UserId, SeekerAverage> average_visibility(const std::vector<VisibilityBound>& bounds,
                                                   ExpertGroup group) {
    std::map<UserId, SeekerAverage> acc;
    for (const auto& b : bounds) {
        if (group == ExpertGroup::Followed && !b.followed) continue;
        if (group == ExpertGroup::Unfollowed && b.followed) continue;
        auto& a = acc[b.seeker_id];
        a.mean_lower_seconds_per_day += b.lower_seconds;
        a.mean_upper_seconds_per_day += b.upper_seconds;
        ++a.cells;
    }
    for (auto& [_, a] : acc) {
        a.mean_lower_seconds_per_day /= static_cast<double>(a.cells);
        a.mean_upper_seconds_per_day /= static_cast<double>(a.cells);
    }
    return acc;
}

std::vector<FriendsVisibilityRow> friends_vs_visibility(
    const std::map<UserId, SeekerAverage>& averages_all, const Roster& roster) {
    std::vector<FriendsVisibilityRow> rows;
    for (const auto& [seeker, avg] : averages_all)
        rows.push_back({seeker, roster.friend_count(seeker), avg.mean_upper_seconds_per_day});
    return rows;
}

}  // namespace iwaa
