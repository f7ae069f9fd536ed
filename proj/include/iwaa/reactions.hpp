#pragma once
// Binary reaction indicators seeker -> expert, per-seeker averages, and the
// inverse empirical CDF (survival) curves used by the reports.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iwaa/activity.hpp"
#include "iwaa/roster.hpp"

namespace iwaa {

enum class ReactionKind { Retweet, Like, Answer, Follow };

inline const char* to_string(ReactionKind k) {
    switch (k) {
        case ReactionKind::Retweet: return "retweet";
        case ReactionKind::Like: return "like";
        case ReactionKind::Answer: return "answer";
        case ReactionKind::Follow: return "follow";
    }
    return "?";
}

// 1 iff the seeker reacted to the expert within [t1, t2). The Like window
// applies to post_created_at (like times are unobservable); Follow is static
// and window-independent.
bool indicator(const ActivitySequence& seeker_activity, const UserId& seeker_id,
               const UserId& expert_id, ReactionKind kind, const Roster& roster,
               Timestamp t1, Timestamp t2);

struct PerExpertIndicators {
    bool retweet = false;
    bool like = false;
    bool answer = false;
    bool follow = false;
};

struct ReactionProfile {
    UserId seeker_id;
    size_t n_experts = 0;
    double avg_retweet = 0;
    double avg_like = 0;
    double avg_answer = 0;
    double avg_follow = 0;
    double effortless = 0;  // mean over experts of (retweet OR like)
};

// Aggregates already-computed per-expert indicators. Throws ConfigError when
// the expert set is empty (undefined average).
ReactionProfile profile_from_indicators(
    const UserId& seeker_id, const std::map<UserId, PerExpertIndicators>& by_expert);

// Convenience: computes all four indicators per expert over a single window,
// then aggregates.
ReactionProfile profile(const ActivitySequence& seeker_activity, const UserId& seeker_id,
                        const std::set<UserId>& experts, const Roster& roster,
                        Timestamp t1, Timestamp t2);

// Survival curve: curve(v) = fraction of the population with metric >= v.
struct ICDFCurve {
    std::vector<double> support;   // distinct values, ascending
    std::vector<double> survival;  // same length; non-increasing; front() == 1
    std::vector<double> sorted_values;  // all values incl. duplicates, ascending

    double at(double v) const;  // count(>= v) / n for arbitrary v
};

ICDFCurve icdf(std::vector<double> values);  // throws ConfigError on empty input

}  // namespace iwaa
