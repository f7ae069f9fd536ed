#pragma once
// Crowd-knowledge role identification: experts from List listing counts,
// seekers from List creators after filtering, and the pair table.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iwaa/activity.hpp"
#include "iwaa/roster.hpp"

namespace iwaa {

struct ExpertThreshold {
    size_t min_listings = 10;
};

struct FilterPolicy {
    size_t max_friends = 5000;  // "over 5000" is strict: 5000 friends is kept
    bool require_posts = true;
    bool require_likes = true;
    bool exclude_private = true;
    size_t min_friends = 1;
};

struct PairRow {
    UserId seeker_id;
    UserId expert_id;
    std::string topic;
    std::string list_id;
    Timestamp list_created_at;
    bool seeker_follows_expert = false;

    bool operator==(const PairRow&) const = default;
};

struct PairTable {
    std::vector<PairRow> rows;  // sorted by (seeker, expert, list_id)
};

using ActivityMapRef = std::map<UserId, ActivitySequence>;

// u is an expert on a topic iff the number of distinct Lists of that topic
// containing u is >= th.min_listings.
std::map<std::string, std::set<UserId>> identify_experts(
    const std::vector<ListRecord>& lists, const ExpertThreshold& th);

struct FilterResult {
    std::set<UserId> kept;
    std::map<UserId, std::string> dropped;  // reason: first matching rule in
    // fixed order: unknown-user, private, no-posts, no-likes, no-friends,
    // too-many-friends
};

FilterResult filter_seekers(const std::set<UserId>& creators, const Roster& roster,
                            const ActivityMapRef& activity, const FilterPolicy& policy);

// One row per (seeker, expert, List): a kept seeker created a List of topic T
// and a member of that List is an expert on T.
PairTable build_pairs(const std::vector<ListRecord>& lists,
                      const std::map<std::string, std::set<UserId>>& experts_by_topic,
                      const std::set<UserId>& kept_seekers, const Roster& roster);

}  // namespace iwaa
