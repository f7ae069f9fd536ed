#include "iwaa/roles.hpp"

#include <algorithm>

namespace iwaa {

std::map<std::string, std::set<UserId>> identify_experts(
    const std::vector<ListRecord>& lists, const ExpertThreshold& th) {
    // distinct Lists per (topic, user); a user can be counted once per List
    std::map<std::string, std::map<UserId, std::set<std::string>>> listings;
    for (const auto& rec : lists)
        for (const auto& m : rec.member_ids)
            listings[rec.topic][m].insert(rec.list_id);

    std::map<std::string, std::set<UserId>> out;
    for (const auto& [topic, per_user] : listings) {
        auto& experts = out[topic];
        for (const auto& [user, list_ids] : per_user)
            if (list_ids.size() >= th.min_listings) experts.insert(user);
        if (experts.empty()) out.erase(topic);
    }
    return out;
}

FilterResult filter_seekers(const std::set<UserId>& creators, const Roster& roster,
                            const ActivityMapRef& activity, const FilterPolicy& policy) {
    FilterResult res;
    for (const auto& u : creators) {
        auto it = roster.users.find(u);
        if (it == roster.users.end()) {
            res.dropped[u] = "unknown-user";
            continue;
        }
        if (policy.exclude_private && it->second.is_private) {
            res.dropped[u] = "private";
            continue;
        }
        auto act = activity.find(u);
        const size_t n_posts = act == activity.end() ? 0 : act->second.events.size();
        const size_t n_likes = act == activity.end() ? 0 : act->second.likes.size();
        if (policy.require_posts && n_posts == 0) {
            res.dropped[u] = "no-posts";
            continue;
        }
        if (policy.require_likes && n_likes == 0) {
            res.dropped[u] = "no-likes";
            continue;
        }
        const size_t n_friends = roster.friend_count(u);
        if (n_friends < policy.min_friends) {
            res.dropped[u] = "no-friends";
            continue;
        }
        if (n_friends > policy.max_friends) {
            res.dropped[u] = "too-many-friends";
            continue;
        }
        res.kept.insert(u);
    }
    return res;
}

PairTable build_pairs(const std::vector<ListRecord>& lists,
                      const std::map<std::string, std::set<UserId>>& experts_by_topic,
                      const std::set<UserId>& kept_seekers, const Roster& roster) {
    PairTable table;
    for (const auto& rec : lists) {
        if (!kept_seekers.count(rec.creator_id)) continue;
        auto topic_it = experts_by_topic.find(rec.topic);
        if (topic_it == experts_by_topic.end()) continue;
        for (const auto& m : rec.member_ids) {
            if (!topic_it->second.count(m)) continue;
            PairRow row;
            row.seeker_id = rec.creator_id;
            row.expert_id = m;
            row.topic = rec.topic;
            row.list_id = rec.list_id;
            row.list_created_at = rec.created_at;
            row.seeker_follows_expert = roster.follows_edge(rec.creator_id, m);
            table.rows.push_back(std::move(row));
        }
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const PairRow& a, const PairRow& b) {
        return std::tie(a.seeker_id, a.expert_id, a.list_id) <
               std::tie(b.seeker_id, b.expert_id, b.list_id);
    });
    return table;
}

}  // namespace iwaa
