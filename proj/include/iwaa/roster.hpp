#pragma once
// The static network snapshot: users, follow edges and List metadata.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iwaa/time.hpp"

namespace iwaa {

using UserId = std::string;

// All members are treated as added at created_at.
struct ListRecord {
    std::string list_id;
    UserId creator_id;
    Timestamp created_at;
    std::string topic;
    std::set<UserId> member_ids;  // non-empty

    bool operator==(const ListRecord&) const = default;
};

struct UserInfo {
    bool is_private = false;
    bool operator==(const UserInfo&) const = default;
};

struct Roster {
    std::map<UserId, UserInfo> users;
    std::set<std::pair<UserId, UserId>> follows;  // (follower, followee); no self-edges
    std::vector<ListRecord> lists;

    bool follows_edge(const UserId& follower, const UserId& followee) const {
        return follows.count({follower, followee}) > 0;
    }

    // Followees of a user (a.k.a. friends).
    std::set<UserId> friends_of(const UserId& u) const {
        std::set<UserId> out;
        auto it = follows.lower_bound({u, std::string()});
        for (; it != follows.end() && it->first == u; ++it) out.insert(it->second);
        return out;
    }

    size_t friend_count(const UserId& u) const {
        size_t n = 0;
        auto it = follows.lower_bound({u, std::string()});
        for (; it != follows.end() && it->first == u; ++it) ++n;
        return n;
    }

    bool operator==(const Roster&) const = default;
};

}  // namespace iwaa
