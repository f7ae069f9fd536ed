#pragma once
// Activity streams: posts and likes of a single user, time-ordered.
// All types here are immutable value types; no I/O.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iwaa/errors.hpp"
#include "iwaa/time.hpp"

namespace iwaa {

enum class PostKind { Tweet, Retweet, Reply };

inline const char* to_string(PostKind k) {
    switch (k) {
        case PostKind::Tweet: return "tweet";
        case PostKind::Retweet: return "retweet";
        case PostKind::Reply: return "reply";
    }
    return "?";
}

// One authored post. Quote-tweets are stored as Retweet; the raw kind is
// not retained.
struct ActivityEvent {
    std::string event_id;
    std::string author_id;
    PostKind kind = PostKind::Tweet;
    Timestamp created_at;
    std::optional<std::string> retweeted_author_id;  // Retweet only
    std::optional<std::string> replied_author_id;    // Reply only

    bool operator==(const ActivityEvent&) const = default;
};

// A like carries no like-time; only the liked post's creation time is known.
struct LikeRecord {
    std::string user_id;
    std::string post_id;
    std::string post_author_id;
    Timestamp post_created_at;

    bool operator==(const LikeRecord&) const = default;
};

// Ordering used everywhere: created_at ascending, ties broken by event_id.
inline bool event_order(const ActivityEvent& a, const ActivityEvent& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.event_id < b.event_id;
}

struct ActivitySequence {
    std::vector<ActivityEvent> events;  // sorted by event_order
    std::vector<LikeRecord> likes;

    void sort() {
        std::sort(events.begin(), events.end(), event_order);
        std::sort(likes.begin(), likes.end(), [](const LikeRecord& a, const LikeRecord& b) {
            if (a.post_created_at != b.post_created_at)
                return a.post_created_at < b.post_created_at;
            return a.post_id < b.post_id;
        });
    }

    bool operator==(const ActivitySequence&) const = default;
};

// Events e with t1 <= e.created_at < t2; likes filtered on post_created_at
// under the same rule. Throws ConfigError on an inverted interval.
inline ActivitySequence slice(const ActivitySequence& seq, Timestamp t1, Timestamp t2) {
    if (t2 < t1) throw ConfigError("slice: inverted interval");
    ActivitySequence out;
    for (const auto& e : seq.events)
        if (t1 <= e.created_at && e.created_at < t2) out.events.push_back(e);
    for (const auto& l : seq.likes)
        if (t1 <= l.post_created_at && l.post_created_at < t2) out.likes.push_back(l);
    return out;
}

inline std::map<PostKind, ActivitySequence> partition_by_kind(const ActivitySequence& seq) {
    std::map<PostKind, ActivitySequence> out;
    out[PostKind::Tweet];
    out[PostKind::Retweet];
    out[PostKind::Reply];
    for (const auto& e : seq.events) out[e.kind].events.push_back(e);
    return out;
}

}  // namespace iwaa
