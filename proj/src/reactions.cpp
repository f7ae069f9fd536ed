#include "iwaa/reactions.hpp"

#include <algorithm>

namespace iwaa {

bool indicator(const ActivitySequence& seeker_activity, const UserId& seeker_id,
               const UserId& expert_id, ReactionKind kind, const Roster& roster,
               Timestamp t1, Timestamp t2) {
    if (t2 < t1) throw ConfigError("indicator: inverted window");
    switch (kind) {
        case ReactionKind::Follow:
            return roster.follows_edge(seeker_id, expert_id);
        case ReactionKind::Like:
            for (const auto& l : seeker_activity.likes)
                if (l.post_author_id == expert_id && t1 <= l.post_created_at &&
                    l.post_created_at < t2)
                    return true;
            return false;
        case ReactionKind::Retweet:
            for (const auto& e : seeker_activity.events)
                if (e.kind == PostKind::Retweet && e.retweeted_author_id == expert_id &&
                    t1 <= e.created_at && e.created_at < t2)
                    return true;
            return false;
        case ReactionKind::Answer:
            for (const auto& e : seeker_activity.events)
                if (e.kind == PostKind::Reply && e.replied_author_id == expert_id &&
                    t1 <= e.created_at && e.created_at < t2)
                    return true;
            return false;
    }
    return false;
}

ReactionProfile profile_from_indicators(
    const UserId& seeker_id, const std::map<UserId, PerExpertIndicators>& by_expert) {
    if (by_expert.empty()) throw ConfigError("profile: empty expert set");
    ReactionProfile p;
    p.seeker_id = seeker_id;
    p.n_experts = by_expert.size();
    size_t r = 0, l = 0, a = 0, f = 0, eff = 0;
    for (const auto& [_, ind] : by_expert) {
        r += ind.retweet;
        l += ind.like;
        a += ind.answer;
        f += ind.follow;
        eff += (ind.retweet || ind.like);  // disjunction per expert, then average
    }
    const double n = static_cast<double>(p.n_experts);
    p.avg_retweet = r / n;
    p.avg_like = l / n;
    p.avg_answer = a / n;
    p.avg_follow = f / n;
    p.effortless = eff / n;
    return p;
}

ReactionProfile profile(const ActivitySequence& seeker_activity, const UserId& seeker_id,
                        const std::set<UserId>& experts, const Roster& roster,
                        Timestamp t1, Timestamp t2) {
    std::map<UserId, PerExpertIndicators> by_expert;
    for (const auto& e : experts) {
        PerExpertIndicators ind;
        ind.retweet = indicator(seeker_activity, seeker_id, e, ReactionKind::Retweet, roster, t1, t2);
        ind.like = indicator(seeker_activity, seeker_id, e, ReactionKind::Like, roster, t1, t2);
        ind.answer = indicator(seeker_activity, seeker_id, e, ReactionKind::Answer, roster, t1, t2);
        ind.follow = indicator(seeker_activity, seeker_id, e, ReactionKind::Follow, roster, t1, t2);
        by_expert[e] = ind;
    }
    return profile_from_indicators(seeker_id, by_expert);
}

double ICDFCurve::at(double v) const {
    const auto it = std::lower_bound(sorted_values.begin(), sorted_values.end(), v);
    return static_cast<double>(sorted_values.end() - it) /
           static_cast<double>(sorted_values.size());
}

ICDFCurve icdf(std::vector<double> values) {
    if (values.empty()) throw ConfigError("icdf: empty input");
    std::sort(values.begin(), values.end());
    ICDFCurve curve;
    curve.sorted_values = values;
    const double n = static_cast<double>(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0 && values[i] == values[i - 1]) continue;
        curve.support.push_back(values[i]);
        curve.survival.push_back(static_cast<double>(values.size() - i) / n);
    }
    return curve;
}

}  // namespace iwaa
