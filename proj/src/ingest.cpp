#include "iwaa/ingest.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace iwaa {
namespace {

using nlohmann::json;

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    return in;
}

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw std::invalid_argument(std::string("missing or non-string field '") + key + "'");
    return j[key].get<std::string>();
}

Timestamp require_timestamp(const json& j, const char* key) {
    return parse_rfc3339(require_string(j, key));
}

// Applies fn to each non-empty line; parse/validation failures become rejects.
template <typename Fn>
void for_each_record(const std::string& path, LoadReport& report, Fn fn) {
    auto in = open_or_throw(path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ++report.lines_read;
        try {
            fn(json::parse(line));
            ++report.records_loaded;
        } catch (const std::exception& e) {
            report.rejects.push_back({path, line_no, e.what()});
        }
    }
}

}  // namespace

ActivityMap load_events(const std::string& path, LoadReport& report) {
    ActivityMap out;
    for_each_record(path, report, [&](const json& j) {
        ActivityEvent e;
        e.event_id = require_string(j, "id");
        e.author_id = require_string(j, "author_id");
        e.created_at = require_timestamp(j, "created_at");
        const std::string kind = require_string(j, "kind");
        if (kind == "tweet") {
            e.kind = PostKind::Tweet;
        } else if (kind == "retweet" || kind == "quote") {
            e.kind = PostKind::Retweet;
            e.retweeted_author_id = require_string(j, "retweeted_author_id");
        } else if (kind == "reply") {
            e.kind = PostKind::Reply;
            e.replied_author_id = require_string(j, "replied_author_id");
        } else {
            throw std::invalid_argument("unknown kind '" + kind + "'");
        }
        out[e.author_id].events.push_back(std::move(e));
    });
    for (auto& [_, seq] : out) seq.sort();
    return out;
}

void load_likes(const std::string& path, ActivityMap& activity, LoadReport& report) {
    for_each_record(path, report, [&](const json& j) {
        LikeRecord l;
        l.user_id = require_string(j, "user_id");
        l.post_id = require_string(j, "post_id");
        l.post_author_id = require_string(j, "post_author_id");
        l.post_created_at = require_timestamp(j, "post_created_at");
        activity[l.user_id].likes.push_back(std::move(l));
    });
    for (auto& [_, seq] : activity) seq.sort();
}

Roster load_roster(const std::string& follows_path, const std::string& lists_path,
                   const std::string& users_path, LoadReport& report) {
    Roster roster;
    for_each_record(users_path, report, [&](const json& j) {
        UserInfo info;
        const UserId id = require_string(j, "user_id");
        if (!j.contains("is_private") || !j["is_private"].is_boolean())
            throw std::invalid_argument("missing or non-boolean field 'is_private'");
        info.is_private = j["is_private"].get<bool>();
        roster.users[id] = info;
    });
    for_each_record(follows_path, report, [&](const json& j) {
        const UserId a = require_string(j, "follower_id");
        const UserId b = require_string(j, "followee_id");
        if (a == b) {
            ++report.self_edges_dropped;
            return;
        }
        if (!roster.follows.insert({a, b}).second) ++report.duplicate_edges_dropped;
    });
    for_each_record(lists_path, report, [&](const json& j) {
        ListRecord rec;
        rec.list_id = require_string(j, "list_id");
        rec.creator_id = require_string(j, "creator_id");
        rec.created_at = require_timestamp(j, "created_at");
        rec.topic = require_string(j, "topic");
        if (!j.contains("member_ids") || !j["member_ids"].is_array())
            throw std::invalid_argument("missing or non-array field 'member_ids'");
        for (const auto& m : j["member_ids"]) {
            if (!m.is_string()) throw std::invalid_argument("non-string member id");
            rec.member_ids.insert(m.get<std::string>());
        }
        if (rec.member_ids.empty()) {
            ++report.empty_lists_dropped;
            return;
        }
        roster.lists.push_back(std::move(rec));
    });
    std::sort(roster.lists.begin(), roster.lists.end(),
              [](const ListRecord& a, const ListRecord& b) { return a.list_id < b.list_id; });
    return roster;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    return out;
}

}  // namespace

void write_posts_jsonl(const std::string& path, const ActivityMap& activity) {
    auto out = open_out(path);
    for (const auto& [_, seq] : activity) {
        for (const auto& e : seq.events) {
            json j;
            j["id"] = e.event_id;
            j["author_id"] = e.author_id;
            j["kind"] = to_string(e.kind);
            j["created_at"] = format_rfc3339(e.created_at);
            if (e.retweeted_author_id) j["retweeted_author_id"] = *e.retweeted_author_id;
            if (e.replied_author_id) j["replied_author_id"] = *e.replied_author_id;
            out << j.dump() << '\n';
        }
    }
}

void write_likes_jsonl(const std::string& path, const ActivityMap& activity) {
    auto out = open_out(path);
    for (const auto& [_, seq] : activity) {
        for (const auto& l : seq.likes) {
            json j;
            j["user_id"] = l.user_id;
            j["post_id"] = l.post_id;
            j["post_author_id"] = l.post_author_id;
            j["post_created_at"] = format_rfc3339(l.post_created_at);
            out << j.dump() << '\n';
        }
    }
}

void write_follows_jsonl(const std::string& path, const Roster& roster) {
    auto out = open_out(path);
    for (const auto& [a, b] : roster.follows) {
        json j;
        j["follower_id"] = a;
        j["followee_id"] = b;
        out << j.dump() << '\n';
    }
}

void write_users_jsonl(const std::string& path, const Roster& roster) {
    auto out = open_out(path);
    for (const auto& [id, info] : roster.users) {
        json j;
        j["user_id"] = id;
        j["is_private"] = info.is_private;
        out << j.dump() << '\n';
    }
}

void write_lists_jsonl(const std::string& path, const Roster& roster) {
    auto out = open_out(path);
    for (const auto& rec : roster.lists) {
        json j;
        j["list_id"] = rec.list_id;
        j["creator_id"] = rec.creator_id;
        j["created_at"] = format_rfc3339(rec.created_at);
        j["topic"] = rec.topic;
        j["member_ids"] = std::vector<std::string>(rec.member_ids.begin(), rec.member_ids.end());
        out << j.dump() << '\n';
    }
}

namespace {

// Uniform in [0,1) from the top 53 bits; identical across platforms for a
// given mt19937_64 stream.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string pad_id(const char* prefix, size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%04zu", prefix, i);
    return buf;
}

const char* kTopics[] = {"ai", "math", "music"};

}  // namespace

std::pair<ActivityMap, Roster> generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.window_end <= cfg.window_start)
        throw ConfigError("generate_synthetic: degenerate window");
    if (cfg.post_rate_per_day < 0) throw ConfigError("generate_synthetic: negative rate");
    if (cfg.follow_density < 0 || cfg.follow_density > 1)
        throw ConfigError("generate_synthetic: follow_density outside [0,1]");

    std::mt19937_64 rng(cfg.seed);
    ActivityMap activity;
    Roster roster;

    std::vector<UserId> seekers, experts;
    for (size_t i = 0; i < cfg.n_seekers; ++i) seekers.push_back(pad_id("s", i));
    for (size_t i = 0; i < cfg.n_experts; ++i) experts.push_back(pad_id("e", i));
    for (const auto& u : seekers) roster.users[u] = UserInfo{};
    for (const auto& u : experts) roster.users[u] = UserInfo{};

    const size_t n_topics = std::min<size_t>(3, std::max<size_t>(1, cfg.n_experts));
    auto topic_of_expert = [&](size_t i) { return kTopics[i % n_topics]; };

    // Follow edges: seeker -> expert at follow_density, plus a thinner
    // seeker -> seeker layer so walls are not expert-only.
    for (const auto& s : seekers) {
        for (const auto& e : experts)
            if (uniform01(rng) < cfg.follow_density) roster.follows.insert({s, e});
        for (const auto& s2 : seekers)
            if (s2 != s && uniform01(rng) < cfg.follow_density * 0.3)
                roster.follows.insert({s, s2});
    }

    // Homogeneous Poisson posts per user over the window.
    const double window_days =
        (cfg.window_end - cfg.window_start).seconds / 86400.0;
    size_t event_counter = 0;
    auto gen_posts = [&](const UserId& u, bool is_seeker) {
        ActivitySequence& seq = activity[u];
        if (cfg.post_rate_per_day <= 0) return;
        double t_days = 0;
        while (true) {
            t_days += -std::log(1.0 - uniform01(rng)) / cfg.post_rate_per_day;
            if (t_days >= window_days) break;
            ActivityEvent ev;
            ev.event_id = pad_id("p", event_counter++);
            ev.author_id = u;
            ev.created_at = cfg.window_start + Duration::from_days(t_days);
            const double r = uniform01(rng);
            if (r < 0.7 || experts.empty()) {
                ev.kind = PostKind::Tweet;
            } else if (r < 0.9) {
                ev.kind = PostKind::Retweet;
                ev.retweeted_author_id =
                    experts[static_cast<size_t>(uniform01(rng) * experts.size())];
            } else {
                ev.kind = PostKind::Reply;
                ev.replied_author_id =
                    experts[static_cast<size_t>(uniform01(rng) * experts.size())];
            }
            seq.events.push_back(std::move(ev));
        }
        (void)is_seeker;
    };
    for (const auto& u : seekers) gen_posts(u, true);
    for (const auto& u : experts) gen_posts(u, false);

    // Likes: each seeker likes each expert post independently.
    for (const auto& s : seekers) {
        for (const auto& e : experts) {
            for (const auto& ev : activity[e].events) {
                if (uniform01(rng) < cfg.like_rate) {
                    LikeRecord l;
                    l.user_id = s;
                    l.post_id = ev.event_id;
                    l.post_author_id = e;
                    l.post_created_at = ev.created_at;
                    activity[s].likes.push_back(std::move(l));
                }
            }
        }
    }

    // Lists: each seeker creates lists on round-robin topics near the end of
    // the window; every List of a topic carries all of that topic's experts,
    // so each expert's listing count equals the topic's List count.
    size_t list_counter = 0;
    for (size_t si = 0; si < seekers.size(); ++si) {
        for (size_t li = 0; li < cfg.lists_per_seeker; ++li) {
            ListRecord rec;
            rec.list_id = pad_id("l", list_counter++);
            rec.creator_id = seekers[si];
            rec.topic = kTopics[(si + li) % n_topics];
            rec.created_at =
                cfg.window_end - Duration::from_minutes(1.0 + 7.0 * (si + li));
            for (size_t ei = 0; ei < experts.size(); ++ei)
                if (topic_of_expert(ei) == rec.topic) rec.member_ids.insert(experts[ei]);
            if (rec.member_ids.empty()) rec.member_ids.insert(experts.empty() ? seekers[si] : experts[0]);
            roster.lists.push_back(std::move(rec));
        }
    }
    std::sort(roster.lists.begin(), roster.lists.end(),
              [](const ListRecord& a, const ListRecord& b) { return a.list_id < b.list_id; });

    for (auto& [_, seq] : activity) seq.sort();
    return {std::move(activity), std::move(roster)};
}

}  // namespace iwaa
