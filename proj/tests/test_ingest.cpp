#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "iwaa/ingest.hpp"

using namespace iwaa;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("iwaa_test_" + std::to_string(::getpid()) + "_" +
                                           std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = dir / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("load_events groups, sorts and reports rejects") {
    TempDir tmp;

    SUBCASE("empty file") {
        LoadReport rep;
        CHECK(load_events(tmp.file("posts.jsonl", ""), rep).empty());
        CHECK(rep.lines_read == 0);
    }

    SUBCASE("three valid lines for one author") {
        const std::string content =
            R"({"id":"p2","author_id":"u1","kind":"tweet","created_at":"2020-07-01T00:00:02Z"})"
            "\n"
            R"({"id":"p1","author_id":"u1","kind":"tweet","created_at":"2020-07-01T00:00:01Z"})"
            "\n"
            R"({"id":"p3","author_id":"u1","kind":"retweet","retweeted_author_id":"e1","created_at":"2020-07-01T00:00:03Z"})"
            "\n";
        LoadReport rep;
        const auto m = load_events(tmp.file("posts.jsonl", content), rep);
        REQUIRE(m.size() == 1);
        REQUIRE(m.at("u1").events.size() == 3);
        CHECK(m.at("u1").events[0].event_id == "p1");  // sorted
        CHECK(rep.rejects.empty());
    }

    SUBCASE("invalid kind is rejected, not fatal") {
        const std::string content =
            R"({"id":"p1","author_id":"u1","kind":"tweet","created_at":"2020-07-01T00:00:01Z"})"
            "\n"
            R"({"id":"p2","author_id":"u2","kind":"banana","created_at":"2020-07-01T00:00:02Z"})"
            "\n";
        LoadReport rep;
        const auto m = load_events(tmp.file("posts.jsonl", content), rep);
        CHECK(m.size() == 1);
        REQUIRE(rep.rejects.size() == 1);
        CHECK(rep.rejects[0].line_no == 2);
        // conservation: loaded + rejected = lines read
        CHECK(rep.records_loaded + rep.rejects.size() == rep.lines_read);
    }

    SUBCASE("quote maps to retweet") {
        const std::string content =
            R"({"id":"p1","author_id":"u1","kind":"quote","retweeted_author_id":"e1","created_at":"2020-07-01T00:00:01Z"})"
            "\n";
        LoadReport rep;
        const auto m = load_events(tmp.file("posts.jsonl", content), rep);
        CHECK(m.at("u1").events[0].kind == PostKind::Retweet);
    }

    SUBCASE("missing file throws") {
        LoadReport rep;
        CHECK_THROWS_AS(load_events((tmp.dir / "nope.jsonl").string(), rep), InputError);
    }
}

TEST_CASE("load_roster dedups edges, drops self-edges and empty lists") {
    TempDir tmp;
    const auto follows = tmp.file("follows.jsonl",
        R"({"follower_id":"a","followee_id":"b"})" "\n"
        R"({"follower_id":"a","followee_id":"b"})" "\n"
        R"({"follower_id":"a","followee_id":"a"})" "\n");
    const auto users = tmp.file("users.jsonl",
        R"({"user_id":"a","is_private":false})" "\n"
        R"({"user_id":"b","is_private":true})" "\n");
    const auto lists = tmp.file("lists.jsonl",
        R"({"list_id":"l1","creator_id":"a","created_at":"2020-08-01T00:00:00Z","topic":"math","member_ids":["b"]})" "\n"
        R"({"list_id":"l2","creator_id":"a","created_at":"2020-08-01T00:00:00Z","topic":"math","member_ids":[]})" "\n");

    LoadReport rep;
    const Roster r = load_roster(follows, lists, users, rep);
    CHECK(r.follows.size() == 1);
    CHECK(rep.duplicate_edges_dropped == 1);
    CHECK(rep.self_edges_dropped == 1);
    CHECK(r.lists.size() == 1);
    CHECK(rep.empty_lists_dropped == 1);
    CHECK(r.users.at("b").is_private);
}

TEST_CASE("synthetic generation is deterministic and honors the config") {
    SyntheticConfig cfg;
    cfg.seed = 99;
    cfg.n_seekers = 4;
    cfg.n_experts = 3;
    cfg.post_rate_per_day = 15;
    cfg.window_start = parse_rfc3339("2020-07-01T00:00:00Z");
    cfg.window_end = cfg.window_start + Duration::from_days(10);
    cfg.follow_density = 0.5;

    const auto [act1, roster1] = generate_synthetic(cfg);
    const auto [act2, roster2] = generate_synthetic(cfg);
    CHECK(act1 == act2);
    CHECK(roster1 == roster2);

    SUBCASE("zero rate means empty sequences") {
        auto quiet = cfg;
        quiet.post_rate_per_day = 0;
        const auto [act, _] = generate_synthetic(quiet);
        for (const auto& [__, seq] : act) CHECK(seq.events.empty());
    }

    SUBCASE("density one connects every seeker to every expert") {
        auto dense = cfg;
        dense.follow_density = 1.0;
        dense.n_experts = 5;
        const auto [_, roster] = generate_synthetic(dense);
        for (size_t s = 0; s < dense.n_seekers; ++s)
            for (size_t e = 0; e < dense.n_experts; ++e) {
                char sb[8], eb[8];
                std::snprintf(sb, sizeof(sb), "s%04zu", s);
                std::snprintf(eb, sizeof(eb), "e%04zu", e);
                CHECK(roster.follows_edge(sb, eb));
            }
    }

    SUBCASE("degenerate window is a config error") {
        auto bad = cfg;
        bad.window_end = bad.window_start;
        CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
    }

    SUBCASE("every list names at least one expert member") {
        const auto [_, roster] = generate_synthetic(cfg);
        for (const auto& rec : roster.lists) {
            bool has_expert = false;
            for (const auto& m : rec.member_ids) has_expert |= m.starts_with("e");
            CHECK(has_expert);
        }
    }
}

TEST_CASE("write + reload round-trips the synthetic fixture") {
    SyntheticConfig cfg;
    cfg.seed = 5;
    cfg.n_seekers = 3;
    cfg.n_experts = 2;
    cfg.post_rate_per_day = 10;
    cfg.window_start = parse_rfc3339("2020-07-01T00:00:00Z");
    cfg.window_end = cfg.window_start + Duration::from_days(5);
    const auto [activity, roster] = generate_synthetic(cfg);

    TempDir tmp;
    write_posts_jsonl((tmp.dir / "posts.jsonl").string(), activity);
    write_likes_jsonl((tmp.dir / "likes.jsonl").string(), activity);
    write_follows_jsonl((tmp.dir / "follows.jsonl").string(), roster);
    write_users_jsonl((tmp.dir / "users.jsonl").string(), roster);
    write_lists_jsonl((tmp.dir / "lists.jsonl").string(), roster);

    LoadReport rep;
    auto reloaded = load_events((tmp.dir / "posts.jsonl").string(), rep);
    load_likes((tmp.dir / "likes.jsonl").string(), reloaded, rep);
    const Roster roster2 = load_roster((tmp.dir / "follows.jsonl").string(),
                                       (tmp.dir / "lists.jsonl").string(),
                                       (tmp.dir / "users.jsonl").string(), rep);
    CHECK(rep.rejects.empty());
    CHECK(roster2 == roster);
    // users with no activity have no file rows; compare the non-empty ones
    for (const auto& [user, seq] : activity) {
        if (seq.events.empty() && seq.likes.empty()) continue;
        CHECK(reloaded.at(user) == seq);
    }
}
