#include <random>

#include "doctest.h"
#include "iwaa/visibility.hpp"
#include "oracles.hpp"

using namespace iwaa;

namespace {

const Timestamp kT0 = parse_rfc3339("2020-09-01T00:00:00Z");

ActivityEvent ev(const std::string& id, const UserId& author, int64_t offset_s,
                 PostKind kind = PostKind::Tweet,
                 std::optional<UserId> retweeted = std::nullopt) {
    ActivityEvent e;
    e.event_id = id;
    e.author_id = author;
    e.kind = kind;
    e.created_at = kT0 + Duration{static_cast<double>(offset_s)};
    e.retweeted_author_id = std::move(retweeted);
    if (kind == PostKind::Reply) e.replied_author_id = "someone";
    return e;
}

Timestamp at(double offset_s) { return kT0 + Duration{offset_s}; }

}  // namespace

TEST_CASE("build_wall merges friends' tweets and retweets, never replies") {
    Roster roster;
    for (const auto& u : {"s", "f1", "f2", "stranger"}) roster.users[u] = UserInfo{};
    roster.follows.insert({"s", "f1"});
    roster.follows.insert({"s", "f2"});

    ActivityMap activity;
    activity["f1"].events = {ev("a", "f1", 10), ev("c", "f1", 30, PostKind::Reply)};
    activity["f2"].events = {ev("b", "f2", 20, PostKind::Retweet, "E"),
                             ev("d", "f2", 5)};
    activity["stranger"].events = {ev("x", "stranger", 1)};
    for (auto& [_, seq] : activity) seq.sort();

    const Wall wall = build_wall("s", roster, activity);
    REQUIRE(wall.events.size() == 3);  // reply and stranger excluded
    CHECK(wall.events[0].event_id == "d");
    CHECK(wall.events[1].event_id == "a");
    CHECK(wall.events[2].event_id == "b");
    CHECK(attributed_to(wall.events[2], "E"));
    CHECK_FALSE(attributed_to(wall.events[0], "E"));
    CHECK(attributed_to(WallEvent{kT0, "y", "E", std::nullopt}, "E"));
}

TEST_CASE("exposure decay spot values") {
    const ExposureParams ep;  // k = 100, m = 2
    CHECK(exposure(0, ep) == doctest::Approx(1.0));
    CHECK(exposure(100, ep) == doctest::Approx(0.0));
    CHECK(exposure(150, ep) == doctest::Approx(0.0));  // saturates past k
    CHECK(exposure(50, ep) == doctest::Approx(0.25));  // (1 - 1/2)^2

    const ExposureParams linear{.wall_depth = 30, .decay_exponent = 1};
    CHECK(exposure(15, linear) == doctest::Approx(0.5));
}

TEST_CASE("presence kernel") {
    const PresenceParams pp;  // a = 0.047 h, session gap 240 s
    const std::vector<Timestamp> one = {at(0)};

    CHECK(presence_at(at(0), one, pp) == doctest::Approx(1.0));
    // symmetric decay with equal bandwidths
    CHECK(presence_at(at(100), one, pp) == doctest::Approx(presence_at(at(-100), one, pp)));
    // four minutes away must count as likely-gone
    CHECK(presence_at(at(240), one, pp) < 0.5);
    // ten minutes away: nearly gone
    const double ten_min = presence_at(at(600), one, pp);
    CHECK(ten_min >= 0.028);
    CHECK(ten_min <= 0.032);

    SUBCASE("posts within the session gap bridge to full presence") {
        const std::vector<Timestamp> close = {at(0), at(180)};
        CHECK(presence_at(at(90), close, pp) == doctest::Approx(1.0));
        const std::vector<Timestamp> far = {at(0), at(600)};
        CHECK(presence_at(at(300), far, pp) < 1.0);
    }

    SUBCASE("no posts means no presence") {
        CHECK(presence_at(at(0), {}, pp) == 0.0);
    }

    SUBCASE("matches the naive evaluator on random points") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<Timestamp> posts;
            const int n = 1 + static_cast<int>(rng() % 6);
            for (int i = 0; i < n; ++i)
                posts.push_back(at(static_cast<double>(rng() % 7200)));
            std::sort(posts.begin(), posts.end());
            const Timestamp t = at(static_cast<double>(rng() % 7200));
            CHECK(presence_at(t, posts, pp) ==
                  doctest::Approx(oracles::naive_presence_at(t, posts, pp)).epsilon(1e-12));
        }
    }
}

TEST_CASE("visibility bounds on hand-checked walls") {
    const ExposureParams ep;
    const PresenceParams pp;
    Wall wall;
    wall.seeker_id = "s";

    SUBCASE("no expert content means zero visibility") {
        wall.events = {{at(10), "w1", "friend", std::nullopt}};
        const auto b = visibility_bounds(wall, "E", {at(100)}, kT0, at(3600), ep, pp);
        CHECK(b.lower_seconds == 0.0);
        CHECK(b.upper_seconds == 0.0);
    }

    SUBCASE("a lone expert post with a continuously present seeker") {
        wall.events = {{at(-10), "w1", "E", std::nullopt}};
        // posts every 3 min keep presence pinned at 1 for the whole hour
        std::vector<Timestamp> posts;
        for (int i = -1; i <= 21; ++i) posts.push_back(at(i * 180.0));
        const auto b = visibility_bounds(wall, "E", posts, kT0, at(3600), ep, pp);
        CHECK(b.upper_seconds == doctest::Approx(3600.0));
        CHECK(b.lower_seconds == doctest::Approx(3600.0));
    }

    SUBCASE("upper bound with stepwise burial") {
        // expert at t=0; 50 non-expert posts at t=1800 drop f to 0.25
        wall.events.push_back({at(0), "we", "E", std::nullopt});
        for (int i = 0; i < 50; ++i)
            wall.events.push_back({at(1800), "x" + std::to_string(100 + i), "friend",
                                   std::nullopt});
        const auto b = visibility_bounds(wall, "E", {}, kT0, at(3600), ep, pp);
        CHECK(b.upper_seconds == doctest::Approx(1800.0 + 0.25 * 1800.0));
        CHECK(b.lower_seconds == 0.0);  // no seeker posts
    }

    SUBCASE("expert history before the window still counts") {
        wall.events = {{kT0 - Duration::from_hours(1), "w1", "E", std::nullopt}};
        const auto b = visibility_bounds(wall, "E", {}, kT0, at(100), ep, pp);
        CHECK(b.upper_seconds == doctest::Approx(100.0));
    }
}

TEST_CASE("visibility bounds agree with quadrature on random instances") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = oracles::make_instance(rng);
        const ExposureParams ep;
        const PresenceParams pp;
        const auto got =
            visibility_bounds(inst.wall, inst.expert, inst.posts, inst.t1, inst.t2, ep, pp);
        const auto want =
            oracles::quad_bounds(inst.wall, inst.expert, inst.posts, inst.t1, inst.t2, ep, pp);
        CHECK(got.upper_seconds ==
              doctest::Approx(want.upper_seconds).epsilon(1e-9).scale(1e-9));
        CHECK(got.lower_seconds ==
              doctest::Approx(want.lower_seconds).epsilon(1e-5).scale(1e-6));
        CHECK(got.lower_seconds <= got.upper_seconds + 1e-9);
        CHECK(got.upper_seconds <= (inst.t2 - inst.t1).seconds + 1e-6);
        CHECK(got.lower_seconds >= 0.0);
    }
}

TEST_CASE("visibility bounds are interval-additive") {
    std::mt19937_64 rng(31);
    const ExposureParams ep;
    const PresenceParams pp;
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = oracles::make_instance(rng);
        const auto whole =
            visibility_bounds(inst.wall, inst.expert, inst.posts, inst.t1, inst.t2, ep, pp);
        std::uniform_int_distribution<int64_t> d(inst.t1.us, inst.t2.us);
        const Timestamp mid{d(rng)};
        const auto left =
            visibility_bounds(inst.wall, inst.expert, inst.posts, inst.t1, mid, ep, pp);
        const auto right =
            visibility_bounds(inst.wall, inst.expert, inst.posts, mid, inst.t2, ep, pp);
        CHECK(left.upper_seconds + right.upper_seconds ==
              doctest::Approx(whole.upper_seconds).epsilon(1e-12).scale(1e-9));
        CHECK(left.lower_seconds + right.lower_seconds ==
              doctest::Approx(whole.lower_seconds).epsilon(1e-12).scale(1e-9));
    }
}

TEST_CASE("pair_day_bounds covers the 30 buckets before List creation") {
    Wall wall;
    wall.seeker_id = "s";
    wall.events = {{kT0 - Duration::from_days(40), "w1", "E", std::nullopt}};

    PairRow pair;
    pair.seeker_id = "s";
    pair.expert_id = "E";
    pair.list_id = "l1";
    pair.list_created_at = kT0;
    pair.seeker_follows_expert = true;

    const ExposureParams ep;
    const PresenceParams pp;
    const auto rows = pair_day_bounds(wall, pair, {}, ep, pp);
    REQUIRE(rows.size() == 30);
    for (int d = 0; d < 30; ++d) {
        CHECK(rows[d].day_index == d + 1);
        CHECK(rows[d].followed);
        // f stays 1 the whole time: every bucket is a full day of upper bound
        CHECK(rows[d].upper_seconds == doctest::Approx(86400.0));
        CHECK(rows[d].lower_seconds == 0.0);
    }

    // the buckets tile [t_l - 30d, t_l): their sum equals one integral
    const auto whole = visibility_bounds(wall, "E", {}, kT0 - Duration::from_days(30), kT0,
                                         ep, pp);
    double sum = 0;
    for (const auto& r : rows) sum += r.upper_seconds;
    CHECK(sum == doctest::Approx(whole.upper_seconds));
}

TEST_CASE("average_visibility groups by follow status") {
    std::vector<VisibilityBound> bounds;
    bounds.push_back({"s1", "E1", "l1", 1, 1.0, 2.0, true});
    bounds.push_back({"s1", "E1", "l1", 2, 3.0, 4.0, true});
    bounds.push_back({"s1", "E2", "l1", 1, 10.0, 20.0, false});
    bounds.push_back({"s2", "E1", "l2", 1, 5.0, 6.0, true});

    const auto all = average_visibility(bounds, ExpertGroup::All);
    CHECK(all.at("s1").mean_upper_seconds_per_day == doctest::Approx((2 + 4 + 20) / 3.0));
    CHECK(all.at("s1").cells == 3);
    CHECK(all.at("s2").mean_lower_seconds_per_day == doctest::Approx(5.0));

    const auto followed = average_visibility(bounds, ExpertGroup::Followed);
    CHECK(followed.at("s1").mean_upper_seconds_per_day == doctest::Approx(3.0));

    const auto unfollowed = average_visibility(bounds, ExpertGroup::Unfollowed);
    CHECK(unfollowed.at("s1").mean_upper_seconds_per_day == doctest::Approx(20.0));
    CHECK(unfollowed.count("s2") == 0);  // no unfollowed experts for s2
}

TEST_CASE("friends_vs_visibility pairs counts with upper averages") {
    Roster roster;
    roster.users["s1"] = UserInfo{};
    roster.follows.insert({"s1", "a"});
    roster.follows.insert({"s1", "b"});

    std::map<UserId, SeekerAverage> averages;
    averages["s1"] = SeekerAverage{1.0, 7.5, 4};

    const auto rows = friends_vs_visibility(averages, roster);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].seeker_id == "s1");
    CHECK(rows[0].friend_count == 2);
    CHECK(rows[0].mean_upper_seconds_per_day == doctest::Approx(7.5));
}
