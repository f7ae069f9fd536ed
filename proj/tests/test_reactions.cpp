#include <random>

#include "doctest.h"
#include "iwaa/reactions.hpp"

using namespace iwaa;

namespace {

const Timestamp kT0 = parse_rfc3339("2020-08-01T00:00:00Z");
const Timestamp kT1 = parse_rfc3339("2020-09-01T00:00:00Z");

ActivityEvent retweet_of(const UserId& expert, int64_t offset_s, const std::string& id) {
    ActivityEvent e;
    e.event_id = id;
    e.author_id = "s";
    e.kind = PostKind::Retweet;
    e.created_at = kT0 + Duration{static_cast<double>(offset_s)};
    e.retweeted_author_id = expert;
    return e;
}

}  // namespace

TEST_CASE("indicators per kind") {
    Roster roster;
    ActivitySequence seq;

    SUBCASE("retweet in window") {
        seq.events.push_back(retweet_of("e1", 100, "r1"));
        CHECK(indicator(seq, "s", "e1", ReactionKind::Retweet, roster, kT0, kT1));
        CHECK_FALSE(indicator(seq, "s", "e2", ReactionKind::Retweet, roster, kT0, kT1));
        // outside the window
        CHECK_FALSE(indicator(seq, "s", "e1", ReactionKind::Retweet, roster,
                              kT0 + Duration{200}, kT1));
    }

    SUBCASE("empty activity gives zero content indicators") {
        for (auto kind : {ReactionKind::Retweet, ReactionKind::Like, ReactionKind::Answer})
            CHECK_FALSE(indicator(seq, "s", "e1", kind, roster, kT0, kT1));
    }

    SUBCASE("follow is static and window-independent") {
        roster.follows.insert({"s", "e1"});
        CHECK(indicator(seq, "s", "e1", ReactionKind::Follow, roster, kT0, kT0));
        CHECK_FALSE(indicator(seq, "s", "e1", ReactionKind::Retweet, roster, kT0, kT1));
    }

    SUBCASE("like windows on the liked post's creation time") {
        seq.likes.push_back({"s", "p1", "e1", kT0 + Duration{50}});
        CHECK(indicator(seq, "s", "e1", ReactionKind::Like, roster, kT0, kT1));
        CHECK_FALSE(indicator(seq, "s", "e1", ReactionKind::Like, roster,
                              kT0 + Duration{60}, kT1));
    }
}

TEST_CASE("profile averages") {
    Roster roster;

    SUBCASE("one retweeted expert out of ten") {
        ActivitySequence seq;
        seq.events.push_back(retweet_of("e0", 10, "r1"));
        std::set<UserId> experts;
        for (int i = 0; i < 10; ++i) experts.insert("e" + std::to_string(i));
        const auto p = profile(seq, "s", experts, roster, kT0, kT1);
        CHECK(p.avg_retweet == doctest::Approx(0.1));
        CHECK(p.effortless == doctest::Approx(0.1));
    }

    SUBCASE("effortless is the per-expert disjunction") {
        ActivitySequence seq;
        seq.events.push_back(retweet_of("eA", 10, "r1"));
        seq.likes.push_back({"s", "p1", "eB", kT0 + Duration{20}});
        const auto p = profile(seq, "s", {"eA", "eB"}, roster, kT0, kT1);
        CHECK(p.avg_retweet == doctest::Approx(0.5));
        CHECK(p.avg_like == doctest::Approx(0.5));
        CHECK(p.effortless == doctest::Approx(1.0));
    }

    SUBCASE("no reactions anywhere") {
        ActivitySequence seq;
        const auto p = profile(seq, "s", {"e1", "e2"}, roster, kT0, kT1);
        CHECK(p.avg_retweet == 0);
        CHECK(p.avg_like == 0);
        CHECK(p.avg_answer == 0);
        CHECK(p.avg_follow == 0);
        CHECK(p.effortless == 0);
    }

    SUBCASE("empty expert set is an error") {
        ActivitySequence seq;
        CHECK_THROWS_AS(profile(seq, "s", {}, roster, kT0, kT1), ConfigError);
    }
}

TEST_CASE("effortless bounds and dilution monotonicity") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::map<UserId, PerExpertIndicators> by_expert;
        const int n = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) {
            PerExpertIndicators ind;
            ind.retweet = rng() % 2;
            ind.like = rng() % 2;
            ind.answer = rng() % 2;
            ind.follow = rng() % 2;
            by_expert["e" + std::to_string(i)] = ind;
        }
        const auto p = profile_from_indicators("s", by_expert);
        CHECK(p.effortless >= p.avg_retweet - 1e-12);
        CHECK(p.effortless >= p.avg_like - 1e-12);
        CHECK(p.effortless <= p.avg_retweet + p.avg_like + 1e-12);

        // diluting with a reaction-free expert cannot raise any average
        by_expert["e_silent"] = PerExpertIndicators{};
        const auto diluted = profile_from_indicators("s", by_expert);
        CHECK(diluted.avg_retweet <= p.avg_retweet + 1e-12);
        CHECK(diluted.avg_like <= p.avg_like + 1e-12);
        CHECK(diluted.avg_answer <= p.avg_answer + 1e-12);
        CHECK(diluted.avg_follow <= p.avg_follow + 1e-12);
        CHECK(diluted.effortless <= p.effortless + 1e-12);
    }
}

TEST_CASE("icdf basics") {
    SUBCASE("all-equal values") {
        const auto c = icdf({1, 1, 1});
        CHECK(c.at(1.0) == doctest::Approx(1.0));
        CHECK(c.at(1.0 + 1e-9) == doctest::Approx(0.0));
    }

    SUBCASE("quantile reading") {
        const auto c = icdf({1, 2, 3, 4});
        CHECK(c.at(3.0) == doctest::Approx(0.5));  // 2 of 4 are >= 3
        CHECK(c.at(0.0) == doctest::Approx(1.0));
        CHECK(c.at(5.0) == doctest::Approx(0.0));
    }

    SUBCASE("singleton") {
        const auto c = icdf({0});
        CHECK(c.at(0.0) == doctest::Approx(1.0));
    }

    SUBCASE("empty input is an error") { CHECK_THROWS_AS(icdf({}), ConfigError); }
}

TEST_CASE("icdf invariants: monotone, permutation-invariant, scale-equivariant") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> values;
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i)
            values.push_back(static_cast<double>(rng() % 1000) / 100.0);

        const auto c = icdf(values);
        CHECK(c.survival.front() == doctest::Approx(1.0));
        for (size_t i = 1; i < c.survival.size(); ++i)
            CHECK(c.survival[i] <= c.survival[i - 1]);

        auto shuffled = values;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto c2 = icdf(shuffled);
        CHECK(c2.support == c.support);
        CHECK(c2.survival == c.survival);

        std::vector<double> scaled;
        for (double v : values) scaled.push_back(2.5 * v);
        const auto c3 = icdf(scaled);
        REQUIRE(c3.support.size() == c.support.size());
        for (size_t i = 0; i < c.support.size(); ++i) {
            CHECK(c3.support[i] == doctest::Approx(2.5 * c.support[i]));
            CHECK(c3.survival[i] == doctest::Approx(c.survival[i]));
        }
    }
}
