#pragma once
// Per-cluster report tables: sizes, mean reaction signals ordered by
// effortless level, per-cluster feature survival curves, and the fraction of
// seekers listed at least l times.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iwaa/reactions.hpp"

namespace iwaa {

struct ClusterReport {
    struct ClusterRow {
        int label = 0;
        int order = 0;  // position when sorted by mean effortless, ascending
        size_t size = 0;
        double proportion = 0;
        double mean_retweet = 0;
        double mean_like = 0;
        double mean_answer = 0;
        double mean_follow = 0;
        double mean_effortless = 0;
    };
    std::vector<ClusterRow> clusters;  // sorted by mean_effortless ascending

    // feature name -> cluster label -> survival curve
    std::map<std::string, std::map<int, ICDFCurve>> seeker_feature_icdfs;
    std::map<std::string, std::map<int, ICDFCurve>> expert_feature_icdfs;

    struct ListedRow {
        int label = 0;
        size_t min_listings = 0;
        double fraction = 0;
    };
    std::vector<ListedRow> listed_fractions;  // min_listings in {10, 20, ..., 600}
};

ClusterReport cluster_report(
    const std::map<UserId, int>& assignments,
    const std::vector<ReactionProfile>& profiles,
    const std::map<UserId, std::map<std::string, double>>& seeker_features,
    const std::map<UserId, std::map<std::string, double>>& expert_features,
    const std::map<UserId, std::set<UserId>>& experts_per_seeker,
    const std::map<UserId, size_t>& listing_counts);

}  // namespace iwaa
