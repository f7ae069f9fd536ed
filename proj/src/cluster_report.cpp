#include "iwaa/cluster_report.hpp"

#include <algorithm>

namespace iwaa {

ClusterReport cluster_report(
    const std::map<UserId, int>& assignments,
    const std::vector<ReactionProfile>& profiles,
    const std::map<UserId, std::map<std::string, double>>& seeker_features,
    const std::map<UserId, std::map<std::string, double>>& expert_features,
    const std::map<UserId, std::set<UserId>>& experts_per_seeker,
    const std::map<UserId, size_t>& listing_counts) {
    ClusterReport rep;

    std::map<int, std::vector<const ReactionProfile*>> by_cluster;
    for (const auto& p : profiles) {
        auto it = assignments.find(p.seeker_id);
        if (it == assignments.end())
            throw ConfigError("cluster_report: unassigned seeker " + p.seeker_id);
        by_cluster[it->second].push_back(&p);
    }

    const double total = static_cast<double>(profiles.size());
    for (const auto& [label, members] : by_cluster) {
        ClusterReport::ClusterRow row;
        row.label = label;
        row.size = members.size();
        row.proportion = members.size() / total;
        for (const auto* p : members) {
            row.mean_retweet += p->avg_retweet;
            row.mean_like += p->avg_like;
            row.mean_answer += p->avg_answer;
            row.mean_follow += p->avg_follow;
            row.mean_effortless += p->effortless;
        }
        const double n = static_cast<double>(members.size());
        row.mean_retweet /= n;
        row.mean_like /= n;
        row.mean_answer /= n;
        row.mean_follow /= n;
        row.mean_effortless /= n;
        rep.clusters.push_back(row);
    }
    std::sort(rep.clusters.begin(), rep.clusters.end(),
              [](const auto& a, const auto& b) {
                  if (a.mean_effortless != b.mean_effortless)
                      return a.mean_effortless < b.mean_effortless;
                  return a.label < b.label;
              });
    for (size_t i = 0; i < rep.clusters.size(); ++i)
        rep.clusters[i].order = static_cast<int>(i);

    // per-cluster survival curves of seeker and (pooled, deduplicated) expert
    // features
    for (const auto& [label, members] : by_cluster) {
        std::map<std::string, std::vector<double>> seeker_vals;
        std::set<UserId> cluster_experts;
        for (const auto* p : members) {
            auto fit = seeker_features.find(p->seeker_id);
            if (fit != seeker_features.end())
                for (const auto& [name, v] : fit->second) seeker_vals[name].push_back(v);
            auto eit = experts_per_seeker.find(p->seeker_id);
            if (eit != experts_per_seeker.end())
                cluster_experts.insert(eit->second.begin(), eit->second.end());
        }
        for (auto& [name, vals] : seeker_vals)
            if (!vals.empty()) rep.seeker_feature_icdfs[name][label] = icdf(vals);

        std::map<std::string, std::vector<double>> expert_vals;
        for (const auto& e : cluster_experts) {
            auto fit = expert_features.find(e);
            if (fit != expert_features.end())
                for (const auto& [name, v] : fit->second) expert_vals[name].push_back(v);
        }
        for (auto& [name, vals] : expert_vals)
            if (!vals.empty()) rep.expert_feature_icdfs[name][label] = icdf(vals);
    }

    for (const auto& [label, members] : by_cluster) {
        for (size_t l = 10; l <= 600; l += 10) {
            size_t count = 0;
            for (const auto* p : members) {
                auto it = listing_counts.find(p->seeker_id);
                if (it != listing_counts.end() && it->second >= l) ++count;
            }
            rep.listed_fractions.push_back(
                {label, l, count / static_cast<double>(members.size())});
        }
    }
    return rep;
}

}  // namespace iwaa
