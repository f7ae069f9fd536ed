#pragma once
// End-to-end orchestration: configuration, staged execution with persisted
// intermediates, the hyperparameter sweep, threshold reports and the run
// manifest.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iwaa/clustering.hpp"
#include "iwaa/ingest.hpp"
#include "iwaa/reactions.hpp"
#include "iwaa/roles.hpp"
#include "iwaa/visibility.hpp"

namespace iwaa {

struct RunConfig {
    std::string posts_path;
    std::string likes_path;
    std::string follows_path;
    std::string users_path;
    std::string lists_path;
    std::string out_dir;

    FilterPolicy filter_policy;
    ExpertThreshold expert_threshold;
    ExposureParams exposure;
    std::vector<ExposureParams> exposure_grid;  // sweep configurations
    PresenceParams presence;
    int window_days = 30;            // daily buckets before each List creation
    int reaction_window_days = 0;    // 0 = full collection span
    uint64_t seed = 42;
    int workers = 1;
    size_t sample_size = 0;          // 0 = all seekers at the visibility stage
    size_t max_friends_visibility = 2500;
    double nonreacting_threshold = 0.05;  // cluster mean effortless at or
    // below this marks a non-reacting cluster (sampling pool)
    double visibility_threshold_seconds = 3.0;

    static RunConfig from_json_file(const std::string& path);
    std::string to_json() const;
    void validate() const;  // throws ConfigError
};

struct StageResult {
    std::string name;
    bool complete = false;
    std::map<std::string, size_t> row_counts;
    double elapsed_seconds = 0;
};

// Known stage names in pipeline order.
const std::vector<std::string>& stage_names();

// Runs the requested stages in pipeline order, persists every intermediate
// table, and writes manifest.json (config, input digests, row counts, output
// digests) plus timings.json. A stage failure throws StageError after the
// manifest has been written with the partial results marked incomplete.
std::vector<StageResult> run_pipeline(const RunConfig& cfg,
                                      const std::vector<std::string>& stages);

inline std::vector<StageResult> run_pipeline(const RunConfig& cfg) {
    return run_pipeline(cfg, stage_names());
}

struct ThresholdRow {
    std::string group;  // all / followed / unfollowed
    std::string side;   // lower / upper
    double threshold_seconds = 0;
    double fraction_at_or_above = 0;
    size_t seekers = 0;
};

struct ThresholdReport {
    std::vector<ThresholdRow> rows;
    double zero_upper_fraction = 0;  // seekers whose all-experts upper bound is 0
};

ThresholdReport report_thresholds(
    const std::map<std::string, std::map<UserId, SeekerAverage>>& averages_by_group,
    double threshold_seconds);

}  // namespace iwaa
