#pragma once
// File ingestion: JSON Lines loaders with per-line validation, writers for
// round-tripping, and a deterministic synthetic fixture generator.

#include <map>
#include <string>
#include <vector>

#include "iwaa/activity.hpp"
#include "iwaa/roster.hpp"

namespace iwaa {

struct RejectedLine {
    std::string file;
    size_t line_no = 0;  // 1-based
    std::string reason;
};

using ActivityMap = std::map<UserId, ActivitySequence>;

struct LoadReport {
    size_t lines_read = 0;
    size_t records_loaded = 0;
    size_t self_edges_dropped = 0;
    size_t duplicate_edges_dropped = 0;
    size_t empty_lists_dropped = 0;
    std::vector<RejectedLine> rejects;
};

// posts.jsonl -> events grouped by author, sorted with the global tie-break.
// Malformed lines go to report.rejects; unreadable file throws InputError.
ActivityMap load_events(const std::string& path, LoadReport& report);

// likes.jsonl merged into the per-user sequences (keyed by user_id).
void load_likes(const std::string& path, ActivityMap& activity, LoadReport& report);

// follows.jsonl + lists.jsonl + users.jsonl. Duplicate follow edges are
// deduplicated, self-edges dropped with a count, empty-member Lists dropped.
Roster load_roster(const std::string& follows_path, const std::string& lists_path,
                   const std::string& users_path, LoadReport& report);

// Writers (inverse of the loaders, for round-trips and fixture emission).
void write_posts_jsonl(const std::string& path, const ActivityMap& activity);
void write_likes_jsonl(const std::string& path, const ActivityMap& activity);
void write_follows_jsonl(const std::string& path, const Roster& roster);
void write_users_jsonl(const std::string& path, const Roster& roster);
void write_lists_jsonl(const std::string& path, const Roster& roster);

struct SyntheticConfig {
    uint64_t seed = 1;
    size_t n_seekers = 10;
    size_t n_experts = 5;
    double post_rate_per_day = 20.0;   // per user, homogeneous Poisson
    Timestamp window_start;
    Timestamp window_end;
    double follow_density = 0.5;       // P(seeker follows expert)
    double like_rate = 0.2;            // P(seeker likes a given expert post)
    size_t lists_per_seeker = 1;
};

// Deterministic in cfg.seed: the same config always yields bit-identical
// output. Every generated List names at least one expert member.
std::pair<ActivityMap, Roster> generate_synthetic(const SyntheticConfig& cfg);

}  // namespace iwaa
