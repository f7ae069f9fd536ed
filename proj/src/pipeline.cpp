#include "iwaa/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "iwaa/cluster_report.hpp"
#include "iwaa/csv.hpp"
#include "json.hpp"

namespace iwaa {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config

json params_to_json(const RunConfig& cfg) {
    json j;
    j["inputs"] = {{"posts", cfg.posts_path},
                   {"likes", cfg.likes_path},
                   {"follows", cfg.follows_path},
                   {"users", cfg.users_path},
                   {"lists", cfg.lists_path}};
    j["out_dir"] = cfg.out_dir;
    j["filter_policy"] = {{"max_friends", cfg.filter_policy.max_friends},
                          {"require_posts", cfg.filter_policy.require_posts},
                          {"require_likes", cfg.filter_policy.require_likes},
                          {"exclude_private", cfg.filter_policy.exclude_private},
                          {"min_friends", cfg.filter_policy.min_friends}};
    j["expert_threshold"] = {{"min_listings", cfg.expert_threshold.min_listings}};
    j["exposure"] = {{"wall_depth", cfg.exposure.wall_depth},
                     {"decay_exponent", cfg.exposure.decay_exponent}};
    json grid = json::array();
    for (const auto& e : cfg.exposure_grid)
        grid.push_back({{"wall_depth", e.wall_depth}, {"decay_exponent", e.decay_exponent}});
    j["exposure_grid"] = grid;
    j["presence"] = {{"bandwidth_left_hours", cfg.presence.bandwidth_left_hours},
                     {"bandwidth_right_hours", cfg.presence.bandwidth_right_hours},
                     {"session_gap_seconds", cfg.presence.session_gap_seconds}};
    j["window_days"] = cfg.window_days;
    j["reaction_window_days"] = cfg.reaction_window_days;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["sample_size"] = cfg.sample_size;
    j["max_friends_visibility"] = cfg.max_friends_visibility;
    j["nonreacting_threshold"] = cfg.nonreacting_threshold;
    j["visibility_threshold_seconds"] = cfg.visibility_threshold_seconds;
    return j;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    RunConfig cfg;
    try {
        const json& inputs = j.at("inputs");
        cfg.posts_path = inputs.at("posts").get<std::string>();
        cfg.likes_path = inputs.at("likes").get<std::string>();
        cfg.follows_path = inputs.at("follows").get<std::string>();
        cfg.users_path = inputs.at("users").get<std::string>();
        cfg.lists_path = inputs.at("lists").get<std::string>();
        cfg.out_dir = j.at("out_dir").get<std::string>();

        if (j.contains("filter_policy")) {
            const json& p = j["filter_policy"];
            maybe(p, "max_friends", cfg.filter_policy.max_friends);
            maybe(p, "require_posts", cfg.filter_policy.require_posts);
            maybe(p, "require_likes", cfg.filter_policy.require_likes);
            maybe(p, "exclude_private", cfg.filter_policy.exclude_private);
            maybe(p, "min_friends", cfg.filter_policy.min_friends);
        }
        if (j.contains("expert_threshold"))
            maybe(j["expert_threshold"], "min_listings", cfg.expert_threshold.min_listings);
        if (j.contains("exposure")) {
            maybe(j["exposure"], "wall_depth", cfg.exposure.wall_depth);
            maybe(j["exposure"], "decay_exponent", cfg.exposure.decay_exponent);
        }
        if (j.contains("exposure_grid")) {
            cfg.exposure_grid.clear();
            for (const auto& e : j["exposure_grid"]) {
                ExposureParams p;
                maybe(e, "wall_depth", p.wall_depth);
                maybe(e, "decay_exponent", p.decay_exponent);
                cfg.exposure_grid.push_back(p);
            }
        }
        if (j.contains("presence")) {
            const json& p = j["presence"];
            maybe(p, "bandwidth_left_hours", cfg.presence.bandwidth_left_hours);
            maybe(p, "bandwidth_right_hours", cfg.presence.bandwidth_right_hours);
            maybe(p, "session_gap_seconds", cfg.presence.session_gap_seconds);
        }
        maybe(j, "window_days", cfg.window_days);
        maybe(j, "reaction_window_days", cfg.reaction_window_days);
        maybe(j, "seed", cfg.seed);
        maybe(j, "workers", cfg.workers);
        maybe(j, "sample_size", cfg.sample_size);
        maybe(j, "max_friends_visibility", cfg.max_friends_visibility);
        maybe(j, "nonreacting_threshold", cfg.nonreacting_threshold);
        maybe(j, "visibility_threshold_seconds", cfg.visibility_threshold_seconds);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string RunConfig::to_json() const { return params_to_json(*this).dump(2); }

void RunConfig::validate() const {
    std::set<std::string> paths = {posts_path, likes_path, follows_path, users_path, lists_path};
    if (paths.size() != 5) throw ConfigError("input paths must be distinct");
    if (out_dir.empty()) throw ConfigError("out_dir must be set");
    if (filter_policy.max_friends <= filter_policy.min_friends)
        throw ConfigError("filter_policy: max_friends must exceed min_friends");
    if (expert_threshold.min_listings < 1)
        throw ConfigError("expert_threshold.min_listings must be >= 1");
    if (exposure.wall_depth < 1 || exposure.decay_exponent < 1)
        throw ConfigError("exposure: k and m must be >= 1");
    if (presence.bandwidth_left_hours <= 0 || presence.bandwidth_right_hours <= 0 ||
        presence.session_gap_seconds <= 0)
        throw ConfigError("presence params must be positive");
    if (window_days < 1) throw ConfigError("window_days must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = {
        "ingest", "roles", "reactions", "cluster", "visibility", "sweep", "report"};
    return names;
}

namespace {

struct DefaultGrid {
    DefaultGrid() {
        for (int k : {30, 60, 100})
            for (int m : {1, 2}) grid.push_back({k, m});
    }
    std::vector<ExposureParams> grid;
};

std::vector<ExposureParams> effective_grid(const RunConfig& cfg) {
    if (!cfg.exposure_grid.empty()) return cfg.exposure_grid;
    static const DefaultGrid def;
    return def.grid;
}

// -------------------------------------------------------------- raw inputs

struct Loaded {
    ActivityMap activity;
    Roster roster;
    LoadReport report;
    Timestamp span_min{0};
    Timestamp span_max{0};  // exclusive-ish: max observed + 1us
};

Loaded load_inputs(const RunConfig& cfg) {
    Loaded l;
    l.activity = load_events(cfg.posts_path, l.report);
    load_likes(cfg.likes_path, l.activity, l.report);
    l.roster = load_roster(cfg.follows_path, cfg.lists_path, cfg.users_path, l.report);

    bool any = false;
    for (const auto& [_, seq] : l.activity) {
        for (const auto& e : seq.events) {
            if (!any || e.created_at < l.span_min) l.span_min = e.created_at;
            if (!any || l.span_max < e.created_at) l.span_max = e.created_at;
            any = true;
        }
    }
    for (const auto& rec : l.roster.lists) {
        if (!any || rec.created_at < l.span_min) l.span_min = rec.created_at;
        if (!any || l.span_max < rec.created_at) l.span_max = rec.created_at;
        any = true;
    }
    l.span_max.us += 1;
    return l;
}

// --------------------------------------------------- persisted intermediates

void write_pairs_jsonl(const std::string& path, const PairTable& table) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    for (const auto& r : table.rows) {
        json j;
        j["seeker_id"] = r.seeker_id;
        j["expert_id"] = r.expert_id;
        j["topic"] = r.topic;
        j["list_id"] = r.list_id;
        j["list_created_at"] = format_rfc3339(r.list_created_at);
        j["followed"] = r.seeker_follows_expert;
        out << j.dump() << '\n';
    }
}

PairTable read_pairs_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open intermediate (run the roles stage first): " + path);
    PairTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        PairRow r;
        r.seeker_id = j.at("seeker_id").get<std::string>();
        r.expert_id = j.at("expert_id").get<std::string>();
        r.topic = j.at("topic").get<std::string>();
        r.list_id = j.at("list_id").get<std::string>();
        r.list_created_at = parse_rfc3339(j.at("list_created_at").get<std::string>());
        r.seeker_follows_expert = j.at("followed").get<bool>();
        table.rows.push_back(std::move(r));
    }
    return table;
}

void write_reactions_csv(const std::string& path, const std::vector<ReactionProfile>& profiles) {
    CsvWriter csv(path, {"seeker_id", "avg_r", "avg_l", "avg_a", "avg_f", "effortless"});
    for (const auto& p : profiles)
        csv.row({p.seeker_id, fmt_double(p.avg_retweet), fmt_double(p.avg_like),
                 fmt_double(p.avg_answer), fmt_double(p.avg_follow), fmt_double(p.effortless)});
}

std::vector<ReactionProfile> read_reactions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open intermediate (run the reactions stage first): " + path);
    std::vector<ReactionProfile> out;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        ReactionProfile p;
        std::getline(ss, p.seeker_id, ',');
        std::getline(ss, cell, ',');
        p.avg_retweet = std::stod(cell);
        std::getline(ss, cell, ',');
        p.avg_like = std::stod(cell);
        std::getline(ss, cell, ',');
        p.avg_answer = std::stod(cell);
        std::getline(ss, cell, ',');
        p.avg_follow = std::stod(cell);
        std::getline(ss, cell, ',');
        p.effortless = std::stod(cell);
        out.push_back(std::move(p));
    }
    return out;
}

std::map<UserId, int> read_clusters_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open intermediate (run the cluster stage first): " + path);
    std::map<UserId, int> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        out[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
    }
    return out;
}

void write_icdf_csv(const std::string& path, const ICDFCurve& curve) {
    CsvWriter csv(path, {"value", "survival_fraction"});
    for (size_t i = 0; i < curve.support.size(); ++i)
        csv.row({fmt_double(curve.support[i]), fmt_double(curve.survival[i])});
}

// ------------------------------------------------------------ shared helpers

// Per-(seeker, expert) indicators, OR-merged across that seeker's Lists,
// each List anchoring its own reaction window.
std::map<UserId, std::map<UserId, PerExpertIndicators>> pair_indicators(
    const Loaded& l, const PairTable& pairs, int reaction_window_days) {
    std::map<UserId, std::map<UserId, PerExpertIndicators>> out;
    static const ActivitySequence empty_seq;
    for (const auto& r : pairs.rows) {
        Timestamp t1 = l.span_min, t2 = l.span_max;
        if (reaction_window_days > 0) {
            t1 = r.list_created_at - Duration::from_days(reaction_window_days);
            t2 = r.list_created_at;
        }
        auto ait = l.activity.find(r.seeker_id);
        const ActivitySequence& seq = ait == l.activity.end() ? empty_seq : ait->second;
        PerExpertIndicators& ind = out[r.seeker_id][r.expert_id];
        ind.retweet |= indicator(seq, r.seeker_id, r.expert_id, ReactionKind::Retweet,
                                 l.roster, t1, t2);
        ind.like |= indicator(seq, r.seeker_id, r.expert_id, ReactionKind::Like,
                              l.roster, t1, t2);
        ind.answer |= indicator(seq, r.seeker_id, r.expert_id, ReactionKind::Answer,
                                l.roster, t1, t2);
        ind.follow |= indicator(seq, r.seeker_id, r.expert_id, ReactionKind::Follow,
                                l.roster, t1, t2);
    }
    return out;
}

std::vector<ReactionProfile> compute_profiles(const RunConfig& cfg, const Loaded& l,
                                              const PairTable& pairs) {
    std::vector<ReactionProfile> profiles;
    for (const auto& [seeker, by_expert] :
         pair_indicators(l, pairs, cfg.reaction_window_days))
        profiles.push_back(profile_from_indicators(seeker, by_expert));
    return profiles;
}

std::map<std::string, double> user_features(const Loaded& l, const UserId& u,
                                            double span_days, bool with_likes) {
    const auto parts = [&] {
        auto it = l.activity.find(u);
        static const ActivitySequence empty_seq;
        return partition_by_kind(it == l.activity.end() ? empty_seq : it->second);
    }();
    size_t followers = 0;
    for (const auto& [a, b] : l.roster.follows)
        if (b == u) ++followers;
    std::map<std::string, double> f;
    f["rate_tweets"] = parts.at(PostKind::Tweet).events.size() / span_days;
    f["rate_retweets"] = parts.at(PostKind::Retweet).events.size() / span_days;
    f["rate_answers"] = parts.at(PostKind::Reply).events.size() / span_days;
    if (with_likes) {
        auto it = l.activity.find(u);
        f["likes_count"] = it == l.activity.end() ? 0.0 : static_cast<double>(it->second.likes.size());
    }
    f["friends"] = static_cast<double>(l.roster.friend_count(u));
    f["followers"] = static_cast<double>(followers);
    return f;
}

// Seekers eligible for the visibility stage: restricted to non-reacting
// clusters, sampled, then capped by friend count.
std::set<UserId> select_visibility_seekers(const RunConfig& cfg, const Loaded& l,
                                           const std::vector<ReactionProfile>& profiles,
                                           const std::map<UserId, int>& assignments) {
    // non-reacting clusters: mean effortless at or below the threshold
    std::map<int, std::pair<double, size_t>> acc;
    for (const auto& p : profiles) {
        auto it = assignments.find(p.seeker_id);
        if (it == assignments.end()) continue;
        acc[it->second].first += p.effortless;
        acc[it->second].second += 1;
    }
    std::set<int> nonreacting;
    for (const auto& [label, sums] : acc)
        if (sums.first / static_cast<double>(sums.second) <= cfg.nonreacting_threshold)
            nonreacting.insert(label);

    std::vector<UserId> pool;
    for (const auto& p : profiles) {
        auto it = assignments.find(p.seeker_id);
        const bool in_pool = nonreacting.empty() || it == assignments.end() ||
                             nonreacting.count(it->second);
        if (in_pool) pool.push_back(p.seeker_id);
    }
    std::sort(pool.begin(), pool.end());

    if (cfg.sample_size > 0 && cfg.sample_size < pool.size()) {
        std::mt19937_64 rng(cfg.seed);
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(cfg.sample_size);
        std::sort(pool.begin(), pool.end());
    }

    std::set<UserId> selected;
    for (const auto& s : pool)
        if (l.roster.friend_count(s) < cfg.max_friends_visibility) selected.insert(s);
    return selected;
}

struct VisibilityData {
    std::vector<PairRow> rows;        // rows whose seeker was selected
    std::map<UserId, Wall> walls;     // per selected seeker
    std::map<UserId, std::vector<Timestamp>> posts;
};

VisibilityData prepare_visibility(const RunConfig& cfg, const Loaded& l,
                                  const PairTable& pairs, const std::set<UserId>& seekers) {
    VisibilityData data;
    for (const auto& r : pairs.rows)
        if (seekers.count(r.seeker_id)) data.rows.push_back(r);
    static const ActivitySequence empty_seq;
    for (const auto& s : seekers) {
        data.walls.emplace(s, build_wall(s, l.roster, l.activity));
        auto it = l.activity.find(s);
        data.posts[s] = post_times(it == l.activity.end() ? empty_seq : it->second);
    }
    (void)cfg;
    return data;
}

std::vector<VisibilityBound> compute_bounds(const RunConfig& cfg, const VisibilityData& data,
                                            const ExposureParams& ep) {
    std::vector<std::vector<VisibilityBound>> per_row(data.rows.size());
    const int workers = std::min<int>(cfg.workers, std::max<size_t>(1, data.rows.size()));
    auto work = [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) {
            const auto& r = data.rows[i];
            per_row[i] = pair_day_bounds(data.walls.at(r.seeker_id), r,
                                         data.posts.at(r.seeker_id), ep, cfg.presence,
                                         cfg.window_days);
        }
    };
    if (workers <= 1) {
        work(0, data.rows.size());
    } else {
        std::vector<std::thread> threads;
        const size_t chunk = (data.rows.size() + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const size_t b = w * chunk;
            if (b >= data.rows.size()) break;
            threads.emplace_back(work, b, std::min(b + chunk, data.rows.size()));
        }
        for (auto& t : threads) t.join();
    }
    std::vector<VisibilityBound> out;
    for (auto& v : per_row) out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::map<std::string, std::map<UserId, SeekerAverage>> read_averages_csv(
    const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open intermediate (run the visibility stage first): " + path);
    std::map<std::string, std::map<UserId, SeekerAverage>> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string seeker, group, lo, hi;
        std::getline(ss, seeker, ',');
        std::getline(ss, group, ',');
        std::getline(ss, lo, ',');
        std::getline(ss, hi, ',');
        out[group][seeker] = {std::stod(lo), std::stod(hi), 0};
    }
    return out;
}

// -------------------------------------------------------------------- stages

struct StageContext {
    const RunConfig& cfg;
    std::vector<std::string>& outputs;  // files written, for the manifest

    std::string path(const std::string& name) const {
        return (fs::path(cfg.out_dir) / name).string();
    }
    std::string out(const std::string& name) {
        const std::string p = path(name);
        outputs.push_back(p);
        return p;
    }
};

void stage_ingest(StageContext& ctx, StageResult& res) {
    const Loaded l = load_inputs(ctx.cfg);
    {
        std::ofstream out(ctx.out("rejects.jsonl"));
        for (const auto& r : l.report.rejects) {
            json j;
            j["file"] = r.file;
            j["line"] = r.line_no;
            j["reason"] = r.reason;
            out << j.dump() << '\n';
        }
    }
    res.row_counts["lines_read"] = l.report.lines_read;
    res.row_counts["records_loaded"] = l.report.records_loaded;
    res.row_counts["rejects"] = l.report.rejects.size();
    res.row_counts["users"] = l.roster.users.size();
    res.row_counts["follow_edges"] = l.roster.follows.size();
    res.row_counts["lists"] = l.roster.lists.size();
    res.row_counts["self_edges_dropped"] = l.report.self_edges_dropped;
}

void stage_roles(StageContext& ctx, StageResult& res) {
    const Loaded l = load_inputs(ctx.cfg);
    const auto experts = identify_experts(l.roster.lists, ctx.cfg.expert_threshold);
    std::set<UserId> creators;
    for (const auto& rec : l.roster.lists) creators.insert(rec.creator_id);
    const auto filtered = filter_seekers(creators, l.roster, l.activity, ctx.cfg.filter_policy);
    const auto pairs = build_pairs(l.roster.lists, experts, filtered.kept, l.roster);

    write_pairs_jsonl(ctx.out("pairs.jsonl"), pairs);
    {
        std::ofstream out(ctx.out("drops.jsonl"));
        for (const auto& [user, reason] : filtered.dropped) {
            json j;
            j["user_id"] = user;
            j["reason"] = reason;
            out << j.dump() << '\n';
        }
    }
    res.row_counts["creators"] = creators.size();
    res.row_counts["kept_seekers"] = filtered.kept.size();
    res.row_counts["dropped_seekers"] = filtered.dropped.size();
    res.row_counts["pairs"] = pairs.rows.size();
    size_t n_experts = 0;
    for (const auto& [_, s] : experts) n_experts += s.size();
    res.row_counts["experts"] = n_experts;
}

void stage_reactions(StageContext& ctx, StageResult& res) {
    const Loaded l = load_inputs(ctx.cfg);
    const PairTable pairs = read_pairs_jsonl(ctx.path("pairs.jsonl"));
    const auto profiles = compute_profiles(ctx.cfg, l, pairs);
    write_reactions_csv(ctx.out("reactions.csv"), profiles);

    if (!profiles.empty()) {
        std::map<std::string, std::vector<double>> metrics;
        for (const auto& p : profiles) {
            metrics["avg_r"].push_back(p.avg_retweet);
            metrics["avg_l"].push_back(p.avg_like);
            metrics["avg_a"].push_back(p.avg_answer);
            metrics["avg_f"].push_back(p.avg_follow);
            metrics["effortless"].push_back(p.effortless);
        }
        for (const auto& [name, vals] : metrics)
            write_icdf_csv(ctx.out("icdf_" + name + ".csv"), icdf(vals));

        // population feature curves, seekers vs experts
        const double span_days =
            std::max(1e-9, (l.span_max - l.span_min).seconds / 86400.0);
        std::set<UserId> expert_ids;
        for (const auto& r : pairs.rows) expert_ids.insert(r.expert_id);
        std::map<std::string, std::vector<double>> seeker_vals, expert_vals;
        for (const auto& p : profiles)
            for (const auto& [name, v] : user_features(l, p.seeker_id, span_days, true))
                seeker_vals[name].push_back(v);
        for (const auto& e : expert_ids)
            for (const auto& [name, v] : user_features(l, e, span_days, false))
                expert_vals[name].push_back(v);
        for (const auto& [name, vals] : seeker_vals)
            if (!vals.empty())
                write_icdf_csv(ctx.out("icdf_seekers_" + name + ".csv"), icdf(vals));
        for (const auto& [name, vals] : expert_vals)
            if (!vals.empty())
                write_icdf_csv(ctx.out("icdf_experts_" + name + ".csv"), icdf(vals));
    }
    res.row_counts["profiles"] = profiles.size();
    res.row_counts["pairs"] = pairs.rows.size();
}

void stage_cluster(StageContext& ctx, StageResult& res) {
    const Loaded l = load_inputs(ctx.cfg);
    const PairTable pairs = read_pairs_jsonl(ctx.path("pairs.jsonl"));
    auto profiles = read_reactions_csv(ctx.path("reactions.csv"));
    std::sort(profiles.begin(), profiles.end(),
              [](const auto& a, const auto& b) { return a.seeker_id < b.seeker_id; });
    if (profiles.size() < 3)
        throw ConfigError("cluster: need at least 3 profiled seekers");

    FeatureMatrix X(profiles.size(), 3);
    for (size_t i = 0; i < profiles.size(); ++i) {
        X(i, 0) = profiles[i].avg_retweet;
        X(i, 1) = profiles[i].avg_like;
        X(i, 2) = profiles[i].avg_answer;
    }

    std::vector<CvRecord> records;
    const ClusterModel model = cross_validate(X, default_grid(), ctx.cfg.seed, &records);

    std::map<UserId, int> assignments;
    {
        CsvWriter csv(ctx.out("clusters.csv"), {"seeker_id", "label"});
        for (size_t i = 0; i < profiles.size(); ++i) {
            assignments[profiles[i].seeker_id] = model.labels[i];
            csv.row({profiles[i].seeker_id, std::to_string(model.labels[i])});
        }
    }
    {
        CsvWriter csv(ctx.out("cv_results.csv"),
                      {"algorithm", "params", "n_clusters", "silhouette", "degenerate"});
        for (const auto& r : records) {
            std::string params;
            for (const auto& [k, v] : r.entry.params) {
                if (!params.empty()) params += ';';
                params += k + "=" + fmt_double(v);
            }
            csv.row({to_string(r.entry.algorithm), params, std::to_string(r.n_clusters),
                     fmt_double(r.silhouette_score), r.degenerate ? "1" : "0"});
        }
    }

    // report tables mirroring the per-cluster panels
    const double span_days = std::max(1e-9, (l.span_max - l.span_min).seconds / 86400.0);
    std::map<UserId, std::map<std::string, double>> seeker_features, expert_features;
    std::map<UserId, std::set<UserId>> experts_per_seeker;
    std::map<UserId, size_t> listing_counts;
    for (const auto& r : pairs.rows) experts_per_seeker[r.seeker_id].insert(r.expert_id);
    for (const auto& p : profiles)
        seeker_features[p.seeker_id] = user_features(l, p.seeker_id, span_days, true);
    for (const auto& [_, es] : experts_per_seeker)
        for (const auto& e : es)
            if (!expert_features.count(e))
                expert_features[e] = user_features(l, e, span_days, false);
    {
        std::map<UserId, std::set<std::string>> lists_containing;
        for (const auto& rec : l.roster.lists)
            for (const auto& m : rec.member_ids) lists_containing[m].insert(rec.list_id);
        for (const auto& p : profiles) {
            auto it = lists_containing.find(p.seeker_id);
            listing_counts[p.seeker_id] = it == lists_containing.end() ? 0 : it->second.size();
        }
    }
    const ClusterReport rep = cluster_report(assignments, profiles, seeker_features,
                                             expert_features, experts_per_seeker,
                                             listing_counts);

    fs::create_directories(fs::path(ctx.cfg.out_dir) / "cluster_report");
    {
        CsvWriter csv(ctx.out("cluster_report/clusters_summary.csv"),
                      {"order", "label", "size", "proportion", "mean_r", "mean_l", "mean_a",
                       "mean_f", "mean_effortless"});
        for (const auto& c : rep.clusters)
            csv.row({std::to_string(c.order), std::to_string(c.label), std::to_string(c.size),
                     fmt_double(c.proportion), fmt_double(c.mean_retweet),
                     fmt_double(c.mean_like), fmt_double(c.mean_answer),
                     fmt_double(c.mean_follow), fmt_double(c.mean_effortless)});
    }
    auto dump_feature_icdfs = [&](const char* prefix, const auto& curves) {
        for (const auto& [name, by_label] : curves)
            for (const auto& [label, curve] : by_label)
                write_icdf_csv(ctx.out("cluster_report/icdf_" + std::string(prefix) + "_" +
                                       name + "_cluster" + std::to_string(label) + ".csv"),
                               curve);
    };
    dump_feature_icdfs("seekers", rep.seeker_feature_icdfs);
    dump_feature_icdfs("experts", rep.expert_feature_icdfs);
    {
        CsvWriter csv(ctx.out("cluster_report/listed_fractions.csv"),
                      {"label", "min_listings", "fraction"});
        for (const auto& r : rep.listed_fractions)
            csv.row({std::to_string(r.label), std::to_string(r.min_listings),
                     fmt_double(r.fraction)});
    }

    res.row_counts["seekers_clustered"] = profiles.size();
    res.row_counts["clusters"] = rep.clusters.size();
    res.row_counts["grid_entries"] = records.size();
}

void write_averages_csv(StageContext& ctx, const std::string& name,
                        const std::vector<VisibilityBound>& bounds) {
    CsvWriter csv(ctx.out(name), {"seeker_id", "group", "mean_lower_seconds_per_day",
                                  "mean_upper_seconds_per_day"});
    const std::pair<const char*, ExpertGroup> groups[] = {
        {"all", ExpertGroup::All},
        {"followed", ExpertGroup::Followed},
        {"unfollowed", ExpertGroup::Unfollowed}};
    for (const auto& [label, group] : groups)
        for (const auto& [seeker, avg] : average_visibility(bounds, group))
            csv.row({seeker, label, fmt_double(avg.mean_lower_seconds_per_day),
                     fmt_double(avg.mean_upper_seconds_per_day)});
}

void stage_visibility(StageContext& ctx, StageResult& res) {
    const Loaded l = load_inputs(ctx.cfg);
    const PairTable pairs = read_pairs_jsonl(ctx.path("pairs.jsonl"));
    const auto profiles = read_reactions_csv(ctx.path("reactions.csv"));
    const auto assignments = read_clusters_csv(ctx.path("clusters.csv"));

    const auto seekers = select_visibility_seekers(ctx.cfg, l, profiles, assignments);
    const VisibilityData data = prepare_visibility(ctx.cfg, l, pairs, seekers);
    const auto bounds = compute_bounds(ctx.cfg, data, ctx.cfg.exposure);

    {
        CsvWriter csv(ctx.out("visibility.csv"),
                      {"seeker_id", "expert_id", "day_index", "lower_seconds",
                       "upper_seconds", "followed"});
        for (const auto& b : bounds)
            csv.row({b.seeker_id, b.expert_id, std::to_string(b.day_index),
                     fmt_double(b.lower_seconds), fmt_double(b.upper_seconds),
                     b.followed ? "1" : "0"});
    }
    write_averages_csv(ctx, "averages.csv", bounds);
    {
        const auto all = average_visibility(bounds, ExpertGroup::All);
        CsvWriter csv(ctx.out("friends_vs_visibility.csv"),
                      {"seeker_id", "friend_count", "mean_upper_seconds_per_day"});
        for (const auto& r : friends_vs_visibility(all, l.roster))
            csv.row({r.seeker_id, std::to_string(r.friend_count),
                     fmt_double(r.mean_upper_seconds_per_day)});
        if (!all.empty()) {
            std::vector<double> lb, ub;
            for (const auto& [_, a] : all) {
                lb.push_back(a.mean_lower_seconds_per_day);
                ub.push_back(a.mean_upper_seconds_per_day);
            }
            write_icdf_csv(ctx.out("icdf_vis_lb.csv"), icdf(lb));
            write_icdf_csv(ctx.out("icdf_vis_ub.csv"), icdf(ub));
        }
    }
    res.row_counts["selected_seekers"] = seekers.size();
    res.row_counts["pair_rows"] = data.rows.size();
    res.row_counts["bound_rows"] = bounds.size();
}

void stage_sweep(StageContext& ctx, StageResult& res) {
    const Loaded l = load_inputs(ctx.cfg);
    const PairTable pairs = read_pairs_jsonl(ctx.path("pairs.jsonl"));
    const auto profiles = read_reactions_csv(ctx.path("reactions.csv"));
    const auto assignments = read_clusters_csv(ctx.path("clusters.csv"));
    const auto seekers = select_visibility_seekers(ctx.cfg, l, profiles, assignments);
    const VisibilityData data = prepare_visibility(ctx.cfg, l, pairs, seekers);

    struct Curves {
        ExposureParams ep;
        ICDFCurve lb, ub;
        bool ok = false;
    };
    std::vector<Curves> all_curves;
    for (const auto& ep : effective_grid(ctx.cfg)) {
        const auto bounds = compute_bounds(ctx.cfg, data, ep);
        const auto avg = average_visibility(bounds, ExpertGroup::All);
        Curves c;
        c.ep = ep;
        if (!avg.empty()) {
            std::vector<double> lb, ub;
            for (const auto& [_, a] : avg) {
                lb.push_back(a.mean_lower_seconds_per_day);
                ub.push_back(a.mean_upper_seconds_per_day);
            }
            c.lb = icdf(lb);
            c.ub = icdf(ub);
            c.ok = true;
            const std::string tag = "k" + std::to_string(ep.wall_depth) + "_m" +
                                    std::to_string(ep.decay_exponent);
            write_icdf_csv(ctx.out("sweep_icdf_" + tag + "_lb.csv"), c.lb);
            write_icdf_csv(ctx.out("sweep_icdf_" + tag + "_ub.csv"), c.ub);
        }
        all_curves.push_back(std::move(c));
    }

    // max survival deviation across configurations at matched values
    CsvWriter csv(ctx.out("sweep_summary.csv"),
                  {"side", "max_deviation", "at_value_seconds"});
    for (const char* side : {"lower", "upper"}) {
        std::vector<double> support;
        for (const auto& c : all_curves) {
            if (!c.ok) continue;
            const auto& curve = side == std::string("lower") ? c.lb : c.ub;
            support.insert(support.end(), curve.support.begin(), curve.support.end());
        }
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        double max_dev = 0, at_value = 0;
        for (double v : support) {
            double lo = 1, hi = 0;
            for (const auto& c : all_curves) {
                if (!c.ok) continue;
                const double s = (side == std::string("lower") ? c.lb : c.ub).at(v);
                lo = std::min(lo, s);
                hi = std::max(hi, s);
            }
            if (hi - lo > max_dev) {
                max_dev = hi - lo;
                at_value = v;
            }
        }
        csv.row({side, fmt_double(max_dev), fmt_double(at_value)});
    }
    res.row_counts["configurations"] = all_curves.size();
    res.row_counts["pair_rows"] = data.rows.size();
}

void stage_report(StageContext& ctx, StageResult& res) {
    const auto averages = read_averages_csv(ctx.path("averages.csv"));
    const auto rep = report_thresholds(averages, ctx.cfg.visibility_threshold_seconds);
    CsvWriter csv(ctx.out("thresholds.csv"),
                  {"group", "side", "threshold_seconds", "fraction_at_or_above", "seekers"});
    for (const auto& r : rep.rows)
        csv.row({r.group, r.side, fmt_double(r.threshold_seconds),
                 fmt_double(r.fraction_at_or_above), std::to_string(r.seekers)});
    {
        CsvWriter zcsv(ctx.out("zero_upper.csv"), {"zero_upper_fraction"});
        zcsv.row({fmt_double(rep.zero_upper_fraction)});
    }
    res.row_counts["threshold_rows"] = rep.rows.size();
}

}  // namespace

ThresholdReport report_thresholds(
    const std::map<std::string, std::map<UserId, SeekerAverage>>& averages_by_group,
    double threshold_seconds) {
    ThresholdReport rep;
    for (const char* group : {"all", "followed", "unfollowed"}) {
        auto git = averages_by_group.find(group);
        if (git == averages_by_group.end()) continue;
        for (const char* side : {"lower", "upper"}) {
            ThresholdRow row;
            row.group = group;
            row.side = side;
            row.threshold_seconds = threshold_seconds;
            row.seekers = git->second.size();
            size_t above = 0;
            for (const auto& [_, a] : git->second) {
                const double v = side == std::string("lower") ? a.mean_lower_seconds_per_day
                                                              : a.mean_upper_seconds_per_day;
                if (v >= threshold_seconds) ++above;
            }
            row.fraction_at_or_above =
                row.seekers ? above / static_cast<double>(row.seekers) : 0.0;
            rep.rows.push_back(row);
        }
    }
    auto ait = averages_by_group.find("all");
    if (ait != averages_by_group.end() && !ait->second.empty()) {
        size_t zero = 0;
        for (const auto& [_, a] : ait->second)
            if (a.mean_upper_seconds_per_day == 0.0) ++zero;
        rep.zero_upper_fraction = zero / static_cast<double>(ait->second.size());
    }
    return rep;
}

std::vector<StageResult> run_pipeline(const RunConfig& cfg,
                                      const std::vector<std::string>& stages) {
    cfg.validate();
    for (const auto& s : stages)
        if (std::find(stage_names().begin(), stage_names().end(), s) == stage_names().end())
            throw ConfigError("unknown stage: " + s);

    fs::create_directories(cfg.out_dir);
    std::vector<std::string> outputs;
    std::vector<StageResult> results;
    std::string failure;
    bool failure_is_input = false;

    for (const auto& name : stage_names()) {
        if (std::find(stages.begin(), stages.end(), name) == stages.end()) continue;
        StageResult res;
        res.name = name;
        StageContext ctx{cfg, outputs};
        const auto start = std::chrono::steady_clock::now();
        try {
            if (name == "ingest") stage_ingest(ctx, res);
            else if (name == "roles") stage_roles(ctx, res);
            else if (name == "reactions") stage_reactions(ctx, res);
            else if (name == "cluster") stage_cluster(ctx, res);
            else if (name == "visibility") stage_visibility(ctx, res);
            else if (name == "sweep") stage_sweep(ctx, res);
            else if (name == "report") stage_report(ctx, res);
            res.complete = true;
        } catch (const InputError& e) {
            failure = std::string(name) + ": " + e.what();
            failure_is_input = true;
        } catch (const std::exception& e) {
            failure = std::string(name) + ": " + e.what();
        }
        res.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(res));
        if (!failure.empty()) break;
    }

    // manifest.json is deterministic for a given (inputs, config); wall-clock
    // timings live in timings.json so reruns stay byte-identical.
    json manifest;
    manifest["config"] = params_to_json(cfg);
    json input_digests;
    for (const auto& [name, path] :
         std::initializer_list<std::pair<const char*, const std::string&>>{
             {"posts", cfg.posts_path},
             {"likes", cfg.likes_path},
             {"follows", cfg.follows_path},
             {"users", cfg.users_path},
             {"lists", cfg.lists_path}}) {
        try {
            input_digests[name] = file_digest(path);
        } catch (const std::exception&) {
            input_digests[name] = nullptr;
        }
    }
    manifest["input_digests"] = input_digests;
    json stages_json = json::array();
    for (const auto& r : results) {
        json s;
        s["name"] = r.name;
        s["complete"] = r.complete;
        s["row_counts"] = r.row_counts;
        stages_json.push_back(s);
    }
    manifest["stages"] = stages_json;
    std::sort(outputs.begin(), outputs.end());
    json files;
    for (const auto& p : outputs) files[fs::path(p).lexically_relative(cfg.out_dir).string()] =
        file_digest(p);
    manifest["outputs"] = files;
    manifest["complete"] = failure.empty();
    {
        std::ofstream out((fs::path(cfg.out_dir) / "manifest.json").string());
        out << manifest.dump(2) << '\n';
    }
    {
        json timings;
        for (const auto& r : results) timings[r.name] = r.elapsed_seconds;
        std::ofstream out((fs::path(cfg.out_dir) / "timings.json").string());
        out << timings.dump(2) << '\n';
    }

    if (!failure.empty()) {
        if (failure_is_input) throw InputError(failure);
        const auto colon = failure.find(':');
        throw StageError(failure.substr(0, colon), failure.substr(colon + 2));
    }
    return results;
}

}  // namespace iwaa
