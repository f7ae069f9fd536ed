// Command-line front end: staged pipeline runs, the hyperparameter sweep,
// and synthetic fixture generation.

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "iwaa/pipeline.hpp"

namespace {

int run_stages(const std::string& config_path, const std::vector<std::string>& stages,
               std::optional<uint64_t> seed, std::optional<int> workers,
               std::optional<std::string> out_dir) {
    iwaa::RunConfig cfg = iwaa::RunConfig::from_json_file(config_path);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (out_dir) cfg.out_dir = *out_dir;
    const auto results = iwaa::run_pipeline(cfg, stages);
    for (const auto& r : results) {
        std::cout << r.name << ": " << (r.complete ? "ok" : "FAILED");
        for (const auto& [k, v] : r.row_counts) std::cout << "  " << k << "=" << v;
        std::cout << "\n";
    }
    std::cout << "manifest: " << (std::filesystem::path(cfg.out_dir) / "manifest.json").string()
              << "\n";
    return 0;
}

int generate_fixture(const std::string& out_dir, uint64_t seed, size_t n_seekers,
                     size_t n_experts, double rate, double density, int days) {
    iwaa::SyntheticConfig cfg;
    cfg.seed = seed;
    cfg.n_seekers = n_seekers;
    cfg.n_experts = n_experts;
    cfg.post_rate_per_day = rate;
    cfg.follow_density = density;
    cfg.window_start = iwaa::parse_rfc3339("2020-07-01T00:00:00Z");
    cfg.window_end = cfg.window_start + iwaa::Duration::from_days(days);
    auto [activity, roster] = iwaa::generate_synthetic(cfg);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    iwaa::write_posts_jsonl((dir / "posts.jsonl").string(), activity);
    iwaa::write_likes_jsonl((dir / "likes.jsonl").string(), activity);
    iwaa::write_follows_jsonl((dir / "follows.jsonl").string(), roster);
    iwaa::write_users_jsonl((dir / "users.jsonl").string(), roster);
    iwaa::write_lists_jsonl((dir / "lists.jsonl").string(), roster);
    std::cout << "fixture written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"in-wall visibility analysis pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    std::string stage;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration JSON")->required();
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--workers", workers, "override the worker count");
        cmd->add_option("--out", out_dir, "override the output directory");
    };

    std::vector<std::pair<std::string, CLI::App*>> stage_cmds;
    for (const auto& name : iwaa::stage_names()) {
        auto* cmd = app.add_subcommand(name, "run the " + name + " stage");
        add_common(cmd);
        stage_cmds.emplace_back(name, cmd);
    }
    auto* all_cmd = app.add_subcommand("all", "run the full pipeline");
    add_common(all_cmd);
    auto* run_cmd = app.add_subcommand("run", "run one named stage (--stage)");
    add_common(run_cmd);
    run_cmd->add_option("--stage", stage, "stage name")->required();

    std::string synth_dir = "fixture";
    uint64_t synth_seed = 1;
    size_t n_seekers = 10, n_experts = 6;
    double rate = 40.0, density = 0.5;
    int days = 35;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic input fixture");
    synth_cmd->add_option("--out", synth_dir, "fixture directory");
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--seekers", n_seekers, "number of seekers");
    synth_cmd->add_option("--experts", n_experts, "number of experts");
    synth_cmd->add_option("--rate", rate, "posts per user per day");
    synth_cmd->add_option("--density", density, "follow probability");
    synth_cmd->add_option("--days", days, "window length in days");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed())
            return generate_fixture(synth_dir, synth_seed, n_seekers, n_experts, rate,
                                    density, days);
        if (all_cmd->parsed())
            return run_stages(config_path, iwaa::stage_names(), seed, workers, out_dir);
        if (run_cmd->parsed())
            return run_stages(config_path, {stage}, seed, workers, out_dir);
        for (const auto& [name, cmd] : stage_cmds)
            if (cmd->parsed()) return run_stages(config_path, {name}, seed, workers, out_dir);
    } catch (const iwaa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const iwaa::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const iwaa::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
