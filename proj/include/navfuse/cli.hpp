#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "navfuse/evalharness.hpp"
#include "navfuse/fusion.hpp"
#include "navfuse/mapgen.hpp"
#include "navfuse/remote.hpp"
#include "navfuse/student.hpp"
#include "navfuse/svg.hpp"

namespace navfuse::cli {

// Benchmark-calibrated generation defaults shared by the CLI and the
// acceptance suite.
inline constexpr int kDefaultMapSize = 40;
inline constexpr double kDefaultDensity = 0.12;
inline constexpr int kDefaultInstancesMin = 3;
inline constexpr int kDefaultInstancesMax = 3;
inline constexpr double kDefaultNoiseEps = 0.15;

namespace detail {

// CLI11's vector parse expects reversed arguments. Returns an exit code when
// parsing already ended the command (help or usage error), nothing otherwise.
inline std::optional<int> parse_args(CLI::App& app, std::vector<std::string> args) {
    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage error
    }
    return std::nullopt;
}

// Values resolve as: command-line flag > config-file key > built-in default.
class ConfigLayer {
public:
    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read config file: " + path);
        try {
            in >> cfg_;
        } catch (const nlohmann::json::exception& e) {
            throw Error("config file " + path + ": " + e.what());
        }
        if (!cfg_.is_object()) throw Error("config file must hold a JSON object");
    }

    template <typename T>
    void apply(const CLI::App& app, const std::string& flag, T& var) const {
        const CLI::Option* opt = app.get_option("--" + flag);
        if (opt->count() > 0) return;  // flag wins
        if (cfg_.contains(flag)) var = cfg_.at(flag).get<T>();
    }

    const nlohmann::json& raw() const { return cfg_; }

private:
    nlohmann::json cfg_ = nlohmann::json::object();
};

inline std::vector<std::string> list_map_files(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no .json map files under " + dir);
    return files;
}

inline std::string relative_to(const std::string& target, const std::string& out_file) {
    const auto base = std::filesystem::absolute(out_file).parent_path();
    const auto abs = std::filesystem::absolute(target);
    std::error_code ec;
    auto rel = std::filesystem::relative(abs, base, ec);
    if (ec || rel.empty()) return abs.string();
    return rel.string();
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) seeds.push_back(std::stoull(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (seeds.empty()) throw Error("empty seed list");
    return seeds;
}

struct BackendFlags {
    std::string backend = "bc";
    std::string bc_params;
    std::string student_params;
    std::string llm_url;
    double llm_timeout = 30.0;
    int llm_retries = 2;
    int llm_variant = 0;
    double expert_stop_radius = 0.0;
};

inline void add_backend_flags(CLI::App& app, BackendFlags& f) {
    app.add_option("--backend", f.backend, "expert|random|bc|student|remote");
    app.add_option("--bc-params", f.bc_params, "history policy parameter file");
    app.add_option("--student-params", f.student_params, "student parameter file");
    app.add_option("--llm-url", f.llm_url,
                   "remote endpoint (falls back to NAVFUSE_LLM_URL)");
    app.add_option("--llm-timeout", f.llm_timeout, "remote timeout in seconds");
    app.add_option("--llm-retries", f.llm_retries, "remote retry count");
    app.add_option("--llm-variant", f.llm_variant, "prompt template variant index");
    app.add_option("--stop-radius", f.expert_stop_radius,
                   "expert backend stop radius in meters");
}

inline void apply_backend_flags(const ConfigLayer& cfg, const CLI::App& app, BackendFlags& f) {
    cfg.apply(app, "backend", f.backend);
    cfg.apply(app, "bc-params", f.bc_params);
    cfg.apply(app, "student-params", f.student_params);
    cfg.apply(app, "llm-url", f.llm_url);
    cfg.apply(app, "llm-timeout", f.llm_timeout);
    cfg.apply(app, "llm-retries", f.llm_retries);
    cfg.apply(app, "llm-variant", f.llm_variant);
    cfg.apply(app, "stop-radius", f.expert_stop_radius);
}

inline std::unique_ptr<PolicyBackend> make_backend(const BackendFlags& f) {
    if (f.backend == "expert") return std::make_unique<ExpertBackend>(f.expert_stop_radius);
    if (f.backend == "random") return std::make_unique<RandomBackend>();
    if (f.backend == "bc") {
        if (f.bc_params.empty()) throw Error("--bc-params is required for the bc backend");
        return std::make_unique<BcBackend>(load_policy(f.bc_params));
    }
    if (f.backend == "student") {
        if (f.bc_params.empty() || f.student_params.empty())
            throw Error("--bc-params and --student-params are required for the student backend");
        return std::make_unique<StudentBackend>(load_student(f.student_params),
                                                load_policy(f.bc_params));
    }
    if (f.backend == "remote") {
        if (f.bc_params.empty()) throw Error("--bc-params is required for the remote backend");
        RemoteConfig rc;
        rc.url = f.llm_url;
        if (rc.url.empty()) {
            const char* env = std::getenv(kLlmUrlEnvVar);
            if (env) rc.url = env;
        }
        if (rc.url.empty())
            throw Error("remote backend needs --llm-url or " + std::string(kLlmUrlEnvVar));
        rc.timeout_s = f.llm_timeout;
        rc.max_retries = f.llm_retries;
        rc.variant = static_cast<std::size_t>(f.llm_variant);
        return std::make_unique<RemoteBackend>(rc, load_policy(f.bc_params));
    }
    throw Error("unknown backend: " + f.backend);
}

inline nlohmann::json backend_echo(const BackendFlags& f) {
    nlohmann::json j;
    j["backend"] = f.backend;
    if (!f.bc_params.empty()) j["bc-params"] = f.bc_params;
    if (!f.student_params.empty()) j["student-params"] = f.student_params;
    if (f.backend == "remote") {
        j["llm-url"] = f.llm_url.empty() ? "(env)" : f.llm_url;
        j["llm-variant"] = f.llm_variant;
    }
    if (f.backend == "expert") j["stop-radius"] = f.expert_stop_radius;
    return j;
}

}  // namespace detail

// ---- subcommands ----

inline int cmd_gen_maps(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"generate occupancy maps"};
    std::string out_dir;
    int count = 1, width = kDefaultMapSize, height = kDefaultMapSize;
    double density = kDefaultDensity;
    int inst_min = kDefaultInstancesMin, inst_max = kDefaultInstancesMax;
    std::uint64_t seed = 1;
    app.add_option("--out-dir", out_dir, "output directory")->required();
    app.add_option("--count", count, "number of maps");
    app.add_option("--width", width, "width in cells");
    app.add_option("--height", height, "height in cells");
    app.add_option("--density", density, "obstacle density in [0, 0.35]");
    app.add_option("--instances-min", inst_min, "min goal instances per category");
    app.add_option("--instances-max", inst_max, "max goal instances per category");
    app.add_option("--seed", seed, "generation seed");
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "count", count);
    cfg.apply(app, "width", width);
    cfg.apply(app, "height", height);
    cfg.apply(app, "density", density);
    cfg.apply(app, "instances-min", inst_min);
    cfg.apply(app, "instances-max", inst_max);
    cfg.apply(app, "seed", seed);

    std::filesystem::create_directories(out_dir);
    for (int i = 0; i < count; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        std::array<int, kNumGoalCategories> counts{};
        for (auto& c : counts) c = rng.range(inst_min, inst_max);
        OccupancyGrid g = generate_map(width, height, density, counts, rng.next());
        char name[64];
        std::snprintf(name, sizeof name, "map_%04d.json", i);
        write_map(g, (std::filesystem::path(out_dir) / name).string());
    }
    std::printf("wrote %d maps to %s\n", count, out_dir.c_str());
    return 0;
}

inline int cmd_gen_episodes(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"generate evaluation episodes"};
    std::string maps_dir, out;
    int count = 100;
    double d_min = kDefaultEpisodeDMin, d_max = kDefaultEpisodeDMax;
    std::uint64_t seed = 1;
    app.add_option("--maps", maps_dir, "directory of map .json files")->required();
    app.add_option("--out", out, "output episodes .jsonl")->required();
    app.add_option("--count", count, "number of episodes");
    app.add_option("--d-min", d_min, "min initial geodesic distance (m)");
    app.add_option("--d-max", d_max, "max initial geodesic distance (m)");
    app.add_option("--seed", seed, "sampling seed");
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "count", count);
    cfg.apply(app, "d-min", d_min);
    cfg.apply(app, "d-max", d_max);
    cfg.apply(app, "seed", seed);

    auto files = detail::list_map_files(maps_dir);
    MapCache cache;
    std::vector<Episode> eps;
    int skipped = 0;
    for (int i = 0; i < count; ++i) {
        // uniform allocation across maps, categories cycling
        const std::string& map_file = files[static_cast<std::size_t>(i) % files.size()];
        auto grid = cache.load("", map_file);
        const auto cat = static_cast<GoalCategory>(i % kNumGoalCategories);
        char id[32];
        std::snprintf(id, sizeof id, "ep-%06d", i);
        try {
            Episode ep = generate_episode(grid, cat, mix_seed(seed, static_cast<std::uint64_t>(i)),
                                          d_min, d_max, id);
            ep.map_path = detail::relative_to(map_file, out);
            eps.push_back(std::move(ep));
        } catch (const Error&) {
            ++skipped;
        }
    }
    write_episodes(eps, out);
    std::printf("wrote %zu episodes to %s (%d skipped)\n", eps.size(), out.c_str(), skipped);
    return 0;
}

inline int cmd_gen_demos(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"generate expert demonstrations"};
    std::string maps_dir, out;
    int per_map = 30, max_steps = 500;
    double noise = kDefaultNoiseEps, stop_radius = 0.0;
    std::uint64_t seed = 1;
    app.add_option("--maps", maps_dir, "directory of map .json files")->required();
    app.add_option("--out", out, "output corpus .jsonl")->required();
    app.add_option("--episodes-per-map", per_map, "demonstrations per map");
    app.add_option("--noise-eps", noise, "random-action substitution probability");
    app.add_option("--max-steps", max_steps, "demonstration step cap");
    app.add_option("--stop-radius", stop_radius, "expert stop radius (m)");
    app.add_option("--seed", seed, "generation seed");
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "episodes-per-map", per_map);
    cfg.apply(app, "noise-eps", noise);
    cfg.apply(app, "max-steps", max_steps);
    cfg.apply(app, "stop-radius", stop_radius);
    cfg.apply(app, "seed", seed);

    auto files = detail::list_map_files(maps_dir);
    MapCache cache;
    std::vector<std::pair<std::shared_ptr<const OccupancyGrid>, std::string>> maps;
    for (const auto& f : files) maps.push_back({cache.load("", f), detail::relative_to(f, out)});
    ExpertConfig ecfg;
    ecfg.noise_eps = noise;
    ecfg.max_steps = max_steps;
    ecfg.stop_radius_m = stop_radius;
    ecfg.seed = seed;
    DemoGenStats stats;
    auto demos = generate_demonstrations(maps, per_map, ecfg, &stats);
    write_demos(demos, out);
    std::printf("wrote %zu demonstrations to %s (skipped %d, truncated %d)\n", demos.size(),
                out.c_str(), stats.skipped, stats.truncated);
    return 0;
}

inline int cmd_train_bc(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"train the behaviour-cloning history policy"};
    std::string demos, out;
    TrainConfig tc;
    app.add_option("--demos", demos, "demonstration corpus .jsonl")->required();
    app.add_option("--out", out, "output parameter file")->required();
    app.add_option("--lr", tc.learning_rate, "learning rate");
    app.add_option("--epochs", tc.epochs, "training epochs");
    app.add_option("--batch-episodes", tc.batch_episodes, "episodes per update");
    app.add_option("--hidden", tc.dims.hidden, "GRU hidden size");
    app.add_option("--clip", tc.clip_norm, "global gradient-norm clip");
    app.add_option("--seed", tc.seed, "training seed");
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "lr", tc.learning_rate);
    cfg.apply(app, "epochs", tc.epochs);
    cfg.apply(app, "batch-episodes", tc.batch_episodes);
    cfg.apply(app, "hidden", tc.dims.hidden);
    cfg.apply(app, "clip", tc.clip_norm);
    cfg.apply(app, "seed", tc.seed);

    auto records = read_demos(demos);
    auto corpus = bc_corpus_from_demos(records);
    auto res = train_bc(corpus, tc);
    save_policy(res.params, out);
    std::printf("trained %d epochs on %zu episodes; per-epoch loss:", tc.epochs, corpus.size());
    for (double l : res.epoch_losses) std::printf(" %.4f", l);
    std::printf("\nsaved %s\n", out.c_str());
    return 0;
}

inline int cmd_build_targets(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"build fused training targets"};
    std::string demos, params, out, mask = "sim";
    double alpha = 0.8;
    app.add_option("--demos", demos, "demonstration corpus .jsonl")->required();
    app.add_option("--bc-params", params, "frozen history policy parameters")->required();
    app.add_option("--out", out, "output target dataset .jsonl")->required();
    app.add_option("--alpha", alpha, "weight on the policy output");
    app.add_option("--mask", mask, "collision mask source: sim|none");
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "alpha", alpha);
    cfg.apply(app, "mask", mask);

    MaskMode mode;
    if (mask == "sim")
        mode = MaskMode::Simulator;
    else if (mask == "none")
        mode = MaskMode::None;
    else
        throw Error("--mask must be sim or none");
    auto records = read_demos(demos);
    auto policy = load_policy(params);
    FusionConfig fc;
    fc.alpha = alpha;
    auto ds = build_target_dataset(records, policy, fc, mode);
    // rewrite map paths relative to the new file
    for (auto& ep : ds.episodes) ep.map_path = detail::relative_to(
        (std::filesystem::path(demos).parent_path() / ep.map_path).string(), out);
    write_targets(ds, out);
    std::printf("wrote %zu target steps over %zu episodes to %s\n", ds.total_steps(),
                ds.episodes.size(), out.c_str());
    return 0;
}

inline int cmd_train_student(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"train the student policy on fused targets"};
    std::string targets, params, out, mode = "fused";
    StudentTrainConfig sc;
    app.add_option("--targets", targets, "target dataset .jsonl")->required();
    app.add_option("--bc-params", params, "frozen history policy parameters")->required();
    app.add_option("--out", out, "output parameter file")->required();
    app.add_option("--mode", mode, "fused|direct|fused_nomask");
    app.add_option("--iters", sc.iterations, "training iterations");
    app.add_option("--batch", sc.batch_size, "steps per iteration");
    app.add_option("--lr", sc.learning_rate, "learning rate");
    app.add_option("--hidden", sc.hidden, "MLP hidden width");
    app.add_option("--seed", sc.seed, "training seed");
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "mode", mode);
    cfg.apply(app, "iters", sc.iterations);
    cfg.apply(app, "batch", sc.batch_size);
    cfg.apply(app, "lr", sc.learning_rate);
    cfg.apply(app, "hidden", sc.hidden);
    cfg.apply(app, "seed", sc.seed);
    sc.target_mode = target_mode_from_name(mode);

    auto ds = read_targets(targets);
    auto policy = load_policy(params);
    auto res = train_student(ds, policy, sc);
    save_student(res.params, out);
    double first = res.iteration_losses.front(), last = res.iteration_losses.back();
    std::printf("trained %d iterations (%s); loss %.4f -> %.4f; saved %s\n", sc.iterations,
                mode.c_str(), first, last, out.c_str());
    return 0;
}

inline int cmd_eval(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"evaluate a policy backend over episodes"};
    std::string episodes, out, select = "argmax", seeds_text = "1";
    int max_steps = 500;
    bool no_clamp = false;
    detail::BackendFlags bf;
    app.add_option("--episodes", episodes, "episodes .jsonl")->required();
    app.add_option("--out", out, "output report .json")->required();
    app.add_option("--select", select, "argmax|sample");
    app.add_option("--seeds", seeds_text, "comma-separated evaluation seeds");
    app.add_option("--max-steps", max_steps, "step cap per episode");
    app.add_flag("--no-clamp-softspl", no_clamp, "formula-faithful unclamped SoftSPL");
    detail::add_backend_flags(app, bf);
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "select", select);
    cfg.apply(app, "seeds", seeds_text);
    cfg.apply(app, "max-steps", max_steps);
    detail::apply_backend_flags(cfg, app, bf);

    auto eps = read_episodes(episodes);
    auto backend = detail::make_backend(bf);
    RolloutOptions opts;
    opts.max_steps = max_steps;
    opts.selection = selection_from_name(select);
    opts.clamp_softspl = !no_clamp;
    nlohmann::json echo = detail::backend_echo(bf);
    echo["episodes"] = episodes;
    echo["select"] = select;
    echo["seeds"] = seeds_text;
    echo["max-steps"] = max_steps;
    echo["clamp-softspl"] = !no_clamp;
    auto report = evaluate(*backend, eps, detail::parse_seed_list(seeds_text), opts, echo);
    write_report(report, out);
    std::printf("evaluated %zu episodes x %zu seeds: success %.4f, softspl %.4f, collisions %.2f\n",
                eps.size(), detail::parse_seed_list(seeds_text).size(),
                report.aggregates.success_mean, report.aggregates.softspl_mean,
                report.aggregates.collision_mean);
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

inline int cmd_report(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"export a report as CSV"};
    std::string report_path, out;
    app.add_option("report", report_path, "report .json from eval")->required();
    app.add_option("--out", out, "CSV output path (default: stdout)");
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "out", out);

    auto j = read_report_json(report_path);
    const std::string csv = report_to_csv(j);
    if (out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw Error("cannot write " + out);
        f << csv;
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

inline int cmd_render(std::vector<std::string> args, const detail::ConfigLayer& cfg) {
    CLI::App app{"re-run one episode and render the trajectory as SVG"};
    std::string episodes, episode_id, out, select = "argmax";
    std::uint64_t seed = 1;
    int max_steps = 500;
    detail::BackendFlags bf;
    app.add_option("--episodes", episodes, "episodes .jsonl")->required();
    app.add_option("--episode-id", episode_id, "episode id to render")->required();
    app.add_option("--out", out, "output .svg")->required();
    app.add_option("--select", select, "argmax|sample");
    app.add_option("--seed", seed, "selection seed");
    app.add_option("--max-steps", max_steps, "step cap");
    detail::add_backend_flags(app, bf);
    if (auto rc = detail::parse_args(app, std::move(args))) return *rc;
    cfg.apply(app, "select", select);
    cfg.apply(app, "seed", seed);
    cfg.apply(app, "max-steps", max_steps);
    detail::apply_backend_flags(cfg, app, bf);

    auto eps = read_episodes(episodes);
    const Episode* chosen = nullptr;
    for (const auto& ep : eps)
        if (ep.id == episode_id) chosen = &ep;
    if (!chosen) throw Error("episode id not found: " + episode_id);
    auto backend = detail::make_backend(bf);
    RolloutOptions opts;
    opts.max_steps = max_steps;
    opts.selection = selection_from_name(select);
    opts.seed = seed;
    Trajectory traj;
    auto result = run_episode(*backend, *chosen, opts, &traj);
    if (result.error) throw Error("rollout failed: " + result.error_msg);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot write " + out);
    f << render_trajectory(*chosen->grid, traj, chosen->goal);
    std::printf("rendered %s (success=%d, steps=%d) to %s\n", episode_id.c_str(),
                result.success ? 1 : 0, result.steps, out.c_str());
    return 0;
}

inline void print_usage() {
    std::puts(
        "navfuse <command> [options]\n"
        "\n"
        "commands:\n"
        "  gen-maps       generate occupancy maps\n"
        "  gen-episodes   generate evaluation episodes\n"
        "  gen-demos      generate expert demonstrations\n"
        "  train-bc       train the behaviour-cloning history policy\n"
        "  build-targets  build fused training targets\n"
        "  train-student  train the student policy\n"
        "  eval           evaluate a backend over episodes\n"
        "  report         export a report as CSV\n"
        "  render         render one episode trajectory as SVG\n"
        "\n"
        "Every command accepts --config <file.json>; keys match long option\n"
        "names, and explicit flags win over config values.");
}

inline int run(std::vector<std::string> args) {
    if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
        print_usage();
        return args.empty() ? 1 : 0;
    }
    const std::string sub = args[0];
    args.erase(args.begin());

    // peel --config out of the remaining arguments
    detail::ConfigLayer cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                std::fprintf(stderr, "--config needs a path\n");
                return 1;
            }
            cfg.load(args[i + 1]);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
    }

    try {
        if (sub == "gen-maps") return cmd_gen_maps(std::move(args), cfg);
        if (sub == "gen-episodes") return cmd_gen_episodes(std::move(args), cfg);
        if (sub == "gen-demos") return cmd_gen_demos(std::move(args), cfg);
        if (sub == "train-bc") return cmd_train_bc(std::move(args), cfg);
        if (sub == "build-targets") return cmd_build_targets(std::move(args), cfg);
        if (sub == "train-student") return cmd_train_student(std::move(args), cfg);
        if (sub == "eval") return cmd_eval(std::move(args), cfg);
        if (sub == "report") return cmd_report(std::move(args), cfg);
        if (sub == "render") return cmd_render(std::move(args), cfg);
    } catch (const CLI::ParseError&) {
        return 1;  // CLI11_PARSE handles help/errors before this
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    std::fprintf(stderr, "unknown command: %s\n", sub.c_str());
    print_usage();
    return 1;
}

}  // namespace navfuse::cli
