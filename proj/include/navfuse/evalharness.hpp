#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "navfuse/backend.hpp"
#include "navfuse/episode.hpp"
#include "navfuse/geodesic.hpp"

namespace navfuse {

enum class Selection { Argmax, Sample };

inline Selection selection_from_name(const std::string& s) {
    if (s == "argmax") return Selection::Argmax;
    if (s == "sample") return Selection::Sample;
    throw Error("unknown selection rule: " + s);
}

inline const char* selection_name(Selection s) {
    return s == Selection::Argmax ? "argmax" : "sample";
}

// SoftSPL = (1 - d_T/d_init) * (s / max(s, p)). The first factor is clamped
// below at zero by default so the value stays in [0, 1]; pass clamp=false for
// the formula-faithful unclamped variant.
inline double softspl(double d_init, double d_T, double s, double p, bool clamp = true) {
    if (d_init <= 0.0) throw Error("softspl: d_init must be positive");
    if (s <= 0.0) throw Error("softspl: shortest path length must be positive");
    if (p < 0.0) throw Error("softspl: path length must be non-negative");
    double progress = 1.0 - d_T / d_init;
    if (clamp) progress = std::max(0.0, progress);
    return progress * (s / std::max(s, p));
}

struct EpisodeResult {
    std::string episode_id;
    std::uint64_t seed = 0;
    bool success = false;
    double softspl = 0.0;
    int collision_count = 0;
    int steps = 0;
    double path_length_m = 0.0;
    double d_T_m = 0.0;
    int fallback_count = 0;
    bool error = false;
    std::string error_msg;
};

struct RolloutOptions {
    int max_steps = 500;
    Selection selection = Selection::Argmax;
    std::uint64_t seed = 0;
    bool clamp_softspl = true;
};

struct TrajectoryPoint {
    Pose pose;
    bool collided = false;  // the action taken at this pose collided
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;  // pose before each action, then final pose
};

// One evaluation rollout. Success requires an explicit Stop within the
// success radius. Backend exceptions become an error row, not a crash.
inline EpisodeResult run_episode(PolicyBackend& backend, const Episode& episode,
                                 const RolloutOptions& opts, Trajectory* trajectory = nullptr) {
    EpisodeResult res;
    res.episode_id = episode.id;
    res.seed = opts.seed;
    const OccupancyGrid& grid = *episode.grid;
    const auto& goal_cells = grid.goal_cells(episode.goal);
    DistanceField goal_field = distance_field(grid, goal_cells);

    Rng select_rng(mix_seed(opts.seed, fnv1a(episode.id)));
    try {
        backend.reset(episode);
        Pose pose = episode.start;
        std::optional<Action> prev;
        bool collided_last = false;
        bool stopped = false;
        for (int t = 0; t < opts.max_steps; ++t) {
            const Observation obs = observe(episode, pose, prev, collided_last);
            const ActionDistribution dist = backend.act(obs);
            if (!dist.valid())
                throw Error("backend produced an invalid distribution at step " +
                            std::to_string(t));
            Action action;
            if (opts.selection == Selection::Argmax) {
                action = dist.argmax();
            } else {
                double u = select_rng.uniform01();
                int pick = kNumActions - 1;
                double acc = 0.0;
                for (int i = 0; i < kNumActions; ++i) {
                    acc += dist[i];
                    if (u < acc) {
                        pick = i;
                        break;
                    }
                }
                action = static_cast<Action>(pick);
            }
            const StepOutcome out = step(grid, pose, action);
            if (trajectory) trajectory->points.push_back({pose, out.collided});
            ++res.steps;
            res.collision_count += out.collided ? 1 : 0;
            if (action == Action::MoveForward && !out.collided) res.path_length_m += kCellSize;
            if (action == Action::Stop) {
                stopped = true;
                break;
            }
            prev = action;
            collided_last = out.collided;
            pose = out.pose;
        }
        const double d_T = goal_field.at(pose.cell());
        res.d_T_m = d_T;
        res.success = stopped && d_T <= kSuccessRadius;
        res.softspl = softspl(episode.d_init_m, d_T, episode.d_init_m, res.path_length_m,
                              opts.clamp_softspl);
        res.fallback_count = backend.fallback_count();
        if (trajectory) trajectory->points.push_back({pose, false});
    } catch (const std::exception& e) {
        res.error = true;
        res.error_msg = e.what();
    }
    return res;
}

struct EvalAggregates {
    double success_mean = 0.0;
    double softspl_mean = 0.0;
    double collision_mean = 0.0;
    int errors = 0;
};

struct SeedBreakdown {
    std::uint64_t seed = 0;
    EvalAggregates aggregates;
};

struct EvalReport {
    nlohmann::json config;  // echo of how the run was configured
    std::vector<EpisodeResult> per_episode;
    EvalAggregates aggregates;
    std::vector<SeedBreakdown> per_seed;
};

inline EvalAggregates aggregate_rows(const std::vector<EpisodeResult>& rows) {
    EvalAggregates a;
    int n = 0;
    for (const auto& r : rows) {
        if (r.error) {
            ++a.errors;
            continue;
        }
        a.success_mean += r.success ? 1.0 : 0.0;
        a.softspl_mean += r.softspl;
        a.collision_mean += r.collision_count;
        ++n;
    }
    if (n > 0) {
        a.success_mean /= n;
        a.softspl_mean /= n;
        a.collision_mean /= n;
    }
    return a;
}

// Runs every (episode, seed) pair sequentially with one backend, resetting per
// episode. Rows are ordered by (seed, episode id); aggregates pool all rows.
inline EvalReport evaluate(PolicyBackend& backend, const std::vector<Episode>& episodes,
                           const std::vector<std::uint64_t>& seeds, const RolloutOptions& base,
                           nlohmann::json config_echo = nlohmann::json::object()) {
    EvalReport report;
    report.config = std::move(config_echo);
    std::vector<Episode> ordered = episodes;
    std::sort(ordered.begin(), ordered.end(),
              [](const Episode& a, const Episode& b) { return a.id < b.id; });
    for (std::uint64_t seed : seeds) {
        std::vector<EpisodeResult> seed_rows;
        for (const Episode& ep : ordered) {
            RolloutOptions opts = base;
            opts.seed = seed;
            seed_rows.push_back(run_episode(backend, ep, opts));
        }
        SeedBreakdown br;
        br.seed = seed;
        br.aggregates = aggregate_rows(seed_rows);
        report.per_seed.push_back(br);
        report.per_episode.insert(report.per_episode.end(), seed_rows.begin(), seed_rows.end());
    }
    report.aggregates = aggregate_rows(report.per_episode);
    return report;
}

// ---- report serialization ----

inline nlohmann::json result_to_json(const EpisodeResult& r) {
    nlohmann::json j;
    j["episode_id"] = r.episode_id;
    j["seed"] = r.seed;
    j["success"] = r.success;
    j["softspl"] = r.softspl;
    j["collision_count"] = r.collision_count;
    j["steps"] = r.steps;
    j["path_length_m"] = r.path_length_m;
    j["d_T_m"] = std::isfinite(r.d_T_m) ? nlohmann::json(r.d_T_m) : nlohmann::json("inf");
    j["fallback_count"] = r.fallback_count;
    if (r.error) j["error"] = r.error_msg;
    return j;
}

inline EpisodeResult result_from_json(const nlohmann::json& j) {
    EpisodeResult r;
    r.episode_id = j.at("episode_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.success = j.at("success").get<bool>();
    r.softspl = j.at("softspl").get<double>();
    r.collision_count = j.at("collision_count").get<int>();
    r.steps = j.at("steps").get<int>();
    r.path_length_m = j.at("path_length_m").get<double>();
    r.d_T_m = j.at("d_T_m").is_string() ? kInfiniteDistance : j.at("d_T_m").get<double>();
    r.fallback_count = j.at("fallback_count").get<int>();
    if (j.contains("error")) {
        r.error = true;
        r.error_msg = j.at("error").get<std::string>();
    }
    return r;
}

inline nlohmann::json aggregates_to_json(const EvalAggregates& a) {
    return {{"success_mean", a.success_mean},
            {"softspl_mean", a.softspl_mean},
            {"collision_mean", a.collision_mean},
            {"errors", a.errors}};
}

inline nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["config"] = report.config;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.per_episode) rows.push_back(result_to_json(r));
    j["per_episode"] = rows;
    j["aggregates"] = aggregates_to_json(report.aggregates);
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : report.per_seed)
        seeds.push_back({{"seed", s.seed}, {"aggregates", aggregates_to_json(s.aggregates)}});
    j["per_seed"] = seeds;
    return j;
}

inline void write_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write report: " + path);
    out << report_to_json(report).dump(1) << "\n";
}

inline nlohmann::json read_report_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read report: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

// CSV export: one row per episode result.
inline std::string report_to_csv(const nlohmann::json& report) {
    std::string csv =
        "episode_id,seed,success,softspl,collision_count,steps,path_length_m,d_T_m,"
        "fallback_count,error\n";
    for (const auto& row : report.at("per_episode")) {
        EpisodeResult r = result_from_json(row);
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%llu,%d,%.17g,%d,%d,%.17g,%.17g,%d,%s\n",
                      r.episode_id.c_str(), static_cast<unsigned long long>(r.seed),
                      r.success ? 1 : 0, r.softspl, r.collision_count, r.steps, r.path_length_m,
                      r.d_T_m, r.fallback_count, r.error ? "1" : "0");
        csv += buf;
    }
    return csv;
}

}  // namespace navfuse
