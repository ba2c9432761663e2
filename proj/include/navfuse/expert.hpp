#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "navfuse/episode.hpp"
#include "navfuse/geodesic.hpp"
#include "navfuse/observe.hpp"

namespace navfuse {

// Success radius of the task itself (fixed by the task definition); distinct
// from the expert's stop radius, which is a behaviour knob.
inline constexpr double kSuccessRadius = 1.0;

struct ExpertConfig {
    double noise_eps = 0.0;      // probability of substituting a random non-Stop action
    int max_steps = 500;
    std::uint64_t seed = 0;
    // Geodesic distance at which the expert stops. 0 walks onto the goal cell
    // itself, which keeps d_T at 0 and demonstration SoftSPL at ~1; the task
    // only requires stopping within kSuccessRadius.
    double stop_radius_m = 0.0;
    // Start-distance band for the internally sampled demonstration episodes.
    // Longer demonstrations expose more transit states than evaluation
    // episodes need.
    double d_min = kDefaultEpisodeDMin;
    double d_max = kDefaultEpisodeDMax;
};

// Rounds a bearing in degrees to the nearest multiple of 30, exact midpoints
// rounding counter-clockwise (the TurnLeft direction).
inline int round_bearing_30(double bearing_deg) {
    double r = std::fmod(bearing_deg, 360.0);
    if (r < 0) r += 360.0;
    int k = static_cast<int>(r / 30.0);
    double rem = r - 30.0 * k;
    if (rem >= 15.0 - 1e-9) ++k;
    return wrap_heading(k * 30);
}

// Greedy geodesic-descent expert over a cached distance field.
class ExpertPlanner {
public:
    ExpertPlanner(std::shared_ptr<const OccupancyGrid> grid, const std::vector<Cell>& goal_cells)
        : grid_(std::move(grid)), field_(distance_field(*grid_, goal_cells)) {}

    double distance_at(Cell c) const { return field_.at(c); }

    Action act(const Pose& pose, double stop_radius_m) const {
        const Cell cur = pose.cell();
        const double d = field_.at(cur);
        if (d == kInfiniteDistance) throw Error("expert: goal unreachable from current cell");
        if (d <= stop_radius_m) return Action::Stop;

        bool excluded[8] = {};
        for (int tries = 0; tries < 8; ++tries) {
            int best = -1;
            double best_cost = kInfiniteDistance;
            for (int i = 0; i < 8; ++i) {
                if (excluded[i]) continue;
                const auto& dnb = kNeighbors8[static_cast<std::size_t>(i)];
                Cell nb{cur.x + dnb[0], cur.y + dnb[1]};
                if (grid_->is_occupied(nb)) continue;
                const bool diag = dnb[0] != 0 && dnb[1] != 0;
                if (diag && !diagonal_allowed(*grid_, cur, dnb[0], dnb[1])) continue;
                double dn = field_.at(nb);
                if (dn == kInfiniteDistance) continue;
                double cost = (diag ? kDiagCost : kOrthCost) + dn;
                if (cost < best_cost) {
                    best_cost = cost;
                    best = i;
                }
            }
            if (best < 0) return Action::TurnLeft;  // boxed in; reorient
            const auto& dnb = kNeighbors8[static_cast<std::size_t>(best)];
            const double wx = cell_center(cur.x + dnb[0]);
            const double wy = cell_center(cur.y + dnb[1]);
            const double bearing =
                std::atan2(wy - pose.y_m, wx - pose.x_m) * 180.0 / std::numbers::pi_v<double>;
            const int target = round_bearing_30(bearing);
            if (pose.heading_deg == target) {
                if (!step(*grid_, pose, Action::MoveForward).collided) return Action::MoveForward;
                excluded[best] = true;  // aimed move is blocked; replan without it
                continue;
            }
            const int delta = wrap_deg180(target - pose.heading_deg);
            // wrap_deg180 maps +180 to -180; ties turn left
            if (delta > 0 || delta == -180) return Action::TurnLeft;
            return Action::TurnRight;
        }
        return Action::TurnLeft;
    }

private:
    std::shared_ptr<const OccupancyGrid> grid_;
    DistanceField field_;
};

// One-shot form of the planner.
inline Action expert_action(const std::shared_ptr<const OccupancyGrid>& grid, const Pose& pose,
                            const std::vector<Cell>& goal_cells, double stop_radius_m = 1.0) {
    return ExpertPlanner(grid, goal_cells).act(pose, stop_radius_m);
}

struct DemoStep {
    Observation obs;
    Action action = Action::Stop;
    bool collided = false;
};

struct DemonstrationRecord {
    Episode episode;
    std::vector<DemoStep> steps;
    bool success = false;
};

struct DemoGenStats {
    int generated = 0;
    int skipped = 0;    // episode sampling failed (band unsatisfiable etc.)
    int truncated = 0;  // hit max_steps without Stop
};

// Rolls the expert out on freshly sampled episodes; with probability noise_eps
// each action is replaced by a uniform random non-Stop action before execution.
inline std::vector<DemonstrationRecord> generate_demonstrations(
    const std::vector<std::pair<std::shared_ptr<const OccupancyGrid>, std::string>>& maps,
    int episodes_per_map, const ExpertConfig& cfg, DemoGenStats* stats_out = nullptr) {
    std::vector<DemonstrationRecord> records;
    DemoGenStats stats;
    Rng root(cfg.seed);
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
        const auto& [grid, map_path] = maps[static_cast<std::size_t>(mi)];
        for (int k = 0; k < episodes_per_map; ++k) {
            const std::uint64_t salt = mi * 100003ull + static_cast<std::uint64_t>(k);
            Rng ep_rng = root.derive(salt);
            const auto category =
                static_cast<GoalCategory>((mi * static_cast<std::size_t>(episodes_per_map) + static_cast<std::size_t>(k)) % kNumGoalCategories);
            Episode ep;
            try {
                ep = generate_episode(grid, category, ep_rng.next(), cfg.d_min, cfg.d_max);
            } catch (const Error&) {
                ++stats.skipped;
                continue;
            }
            ep.id = "demo-" + std::to_string(cfg.seed) + "-" + std::to_string(mi) + "-" +
                    std::to_string(k);
            ep.map_path = map_path;

            ExpertPlanner planner(grid, grid->goal_cells(category));
            DemonstrationRecord rec;
            rec.episode = ep;
            Pose pose = ep.start;
            std::optional<Action> prev;
            bool collided_last = false;
            bool stopped = false;
            for (int t = 0; t < cfg.max_steps; ++t) {
                Observation obs = observe(ep, pose, prev, collided_last);
                Action a = planner.act(pose, cfg.stop_radius_m);
                if (ep_rng.chance(cfg.noise_eps))
                    a = static_cast<Action>(1 + ep_rng.uniform_int(kNumActions - 1));
                StepOutcome out = step(*grid, pose, a);
                rec.steps.push_back(DemoStep{std::move(obs), a, out.collided});
                if (a == Action::Stop) {
                    stopped = true;
                    rec.success = planner.distance_at(pose.cell()) <= kSuccessRadius;
                    break;
                }
                prev = a;
                collided_last = out.collided;
                pose = out.pose;
            }
            if (!stopped) ++stats.truncated;
            ++stats.generated;
            records.push_back(std::move(rec));
        }
    }
    if (stats_out) *stats_out = stats;
    return records;
}

// ---- demonstration corpus I/O (JSON Lines) ----
// One header line per episode carrying its metadata, followed by one line per
// step with the flat observation fields.

inline nlohmann::json demo_header_json(const DemonstrationRecord& r) {
    nlohmann::json j = episode_to_json(r.episode);
    j["num_steps"] = r.steps.size();
    j["success"] = r.success;
    return j;
}

inline nlohmann::json demo_step_json(const DemonstrationRecord& r, std::size_t t) {
    const DemoStep& s = r.steps[t];
    nlohmann::json j;
    j["episode_id"] = r.episode.id;
    j["t"] = t;
    j["patch"] = s.obs.patch;
    j["gps"] = {s.obs.gps_dx_m, s.obs.gps_dy_m};
    j["compass"] = s.obs.compass_rad;
    if (s.obs.prev_action.has_value())
        j["prev_action"] = static_cast<int>(*s.obs.prev_action);
    else
        j["prev_action"] = nullptr;
    j["goal"] = static_cast<int>(s.obs.goal);
    j["collided_last"] = s.obs.collided_last;
    j["action"] = static_cast<int>(s.action);
    j["collided"] = s.collided;
    return j;
}

inline void write_demos(const std::vector<DemonstrationRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write demo corpus: " + path);
    for (const auto& r : records) {
        out << demo_header_json(r).dump() << "\n";
        for (std::size_t t = 0; t < r.steps.size(); ++t) out << demo_step_json(r, t).dump() << "\n";
    }
}

namespace detail {

inline DemoStep demo_step_from_json(const nlohmann::json& j, const std::string& where) {
    DemoStep s;
    const auto& patch = j.at("patch");
    if (patch.size() != kPatchCells) throw Error(where + ": field 'patch' must have 121 entries");
    for (std::size_t i = 0; i < kPatchCells; ++i) {
        int v = patch[i].get<int>();
        if (v != 0 && v != 1) throw Error(where + ": field 'patch' entries must be 0 or 1");
        s.obs.patch[i] = static_cast<std::uint8_t>(v);
    }
    s.obs.gps_dx_m = j.at("gps").at(0).get<double>();
    s.obs.gps_dy_m = j.at("gps").at(1).get<double>();
    s.obs.compass_rad = j.at("compass").get<double>();
    if (j.at("prev_action").is_null())
        s.obs.prev_action = std::nullopt;
    else
        s.obs.prev_action = action_from_index(j.at("prev_action").get<int>());
    s.obs.goal = goal_from_index(j.at("goal").get<int>());
    s.obs.collided_last = j.at("collided_last").get<bool>();
    s.action = action_from_index(j.at("action").get<int>());
    s.collided = j.at("collided").get<bool>();
    return s;
}

}  // namespace detail

// Streams the corpus record by record without materializing it. The callback
// returns false to stop early.
inline void for_each_demo(const std::string& path,
                          const std::function<bool(DemonstrationRecord&&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read demo corpus: " + path);
    MapCache cache;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json hj;
        try {
            hj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": bad json: " + e.what());
        }
        if (!hj.contains("num_steps"))
            throw Error(path + ":" + std::to_string(lineno) + ": expected episode header line");
        DemonstrationRecord rec;
        try {
            rec.episode = episode_from_json(hj, path, cache);
            rec.success = hj.at("success").get<bool>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        const std::size_t n = hj.at("num_steps").get<std::size_t>();
        rec.steps.reserve(n);
        for (std::size_t t = 0; t < n; ++t) {
            if (!std::getline(in, line))
                throw Error(path + ":" + std::to_string(lineno + 1) +
                            ": truncated corpus: episode " + rec.episode.id + " expects " +
                            std::to_string(n) + " steps, file ended at step " + std::to_string(t));
            ++lineno;
            const std::string where = path + ":" + std::to_string(lineno);
            try {
                nlohmann::json sj = nlohmann::json::parse(line);
                if (sj.at("episode_id").get<std::string>() != rec.episode.id)
                    throw Error(where + ": field 'episode_id' does not match header");
                rec.steps.push_back(detail::demo_step_from_json(sj, where));
            } catch (const nlohmann::json::exception& e) {
                throw Error(where + ": " + e.what());
            }
        }
        if (!fn(std::move(rec))) return;
    }
}

inline std::vector<DemonstrationRecord> read_demos(const std::string& path) {
    std::vector<DemonstrationRecord> records;
    for_each_demo(path, [&](DemonstrationRecord&& r) {
        records.push_back(std::move(r));
        return true;
    });
    return records;
}

}  // namespace navfuse
