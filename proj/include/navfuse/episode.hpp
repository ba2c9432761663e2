#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "navfuse/geodesic.hpp"
#include "navfuse/observe.hpp"
#include "navfuse/rng.hpp"

namespace navfuse {

inline constexpr double kDefaultEpisodeDMin = 1.5;
inline constexpr double kDefaultEpisodeDMax = 8.0;

struct Episode {
    std::string id;
    std::string map_path;  // as stored in episode files; may be empty in-memory
    std::shared_ptr<const OccupancyGrid> grid;
    Pose start;
    GoalCategory goal = GoalCategory::Chair;
    double d_init_m = 0.0;
};

inline Observation observe(const Episode& ep, const Pose& pose,
                           std::optional<Action> prev_action, bool collided_last) {
    return observe(*ep.grid, pose, ep.start, ep.goal, prev_action, collided_last);
}

// Start pose uniform over free cells, heading uniform over the 12 multiples of
// 30 degrees, pitch 0; resampled until d_init lands in [d_min, d_max].
inline Episode generate_episode(std::shared_ptr<const OccupancyGrid> grid, GoalCategory category,
                                std::uint64_t seed, double d_min = kDefaultEpisodeDMin,
                                double d_max = kDefaultEpisodeDMax, std::string id = "") {
    const auto& goal_cells = grid->goal_cells(category);
    if (goal_cells.empty())
        throw Error("generate_episode: no '" + std::string(goal_label(category)) +
                    "' instance on grid");
    DistanceField field = distance_field(*grid, goal_cells);

    std::vector<Cell> free_cells;
    for (int y = 0; y < grid->height_cells; ++y)
        for (int x = 0; x < grid->width_cells; ++x)
            if (grid->is_free(x, y)) free_cells.push_back(Cell{x, y});
    if (free_cells.empty()) throw Error("generate_episode: no free cells");

    Rng rng(seed);
    constexpr int kMaxTries = 2000;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
        Cell c = free_cells[rng.uniform_int(free_cells.size())];
        int heading = kHeadingStep * rng.range(0, 11);
        double d = field.at(c);
        if (d < d_min || d > d_max) continue;
        Episode ep;
        ep.id = id.empty() ? "ep-" + std::to_string(seed) : std::move(id);
        ep.grid = std::move(grid);
        ep.start = Pose{cell_center(c.x), cell_center(c.y), heading, 0};
        ep.goal = category;
        ep.d_init_m = d;
        return ep;
    }
    throw Error("generate_episode: no valid start within distance band after " +
                std::to_string(kMaxTries) + " tries");
}

// ---- episode file I/O (JSON Lines) ----

inline nlohmann::json episode_to_json(const Episode& ep) {
    nlohmann::json j;
    j["id"] = ep.id;
    j["map_path"] = ep.map_path;
    j["start"] = {{"x_m", ep.start.x_m},
                  {"y_m", ep.start.y_m},
                  {"heading_deg", ep.start.heading_deg},
                  {"pitch_deg", ep.start.pitch_deg}};
    j["goal"] = std::string(goal_label(ep.goal));
    j["d_init_m"] = ep.d_init_m;
    return j;
}

inline void write_episodes(const std::vector<Episode>& eps, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write episode file: " + path);
    for (const auto& ep : eps) out << episode_to_json(ep).dump() << "\n";
}

// Resolves relative map paths against the episode file's directory and caches
// loaded grids so episodes sharing a map share one instance.
class MapCache {
public:
    std::shared_ptr<const OccupancyGrid> load(const std::string& base_file,
                                              const std::string& map_path) {
        std::filesystem::path p(map_path);
        if (p.is_relative()) {
            std::filesystem::path base = std::filesystem::path(base_file).parent_path();
            p = base / p;
        }
        const std::string key = p.lexically_normal().string();
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        auto grid = std::make_shared<OccupancyGrid>(read_map(key));
        cache_.emplace(key, grid);
        return grid;
    }

private:
    std::map<std::string, std::shared_ptr<const OccupancyGrid>> cache_;
};

inline Episode episode_from_json(const nlohmann::json& j, const std::string& base_file,
                                 MapCache& cache) {
    Episode ep;
    ep.id = j.at("id").get<std::string>();
    ep.map_path = j.at("map_path").get<std::string>();
    const auto& s = j.at("start");
    ep.start = Pose{s.at("x_m").get<double>(), s.at("y_m").get<double>(),
                    s.at("heading_deg").get<int>(), s.at("pitch_deg").get<int>()};
    auto cat = goal_from_label(j.at("goal").get<std::string>());
    if (!cat) throw Error("episode " + ep.id + ": unknown goal");
    ep.goal = *cat;
    ep.d_init_m = j.at("d_init_m").get<double>();
    ep.grid = cache.load(base_file, ep.map_path);
    return ep;
}

inline std::vector<Episode> read_episodes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read episode file: " + path);
    MapCache cache;
    std::vector<Episode> eps;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            eps.push_back(episode_from_json(nlohmann::json::parse(line), path, cache));
        } catch (const nlohmann::json::exception& e) {
            throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return eps;
}

}  // namespace navfuse
