#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "navfuse/core.hpp"

namespace navfuse {

// Forward step length and grid cell size coincide by construction.
inline constexpr double kCellSize = 0.25;
inline constexpr int kHeadingStep = 30;
inline constexpr int kPitchStep = 30;
inline constexpr int kPitchMin = -30;
inline constexpr int kPitchMax = 30;

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(Cell a, Cell b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(Cell a, Cell b) { return a.y != b.y ? a.y < b.y : a.x < b.x; }
};

inline int cell_index_of(double coord_m) {
    return static_cast<int>(std::floor(coord_m / kCellSize));
}

inline double cell_center(int idx) { return (idx + 0.5) * kCellSize; }

// Immutable 2D free/occupied map. Row-major, y*width + x. Borders occupied,
// goal cells free.
struct OccupancyGrid {
    int width_cells = 0;
    int height_cells = 0;
    double cell_size_m = kCellSize;
    std::vector<std::uint8_t> occupied;  // 1 occupied, 0 free
    std::array<std::vector<Cell>, kNumGoalCategories> goals;

    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width_cells && y < height_cells;
    }
    bool is_occupied(int x, int y) const {
        if (!in_bounds(x, y)) return true;  // out of bounds reads as occupied
        return occupied[static_cast<std::size_t>(y) * width_cells + x] != 0;
    }
    bool is_occupied(Cell c) const { return is_occupied(c.x, c.y); }
    bool is_free(int x, int y) const { return !is_occupied(x, y); }
    bool is_free(Cell c) const { return is_free(c.x, c.y); }

    void set_occupied(int x, int y, bool v) {
        occupied[static_cast<std::size_t>(y) * width_cells + x] = v ? 1 : 0;
    }

    Cell cell_at(double x_m, double y_m) const {
        return Cell{cell_index_of(x_m), cell_index_of(y_m)};
    }

    const std::vector<Cell>& goal_cells(GoalCategory g) const {
        return goals[static_cast<int>(g)];
    }

    std::size_t free_count() const {
        std::size_t n = 0;
        for (auto v : occupied) n += (v == 0);
        return n;
    }

    void validate() const {
        if (width_cells < 3 || height_cells < 3) throw Error("grid: degenerate dimensions");
        if (cell_size_m != kCellSize) throw Error("grid: cell_size_m must be exactly 0.25");
        if (occupied.size() != static_cast<std::size_t>(width_cells) * height_cells)
            throw Error("grid: occupancy size mismatch");
        for (int x = 0; x < width_cells; ++x)
            if (!is_occupied(x, 0) || !is_occupied(x, height_cells - 1))
                throw Error("grid: border cell free at x=" + std::to_string(x));
        for (int y = 0; y < height_cells; ++y)
            if (!is_occupied(0, y) || !is_occupied(width_cells - 1, y))
                throw Error("grid: border cell free at y=" + std::to_string(y));
        for (int g = 0; g < kNumGoalCategories; ++g)
            for (Cell c : goals[g])
                if (is_occupied(c))
                    throw Error("grid: goal cell occupied for " + std::string(kGoalLabels[g]));
    }
};

// Continuous position with quantized heading (multiples of 30 in [0,360)) and
// pitch (in {-30, 0, 30}).
struct Pose {
    double x_m = 0.0;
    double y_m = 0.0;
    int heading_deg = 0;
    int pitch_deg = 0;

    Cell cell() const { return Cell{cell_index_of(x_m), cell_index_of(y_m)}; }

    friend bool operator==(const Pose& a, const Pose& b) {
        return a.x_m == b.x_m && a.y_m == b.y_m && a.heading_deg == b.heading_deg &&
               a.pitch_deg == b.pitch_deg;
    }
};

inline int wrap_heading(int deg) {
    int d = deg % 360;
    if (d < 0) d += 360;
    return d;
}

// Wrap to [-180, 180).
inline int wrap_deg180(int deg) {
    int d = (deg % 360 + 540) % 360 - 180;
    return d;
}

inline bool pose_valid(const OccupancyGrid& grid, const Pose& p) {
    if (p.heading_deg < 0 || p.heading_deg >= 360 || p.heading_deg % kHeadingStep != 0) return false;
    if (p.pitch_deg != -30 && p.pitch_deg != 0 && p.pitch_deg != 30) return false;
    return grid.is_free(p.cell());
}

// Heading cosines/sines for the 12 discrete headings. The 0.5 magnitudes are
// nudged down by 1e-12 so a forward step from a cell center lands strictly
// inside the same or an orthogonally adjacent cell instead of exactly on a
// cell boundary; the step length stays 0.25 m to within 1e-12.
namespace detail {
inline constexpr double kHalf = 0.5 - 1e-12;
inline constexpr double kRoot3Half = 0.8660254037844386;
inline constexpr std::array<double, 12> kHeadingCos = {
    1.0, kRoot3Half, kHalf, 0.0, -kHalf, -kRoot3Half,
    -1.0, -kRoot3Half, -kHalf, 0.0, kHalf, kRoot3Half};
inline constexpr std::array<double, 12> kHeadingSin = {
    0.0, kHalf, kRoot3Half, 1.0, kRoot3Half, kHalf,
    0.0, -kHalf, -kRoot3Half, -1.0, -kRoot3Half, -kHalf};
}  // namespace detail

inline double heading_cos(int heading_deg) { return detail::kHeadingCos[wrap_heading(heading_deg) / 30]; }
inline double heading_sin(int heading_deg) { return detail::kHeadingSin[wrap_heading(heading_deg) / 30]; }

struct StepOutcome {
    Pose pose;
    bool collided = false;
    bool stopped = false;
};

// Execute one action. Collisions leave the pose bit-identical.
inline StepOutcome step(const OccupancyGrid& grid, const Pose& pose, Action action) {
    StepOutcome out;
    out.pose = pose;
    switch (action) {
        case Action::Stop:
            out.stopped = true;
            return out;
        case Action::TurnLeft:
            out.pose.heading_deg = wrap_heading(pose.heading_deg + kHeadingStep);
            return out;
        case Action::TurnRight:
            out.pose.heading_deg = wrap_heading(pose.heading_deg - kHeadingStep);
            return out;
        case Action::LookUp:
            out.pose.pitch_deg = std::min(pose.pitch_deg + kPitchStep, kPitchMax);
            return out;
        case Action::LookDown:
            out.pose.pitch_deg = std::max(pose.pitch_deg - kPitchStep, kPitchMin);
            return out;
        case Action::MoveForward: {
            const double nx = pose.x_m + kCellSize * heading_cos(pose.heading_deg);
            const double ny = pose.y_m + kCellSize * heading_sin(pose.heading_deg);
            if (grid.is_occupied(cell_index_of(nx), cell_index_of(ny))) {
                out.collided = true;  // pose unchanged
                return out;
            }
            out.pose.x_m = nx;
            out.pose.y_m = ny;
            return out;
        }
    }
    throw Error("step: unknown action");
}

// Exactly the actions whose step() outcome collides at this pose.
inline ActionSet colliding_actions(const OccupancyGrid& grid, const Pose& pose) {
    ActionSet s;
    if (step(grid, pose, Action::MoveForward).collided) s.insert(Action::MoveForward);
    return s;
}

// ---- map file I/O ----
// { "cell_size_m": 0.25, "rows": ["####", "#..#", ...], "goals": {"chair": [[x,y], ...], ...} }

inline nlohmann::json grid_to_json(const OccupancyGrid& g) {
    nlohmann::json j;
    j["cell_size_m"] = g.cell_size_m;
    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(g.height_cells));
    for (int y = 0; y < g.height_cells; ++y) {
        std::string row(static_cast<std::size_t>(g.width_cells), '.');
        for (int x = 0; x < g.width_cells; ++x)
            if (g.is_occupied(x, y)) row[static_cast<std::size_t>(x)] = '#';
        rows.push_back(std::move(row));
    }
    j["rows"] = rows;
    nlohmann::json goals = nlohmann::json::object();
    for (int gi = 0; gi < kNumGoalCategories; ++gi) {
        nlohmann::json cells = nlohmann::json::array();
        for (Cell c : g.goals[gi]) cells.push_back({c.x, c.y});
        goals[std::string(kGoalLabels[gi])] = cells;
    }
    j["goals"] = goals;
    return j;
}

inline OccupancyGrid grid_from_json(const nlohmann::json& j) {
    OccupancyGrid g;
    g.cell_size_m = j.at("cell_size_m").get<double>();
    const auto& rows = j.at("rows");
    g.height_cells = static_cast<int>(rows.size());
    if (g.height_cells == 0) throw Error("map: empty rows");
    g.width_cells = static_cast<int>(rows[0].get<std::string>().size());
    g.occupied.assign(static_cast<std::size_t>(g.width_cells) * g.height_cells, 0);
    for (int y = 0; y < g.height_cells; ++y) {
        const std::string row = rows[static_cast<std::size_t>(y)].get<std::string>();
        if (static_cast<int>(row.size()) != g.width_cells)
            throw Error("map: ragged row at y=" + std::to_string(y));
        for (int x = 0; x < g.width_cells; ++x) {
            char c = row[static_cast<std::size_t>(x)];
            if (c != '#' && c != '.') throw Error("map: bad cell char at y=" + std::to_string(y));
            g.set_occupied(x, y, c == '#');
        }
    }
    for (auto it = j.at("goals").begin(); it != j.at("goals").end(); ++it) {
        auto cat = goal_from_label(it.key());
        if (!cat) throw Error("map: unknown goal category '" + it.key() + "'");
        for (const auto& cj : it.value())
            g.goals[static_cast<int>(*cat)].push_back(Cell{cj.at(0).get<int>(), cj.at(1).get<int>()});
    }
    g.validate();
    return g;
}

inline void write_map(const OccupancyGrid& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write map file: " + path);
    out << grid_to_json(g).dump(1) << "\n";
}

inline OccupancyGrid read_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read map file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("map file " + path + ": " + e.what());
    }
    return grid_from_json(j);
}

}  // namespace navfuse
