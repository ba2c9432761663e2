#pragma once

#include <array>
#include <numbers>
#include <optional>

#include "navfuse/grid.hpp"

namespace navfuse {

inline constexpr int kPatchSide = 11;
inline constexpr int kPatchRadius = kPatchSide / 2;
inline constexpr int kPatchCells = kPatchSide * kPatchSide;

// Agent observation. The patch is egocentric: entry (ahead, right) holds the
// occupancy of the cell where the agent would land after `ahead` forward
// steps and `right` rightward steps from its current position and heading, so
// entry (1, 0) is exactly the MoveForward destination cell. Out-of-bounds
// cells read as occupied. gps and compass are relative to the episode start
// pose; compass is positive counter-clockwise in [-pi, pi).
struct Observation {
    std::array<std::uint8_t, kPatchCells> patch{};
    double gps_dx_m = 0.0;
    double gps_dy_m = 0.0;
    double compass_rad = 0.0;
    std::optional<Action> prev_action;
    GoalCategory goal = GoalCategory::Chair;
    bool collided_last = false;

    // patch index for agent-frame offsets in [-5, 5]
    static int patch_index(int right, int ahead) {
        return (ahead + kPatchRadius) * kPatchSide + (right + kPatchRadius);
    }
};

inline Observation observe(const OccupancyGrid& grid, const Pose& pose, const Pose& start,
                           GoalCategory goal, std::optional<Action> prev_action,
                           bool collided_last) {
    Observation o;
    const double fx = kCellSize * heading_cos(pose.heading_deg);
    const double fy = kCellSize * heading_sin(pose.heading_deg);
    const double rx = kCellSize * heading_cos(pose.heading_deg - 90);
    const double ry = kCellSize * heading_sin(pose.heading_deg - 90);
    for (int ahead = -kPatchRadius; ahead <= kPatchRadius; ++ahead)
        for (int right = -kPatchRadius; right <= kPatchRadius; ++right) {
            const double sx = pose.x_m + ahead * fx + right * rx;
            const double sy = pose.y_m + ahead * fy + right * ry;
            o.patch[static_cast<std::size_t>(Observation::patch_index(right, ahead))] =
                grid.is_occupied(cell_index_of(sx), cell_index_of(sy)) ? 1 : 0;
        }
    o.gps_dx_m = pose.x_m - start.x_m;
    o.gps_dy_m = pose.y_m - start.y_m;
    o.compass_rad = wrap_deg180(pose.heading_deg - start.heading_deg) *
                    std::numbers::pi_v<double> / 180.0;
    o.prev_action = prev_action;
    o.goal = goal;
    o.collided_last = collided_last;
    return o;
}

}  // namespace navfuse
