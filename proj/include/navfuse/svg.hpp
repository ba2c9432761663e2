#pragma once

#include <cstdio>
#include <string>

#include "navfuse/evalharness.hpp"
#include "navfuse/grid.hpp"

namespace navfuse {

// SVG rendering of a trajectory over its grid: occupied cells, goal and start
// markers, the agent polyline, and crosses at collision poses. Deterministic
// text output; y points up (flipped from SVG's convention).
inline std::string render_trajectory(const OccupancyGrid& grid, const Trajectory& traj,
                                     GoalCategory goal = GoalCategory::Chair) {
    const int scale = 16;
    const int W = grid.width_cells * scale;
    const int H = grid.height_cells * scale;
    auto px = [&](double x_m) { return x_m / kCellSize * scale; };
    auto py = [&](double y_m) { return H - y_m / kCellSize * scale; };

    std::string svg;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  W, H, W, H);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int y = 0; y < grid.height_cells; ++y)
        for (int x = 0; x < grid.width_cells; ++x)
            if (grid.is_occupied(x, y)) {
                std::snprintf(buf, sizeof buf,
                              "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"#444\"/>\n",
                              x * scale, H - (y + 1) * scale, scale, scale);
                svg += buf;
            }
    static const char* kGoalColors[kNumGoalCategories] = {"#e41a1c", "#377eb8", "#4daf4a",
                                                          "#984ea3", "#ff7f00", "#a65628"};
    for (int cat = 0; cat < kNumGoalCategories; ++cat)
        for (Cell c : grid.goals[static_cast<std::size_t>(cat)]) {
            std::snprintf(buf, sizeof buf,
                          "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.1f\" fill=\"%s\" "
                          "stroke=\"%s\" stroke-width=\"2\"/>\n",
                          px(cell_center(c.x)), py(cell_center(c.y)), scale * 0.4,
                          cat == static_cast<int>(goal) ? kGoalColors[cat] : "none",
                          kGoalColors[cat]);
            svg += buf;
        }
    if (!traj.points.empty()) {
        const Pose& s = traj.points.front().pose;
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.1f\" fill=\"none\" stroke=\"green\" "
                      "stroke-width=\"3\"/>\n",
                      px(s.x_m), py(s.y_m), scale * 0.45);
        svg += buf;
        if (traj.points.size() > 1) {
            svg += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
            for (std::size_t i = 0; i < traj.points.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", i ? " " : "",
                              px(traj.points[i].pose.x_m), py(traj.points[i].pose.y_m));
                svg += buf;
            }
            svg += "\"/>\n";
        }
        for (const auto& p : traj.points)
            if (p.collided) {
                const double cx = px(p.pose.x_m), cy = py(p.pose.y_m);
                const double r = scale * 0.3;
                std::snprintf(buf, sizeof buf,
                              "<path d=\"M %.1f %.1f L %.1f %.1f M %.1f %.1f L %.1f %.1f\" "
                              "stroke=\"red\" stroke-width=\"2\"/>\n",
                              cx - r, cy - r, cx + r, cy + r, cx - r, cy + r, cx + r, cy - r);
                svg += buf;
            }
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace navfuse
