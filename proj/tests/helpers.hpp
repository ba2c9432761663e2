#pragma once

#include <string>
#include <vector>

#include "navfuse/episode.hpp"
#include "navfuse/geodesic.hpp"
#include "navfuse/grid.hpp"
#include "navfuse/rng.hpp"

namespace testutil {

// Build a grid from ASCII art rows ('#' occupied, '.' free, 'a'..'f' goal of
// category 0..5 on a free cell). rows[0] is y=0.
inline navfuse::OccupancyGrid grid_from_art(const std::vector<std::string>& rows) {
    navfuse::OccupancyGrid g;
    g.height_cells = static_cast<int>(rows.size());
    g.width_cells = static_cast<int>(rows[0].size());
    g.occupied.assign(static_cast<std::size_t>(g.width_cells) * g.height_cells, 0);
    for (int y = 0; y < g.height_cells; ++y)
        for (int x = 0; x < g.width_cells; ++x) {
            char c = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
            if (c == '#')
                g.set_occupied(x, y, true);
            else if (c >= 'a' && c <= 'f')
                g.goals[c - 'a'].push_back(navfuse::Cell{x, y});
        }
    return g;
}

inline navfuse::Pose center_pose(int cx, int cy, int heading = 0, int pitch = 0) {
    return navfuse::Pose{navfuse::cell_center(cx), navfuse::cell_center(cy), heading, pitch};
}

// Independent naive Dijkstra: O(V^2) linear-scan extraction, same canonical
// count-based costs, no heap, no shared code with the library implementation.
inline double naive_dijkstra(const navfuse::OccupancyGrid& g, navfuse::Cell from,
                             const std::vector<navfuse::Cell>& targets) {
    using namespace navfuse;
    const int W = g.width_cells, H = g.height_cells;
    const std::size_t n = static_cast<std::size_t>(W) * H;
    std::vector<int> no(n, -1), nd(n, -1);
    std::vector<char> done(n, 0);
    auto cost = [&](std::size_t i) { return no[i] * kOrthCost + nd[i] * kDiagCost; };
    std::size_t s = static_cast<std::size_t>(from.y) * W + from.x;
    no[s] = 0;
    nd[s] = 0;
    for (;;) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i)
            if (!done[i] && no[i] >= 0 && (best == n || cost(i) < cost(best))) best = i;
        if (best == n) break;
        done[best] = 1;
        int ux = static_cast<int>(best % W), uy = static_cast<int>(best / W);
        const int d8[8][2] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                              {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
        for (auto& d : d8) {
            int vx = ux + d[0], vy = uy + d[1];
            if (g.is_occupied(vx, vy)) continue;
            bool diag = d[0] != 0 && d[1] != 0;
            if (diag && (g.is_occupied(ux + d[0], uy) || g.is_occupied(ux, uy + d[1]))) continue;
            std::size_t v = static_cast<std::size_t>(vy) * W + vx;
            int cno = no[best] + (diag ? 0 : 1);
            int cnd = nd[best] + (diag ? 1 : 0);
            double c = cno * kOrthCost + cnd * kDiagCost;
            if (no[v] < 0 || c < cost(v)) {
                no[v] = cno;
                nd[v] = cnd;
            }
        }
    }
    double best = navfuse::kInfiniteDistance;
    for (navfuse::Cell t : targets) {
        std::size_t i = static_cast<std::size_t>(t.y) * W + t.x;
        if (no[i] >= 0) best = std::min(best, cost(i));
    }
    return best;
}

inline std::string temp_dir() {
    std::string d = "navfuse_test_tmp";
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace testutil
