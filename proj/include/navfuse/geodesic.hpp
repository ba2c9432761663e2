#pragma once

#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

#include "navfuse/grid.hpp"

namespace navfuse {

inline constexpr double kOrthCost = kCellSize;
inline constexpr double kDiagCost = kCellSize * std::numbers::sqrt2_v<double>;
inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

// 8-connected neighbourhood, counter-clockwise from east. Diagonal moves are
// permitted only when both adjacent orthogonal cells are free (no corner
// cutting).
inline constexpr std::array<std::array<int, 2>, 8> kNeighbors8 = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

// Distances are carried as (orthogonal, diagonal) step counts and realized as
// n_orth*0.25 + n_diag*0.25*sqrt(2). Two paths of distinct step counts can
// never have equal cost, so the optimal counts per cell are unique and any two
// correct solvers produce bit-identical distances.
struct DistanceField {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> n_orth;
    std::vector<std::uint32_t> n_diag;
    std::vector<std::uint8_t> reached;

    double at(Cell c) const {
        if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) return kInfiniteDistance;
        std::size_t i = static_cast<std::size_t>(c.y) * width + c.x;
        if (!reached[i]) return kInfiniteDistance;
        return n_orth[i] * kOrthCost + n_diag[i] * kDiagCost;
    }
};

inline bool diagonal_allowed(const OccupancyGrid& g, Cell from, int dx, int dy) {
    return g.is_free(from.x + dx, from.y) && g.is_free(from.x, from.y + dy);
}

// Multi-source Dijkstra over the free-cell graph.
inline DistanceField distance_field(const OccupancyGrid& grid, std::span<const Cell> sources) {
    DistanceField f;
    f.width = grid.width_cells;
    f.height = grid.height_cells;
    const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
    f.n_orth.assign(n, 0);
    f.n_diag.assign(n, 0);
    f.reached.assign(n, 0);
    std::vector<std::uint8_t> settled(n, 0);

    struct Node {
        double dist;
        std::uint32_t idx;
        bool operator>(const Node& o) const {
            if (dist != o.dist) return dist > o.dist;
            return idx > o.idx;
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap;

    auto idx_of = [&](Cell c) { return static_cast<std::size_t>(c.y) * f.width + c.x; };

    for (Cell s : sources) {
        if (grid.is_occupied(s)) continue;
        std::size_t i = idx_of(s);
        if (f.reached[i]) continue;
        f.reached[i] = 1;
        heap.push(Node{0.0, static_cast<std::uint32_t>(i)});
    }

    while (!heap.empty()) {
        Node top = heap.top();
        heap.pop();
        std::size_t u = top.idx;
        if (settled[u]) continue;
        settled[u] = 1;
        Cell cu{static_cast<int>(u % f.width), static_cast<int>(u / f.width)};
        const std::uint32_t uo = f.n_orth[u], ud = f.n_diag[u];
        for (const auto& d : kNeighbors8) {
            Cell cv{cu.x + d[0], cu.y + d[1]};
            if (grid.is_occupied(cv)) continue;
            const bool diag = d[0] != 0 && d[1] != 0;
            if (diag && !diagonal_allowed(grid, cu, d[0], d[1])) continue;
            std::size_t v = idx_of(cv);
            if (settled[v]) continue;
            const std::uint32_t vo = uo + (diag ? 0 : 1);
            const std::uint32_t vd = ud + (diag ? 1 : 0);
            const double cand = vo * kOrthCost + vd * kDiagCost;
            if (!f.reached[v] || cand < f.n_orth[v] * kOrthCost + f.n_diag[v] * kDiagCost) {
                f.reached[v] = 1;
                f.n_orth[v] = vo;
                f.n_diag[v] = vd;
                heap.push(Node{cand, static_cast<std::uint32_t>(v)});
            }
        }
    }
    return f;
}

// Shortest-path cost from one free cell to the nearest of to_cells, in meters.
// Returns +inf when unreachable. Errors if from_cell is occupied.
inline double geodesic_distance(const OccupancyGrid& grid, Cell from_cell,
                                std::span<const Cell> to_cells) {
    if (grid.is_occupied(from_cell))
        throw Error("geodesic_distance: from_cell is occupied");
    if (to_cells.empty()) throw Error("geodesic_distance: empty target set");
    DistanceField f = distance_field(grid, to_cells);
    return f.at(from_cell);
}

inline double geodesic_distance(const OccupancyGrid& grid, Cell from_cell,
                                const std::vector<Cell>& to_cells) {
    return geodesic_distance(grid, from_cell, std::span<const Cell>(to_cells));
}

}  // namespace navfuse
