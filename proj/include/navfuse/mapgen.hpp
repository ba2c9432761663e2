#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "navfuse/geodesic.hpp"
#include "navfuse/grid.hpp"
#include "navfuse/rng.hpp"

namespace navfuse {

// Each goal category is realized as a small occupancy footprint with a fixed
// silhouette, stamped isolated from walls and from other obstacles, plus one
// adjacent free access cell that becomes the goal cell. Categories are thereby
// distinguishable in the 11x11 patch, which plays the role the RGB image plays
// at full scale.
namespace mapgen_detail {

struct Shape {
    std::vector<std::array<int, 2>> footprint;
    std::vector<std::array<int, 2>> keep_free;  // cells that shape legibility needs free
};

inline const std::array<Shape, kNumGoalCategories>& shapes() {
    // The egocentric patch samples a heading-rotated lattice, so silhouettes
    // blur under 30-degree rotations; categories are therefore separated by
    // cell count and elongation, which survive that aliasing. Every free cell
    // orthogonally adjacent to a footprint becomes a goal cell of the
    // instance, so the approach side does not matter (the analog of
    // multi-viewpoint goals).
    static const std::array<Shape, kNumGoalCategories> s = {{
        // chair: L tromino (3 cells)
        Shape{{{0, 0}, {1, 0}, {0, 1}}, {}},
        // bed: 2x4 block (8 cells, long)
        Shape{{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}}, {}},
        // plant: plus pentomino (5 cells, notched corners)
        Shape{{{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}}, {}},
        // toilet: domino (2 cells)
        Shape{{{0, 0}, {1, 0}}, {}},
        // tv_monitor: 2x2 block (4 cells, compact)
        Shape{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {}},
        // sofa: 1x4 bar (4 cells, elongated)
        Shape{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {}},
    }};
    return s;
}

inline std::array<int, 2> rotate(std::array<int, 2> v, int quarter) {
    switch (quarter & 3) {
        case 0: return v;
        case 1: return {-v[1], v[0]};
        case 2: return {-v[0], -v[1]};
        default: return {v[1], -v[0]};
    }
}

struct AttemptFailed {};

}  // namespace mapgen_detail

// Bordered grid with wall-and-corridor structure, isolated point obstacles,
// and 1-3 furniture instances per goal category. The largest 4-connected free
// region is kept; unreachable pockets are filled as occupied. Deterministic in
// the seed. Density 0 yields a bare bordered arena with goal cells only.
inline OccupancyGrid generate_map(int width_cells, int height_cells, double obstacle_density,
                                  const std::array<int, kNumGoalCategories>& goal_counts,
                                  std::uint64_t seed) {
    if (width_cells < 10 || height_cells < 10)
        throw Error("generate_map: width and height must be >= 10");
    if (obstacle_density < 0.0 || obstacle_density > 0.35)
        throw Error("generate_map: density must be in [0, 0.35]");
    for (int c : goal_counts)
        if (c < 1 || c > 3) throw Error("generate_map: goal counts must be in [1, 3]");

    using mapgen_detail::AttemptFailed;
    const int W = width_cells, H = height_cells;

    constexpr int kMapAttempts = 40;
    for (int attempt = 0; attempt < kMapAttempts; ++attempt) {
        Rng rng = Rng(seed).derive(0x6d61e700u + static_cast<std::uint64_t>(attempt));
        try {
            OccupancyGrid g;
            g.width_cells = W;
            g.height_cells = H;
            g.occupied.assign(static_cast<std::size_t>(W) * H, 0);
            for (int x = 0; x < W; ++x) {
                g.set_occupied(x, 0, true);
                g.set_occupied(x, H - 1, true);
            }
            for (int y = 0; y < H; ++y) {
                g.set_occupied(0, y, true);
                g.set_occupied(W - 1, y, true);
            }

            // no interior structure at all at zero density
            if (obstacle_density > 0.0) {
                // partition the interior into rooms along random split lines,
                // then open a 2-cell door through every internal wall span
                auto pick_splits = [&](int extent) {
                    std::vector<int> splits;
                    int at = 0;
                    while (extent - at > 14) {
                        int next = at + rng.range(7, 11);
                        if (extent - next < 7) break;
                        splits.push_back(next);
                        at = next;
                    }
                    return splits;
                };
                const std::vector<int> xs = pick_splits(W - 1);
                const std::vector<int> ys = pick_splits(H - 1);
                for (int sx : xs)
                    for (int y = 1; y < H - 1; ++y) g.set_occupied(sx, y, true);
                for (int sy : ys)
                    for (int x = 1; x < W - 1; ++x) g.set_occupied(x, sy, true);
                // door through each vertical wall span between two horizontal lines
                std::vector<int> ybounds = {0};
                ybounds.insert(ybounds.end(), ys.begin(), ys.end());
                ybounds.push_back(H - 1);
                std::vector<int> xbounds = {0};
                xbounds.insert(xbounds.end(), xs.begin(), xs.end());
                xbounds.push_back(W - 1);
                for (int sx : xs)
                    for (std::size_t yi = 0; yi + 1 < ybounds.size(); ++yi) {
                        const int lo = ybounds[yi] + 1, hi = ybounds[yi + 1] - 1;
                        if (hi - lo < 2) continue;
                        const int at = rng.range(lo, hi - 1);
                        g.set_occupied(sx, at, false);
                        g.set_occupied(sx, at + 1, false);
                    }
                for (int sy : ys)
                    for (std::size_t xi = 0; xi + 1 < xbounds.size(); ++xi) {
                        const int lo = xbounds[xi] + 1, hi = xbounds[xi + 1] - 1;
                        if (hi - lo < 2) continue;
                        const int at = rng.range(lo, hi - 1);
                        g.set_occupied(at, sy, false);
                        g.set_occupied(at + 1, sy, false);
                    }
            }

            auto ring_clear = [&](const std::vector<Cell>& cells) {
                for (Cell c : cells)
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            Cell n{c.x + dx, c.y + dy};
                            bool inside = std::find_if(cells.begin(), cells.end(), [&](Cell o) {
                                              return o == n;
                                          }) != cells.end();
                            if (!inside && g.is_occupied(n)) return false;
                        }
                return true;
            };

            // furniture instances (skipped entirely at zero density: the spec
            // fixture for density 0 is a bare arena)
            std::vector<Cell> footprint_halo;  // cells whose silhouette must stay intact
            std::vector<Cell> footprint_cells;
            if (obstacle_density > 0.0) {
                for (int cat = 0; cat < kNumGoalCategories; ++cat) {
                    const auto& shape = mapgen_detail::shapes()[static_cast<std::size_t>(cat)];
                    for (int inst = 0; inst < goal_counts[static_cast<std::size_t>(cat)]; ++inst) {
                        bool placed = false;
                        for (int t = 0; t < 300 && !placed; ++t) {
                            const int quarter = rng.range(0, 3);
                            const int px = rng.range(2, W - 3);
                            const int py = rng.range(2, H - 3);
                            std::vector<Cell> cells;
                            bool ok = true;
                            for (auto off : shape.footprint) {
                                auto r = mapgen_detail::rotate(off, quarter);
                                Cell c{px + r[0], py + r[1]};
                                if (c.x < 2 || c.y < 2 || c.x > W - 3 || c.y > H - 3) ok = false;
                                cells.push_back(c);
                            }
                            // keep distinct furniture silhouettes well apart
                            for (Cell c : cells)
                                for (Cell other : footprint_cells)
                                    if (std::abs(c.x - other.x) <= 2 && std::abs(c.y - other.y) <= 2)
                                        ok = false;
                            if (!ok || !ring_clear(cells)) continue;
                            for (auto off : shape.keep_free) {
                                auto r = mapgen_detail::rotate(off, quarter);
                                if (g.is_occupied(px + r[0], py + r[1])) ok = false;
                            }
                            if (!ok) continue;
                            for (Cell c : cells) g.set_occupied(c.x, c.y, true);
                            // goal cells: every free cell orthogonally adjacent
                            // to the footprint
                            std::vector<Cell> ring;
                            for (Cell c : cells) {
                                const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                                for (auto& dd : d4) {
                                    Cell n{c.x + dd[0], c.y + dd[1]};
                                    if (g.is_occupied(n)) continue;
                                    bool seen = false;
                                    for (Cell r : ring) seen |= r == n;
                                    if (!seen) ring.push_back(n);
                                }
                            }
                            auto& goal_list = g.goals[static_cast<std::size_t>(cat)];
                            goal_list.insert(goal_list.end(), ring.begin(), ring.end());
                            for (Cell c : cells) {
                                footprint_cells.push_back(c);
                                for (int dy = -1; dy <= 1; ++dy)
                                    for (int dx = -1; dx <= 1; ++dx)
                                        footprint_halo.push_back(Cell{c.x + dx, c.y + dy});
                            }
                            placed = true;
                        }
                        if (!placed) throw AttemptFailed{};
                    }
                }
            } else {
                for (int cat = 0; cat < kNumGoalCategories; ++cat)
                    for (int inst = 0; inst < goal_counts[static_cast<std::size_t>(cat)]; ++inst) {
                        bool placed = false;
                        for (int t = 0; t < 300 && !placed; ++t) {
                            Cell c{rng.range(1, W - 2), rng.range(1, H - 2)};
                            bool taken = false;
                            for (const auto& gl : g.goals)
                                for (Cell o : gl) taken |= o == c;
                            if (taken || g.is_occupied(c)) continue;
                            g.goals[static_cast<std::size_t>(cat)].push_back(c);
                            placed = true;
                        }
                        if (!placed) throw AttemptFailed{};
                    }
            }

            // isolated point obstacles
            if (obstacle_density > 0.0) {
                auto in_halo = [&](Cell c) {
                    for (Cell h : footprint_halo)
                        if (h == c) return true;
                    return false;
                };
                for (int y = 2; y < H - 2; ++y)
                    for (int x = 2; x < W - 2; ++x) {
                        if (!rng.chance(obstacle_density * 0.4)) continue;
                        Cell c{x, y};
                        if (g.is_occupied(c) || in_halo(c)) continue;
                        bool iso = true;
                        for (int dy = -1; dy <= 1 && iso; ++dy)
                            for (int dx = -1; dx <= 1 && iso; ++dx)
                                if ((dx || dy) && g.is_occupied(x + dx, y + dy)) iso = false;
                        for (int dy = -1; dy <= 1 && iso; ++dy)
                            for (int dx = -1; dx <= 1 && iso; ++dx)
                                if (in_halo(Cell{x + dx, y + dy})) iso = false;
                        if (iso) g.set_occupied(x, y, true);
                    }
            }

            // keep the largest 4-connected free region; fill the rest
            const std::size_t n = static_cast<std::size_t>(W) * H;
            std::vector<int> comp(n, -1);
            int n_comp = 0;
            std::size_t best_size = 0;
            int best_comp = -1;
            std::vector<std::size_t> stack;
            for (std::size_t i = 0; i < n; ++i) {
                if (g.occupied[i] || comp[i] >= 0) continue;
                std::size_t size = 0;
                stack.push_back(i);
                comp[i] = n_comp;
                while (!stack.empty()) {
                    std::size_t u = stack.back();
                    stack.pop_back();
                    ++size;
                    int ux = static_cast<int>(u % W), uy = static_cast<int>(u / W);
                    const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                    for (auto& d : d4) {
                        int vx = ux + d[0], vy = uy + d[1];
                        if (vx < 0 || vy < 0 || vx >= W || vy >= H) continue;
                        std::size_t v = static_cast<std::size_t>(vy) * W + vx;
                        if (!g.occupied[v] && comp[v] < 0) {
                            comp[v] = n_comp;
                            stack.push_back(v);
                        }
                    }
                }
                if (size > best_size) {
                    best_size = size;
                    best_comp = n_comp;
                }
                ++n_comp;
            }
            if (best_comp < 0) throw AttemptFailed{};

            auto halo_contains = [&](Cell c) {
                for (Cell h : footprint_halo)
                    if (h == c) return true;
                return false;
            };
            for (std::size_t i = 0; i < n; ++i) {
                if (g.occupied[i] || comp[i] == best_comp) continue;
                Cell c{static_cast<int>(i % W), static_cast<int>(i / W)};
                // filling a pocket that touches furniture would corrupt its
                // silhouette; start over instead
                if (halo_contains(c)) throw AttemptFailed{};
                g.occupied[i] = 1;
            }

            // every goal cell must sit in the kept region
            for (const auto& gl : g.goals)
                for (Cell c : gl)
                    if (g.is_occupied(c)) throw AttemptFailed{};

            // demand a usable amount of navigable space
            if (g.free_count() < static_cast<std::size_t>(W) * H / 4) throw AttemptFailed{};

            g.validate();
            return g;
        } catch (const AttemptFailed&) {
            continue;
        }
    }
    throw Error("generate_map: placement failed after bounded retries (seed " +
                std::to_string(seed) + ")");
}

}  // namespace navfuse
