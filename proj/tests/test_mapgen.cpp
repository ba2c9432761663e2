#include <doctest.h>

#include "helpers.hpp"
#include "navfuse/mapgen.hpp"

using namespace navfuse;

namespace {
const std::array<int, 6> kOnePerCategory = {1, 1, 1, 1, 1, 1};
const std::array<int, 6> kTwoPerCategory = {2, 2, 2, 2, 2, 2};
}  // namespace

TEST_CASE("mapgen: density zero yields a bare bordered arena plus goal cells") {
    auto g = generate_map(16, 12, 0.0, kOnePerCategory, 3);
    g.validate();
    for (int y = 0; y < g.height_cells; ++y)
        for (int x = 0; x < g.width_cells; ++x) {
            bool border = x == 0 || y == 0 || x == g.width_cells - 1 || y == g.height_cells - 1;
            CHECK(g.is_occupied(x, y) == border);
        }
    for (int cat = 0; cat < kNumGoalCategories; ++cat)
        CHECK(g.goals[static_cast<std::size_t>(cat)].size() == 1);
}

TEST_CASE("mapgen: same seed gives byte-identical grids") {
    auto a = generate_map(40, 40, 0.15, kTwoPerCategory, 7);
    auto b = generate_map(40, 40, 0.15, kTwoPerCategory, 7);
    CHECK(a.occupied == b.occupied);
    CHECK(a.goals == b.goals);
    auto c = generate_map(40, 40, 0.15, kTwoPerCategory, 8);
    CHECK(a.occupied != c.occupied);
}

TEST_CASE("mapgen: default-scale map keeps all goals reachable from every free cell") {
    auto g = generate_map(40, 40, 0.15, kTwoPerCategory, 7);
    g.validate();
    // collect all goal cells; distance field from them must reach every free cell
    std::vector<Cell> all_goals;
    for (const auto& gl : g.goals) all_goals.insert(all_goals.end(), gl.begin(), gl.end());
    auto field = distance_field(g, all_goals);
    for (int y = 0; y < g.height_cells; ++y)
        for (int x = 0; x < g.width_cells; ++x)
            if (g.is_free(x, y)) CHECK(field.at(Cell{x, y}) < kInfiniteDistance);
    // and per-category reachability via the oracle on a sample of free cells
    Rng rng(1);
    std::vector<Cell> free_cells;
    for (int y = 0; y < g.height_cells; ++y)
        for (int x = 0; x < g.width_cells; ++x)
            if (g.is_free(x, y)) free_cells.push_back({x, y});
    for (int cat = 0; cat < kNumGoalCategories; ++cat)
        for (int i = 0; i < 5; ++i) {
            Cell from = free_cells[rng.uniform_int(free_cells.size())];
            double d = testutil::naive_dijkstra(g, from, g.goals[static_cast<std::size_t>(cat)]);
            CHECK(d < kInfiniteDistance);
        }
}

TEST_CASE("mapgen: parameter validation") {
    CHECK_THROWS_AS(generate_map(8, 40, 0.1, kOnePerCategory, 1), Error);
    CHECK_THROWS_AS(generate_map(40, 40, 0.5, kOnePerCategory, 1), Error);
    CHECK_THROWS_AS(generate_map(40, 40, 0.1, {0, 1, 1, 1, 1, 1}, 1), Error);
    CHECK_THROWS_AS(generate_map(40, 40, 0.1, {4, 1, 1, 1, 1, 1}, 1), Error);
}

namespace {

// goal cells of one furniture instance form a tight cluster; count clusters by
// transitive chebyshev-distance grouping
int count_instances(const std::vector<Cell>& cells) {
    std::vector<int> comp(cells.size(), -1);
    int n = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (comp[i] >= 0) continue;
        comp[i] = n;
        std::vector<std::size_t> queue = {i};
        while (!queue.empty()) {
            std::size_t u = queue.back();
            queue.pop_back();
            for (std::size_t v = 0; v < cells.size(); ++v) {
                if (comp[v] >= 0) continue;
                int dx = std::abs(cells[u].x - cells[v].x);
                int dy = std::abs(cells[u].y - cells[v].y);
                if (std::max(dx, dy) <= 2) {
                    comp[v] = n;
                    queue.push_back(v);
                }
            }
        }
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("mapgen: goal instance counts are honoured across seeds") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        auto g = generate_map(40, 40, 0.2, {1, 2, 3, 1, 2, 3}, seed);
        CHECK(count_instances(g.goals[0]) == 1);
        CHECK(count_instances(g.goals[1]) == 2);
        CHECK(count_instances(g.goals[2]) == 3);
        CHECK(count_instances(g.goals[3]) == 1);
        CHECK(count_instances(g.goals[4]) == 2);
        CHECK(count_instances(g.goals[5]) == 3);
        // every goal cell touches its furniture footprint
        for (const auto& cells : g.goals)
            for (Cell c : cells) {
                bool adjacent_occupied = false;
                const int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (auto& d : d4)
                    adjacent_occupied |= g.is_occupied(c.x + d[0], c.y + d[1]);
                CHECK(adjacent_occupied);
            }
    }
}
