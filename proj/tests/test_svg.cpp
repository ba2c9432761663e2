#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "navfuse/svg.hpp"

using namespace navfuse;

namespace {

OccupancyGrid fixture_grid() {
    auto g = testutil::grid_from_art({
        "########",
        "#......#",
        "#.##...#",
        "#....a.#",
        "########",
    });
    return g;
}

Trajectory fixture_traj() {
    Trajectory t;
    t.points.push_back({testutil::center_pose(1, 1, 0), false});
    t.points.push_back({testutil::center_pose(2, 1, 0), true});
    t.points.push_back({testutil::center_pose(3, 1, 30), false});
    t.points.push_back({Pose{0.97650635094611, 0.5, 30, 0}, false});
    return t;
}

}  // namespace

TEST_CASE("svg: empty trajectory renders grid and nothing else") {
    auto g = fixture_grid();
    auto svg = render_trajectory(g, Trajectory{});
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<polyline") == std::string::npos);
    CHECK(svg.find("stroke=\"green\"") == std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);  // goal marker still present
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}

TEST_CASE("svg: deterministic output with markers, polyline, collision cross") {
    auto g = fixture_grid();
    auto t = fixture_traj();
    auto a = render_trajectory(g, t, GoalCategory::Chair);
    auto b = render_trajectory(g, t, GoalCategory::Chair);
    CHECK(a == b);
    CHECK(a.find("<polyline") != std::string::npos);
    CHECK(a.find("stroke=\"green\"") != std::string::npos);  // start marker
    CHECK(a.find("stroke=\"red\"") != std::string::npos);    // collision cross
}

TEST_CASE("svg: golden file match on the 3-step fixture") {
    auto g = fixture_grid();
    auto svg = render_trajectory(g, fixture_traj(), GoalCategory::Chair);
    const std::string golden_path = std::string(NAVFUSE_TEST_DATA_DIR) + "/trajectory_fixture.svg";
    std::ifstream in(golden_path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "golden file missing: ", golden_path);
    std::string golden((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(svg == golden);
}
