#include <doctest.h>

#include "helpers.hpp"
#include "navfuse/expert.hpp"
#include "navfuse/mapgen.hpp"

using namespace navfuse;
using testutil::center_pose;

namespace {

std::shared_ptr<const OccupancyGrid> arena_with_goal(GoalCategory cat, Cell goal) {
    auto g = std::make_shared<OccupancyGrid>();
    auto base = testutil::grid_from_art({
        "############",
        "#..........#",
        "#..........#",
        "#..........#",
        "#..........#",
        "############",
    });
    base.goals[static_cast<int>(cat)].push_back(goal);
    *g = base;
    return g;
}

}  // namespace

TEST_CASE("expert_action: stops within 1.0 m at the documented default radius") {
    auto g = arena_with_goal(GoalCategory::Chair, Cell{4, 2});
    // 0.5 m geodesic from goal (two orthogonal cells away)
    CHECK(expert_action(g, center_pose(2, 2, 0), g->goal_cells(GoalCategory::Chair)) ==
          Action::Stop);
    // 1.25 m away: keeps going
    CHECK(expert_action(g, center_pose(9, 2, 180), g->goal_cells(GoalCategory::Chair)) ==
          Action::MoveForward);
}

TEST_CASE("expert_action: aligned with a clear path moves forward") {
    auto g = arena_with_goal(GoalCategory::Bed, Cell{10, 2});
    CHECK(expert_action(g, center_pose(2, 2, 0), g->goal_cells(GoalCategory::Bed), 0.0) ==
          Action::MoveForward);
}

TEST_CASE("expert_action: goal directly behind turns left (tie-break)") {
    auto g = arena_with_goal(GoalCategory::Bed, Cell{2, 2});
    CHECK(expert_action(g, center_pose(9, 2, 0), g->goal_cells(GoalCategory::Bed), 0.0) ==
          Action::TurnLeft);
}

TEST_CASE("expert_action: unreachable goal errors") {
    auto g = std::make_shared<OccupancyGrid>(testutil::grid_from_art({
        "#######",
        "#..#..#",
        "#..#..#",
        "#######",
    }));
    g->goals[0].push_back(Cell{5, 1});
    auto grid = std::static_pointer_cast<const OccupancyGrid>(g);
    CHECK_THROWS_AS(expert_action(grid, center_pose(1, 1, 0), grid->goal_cells(GoalCategory::Chair), 0.0),
                    Error);
}

TEST_CASE("bearing rounding: nearest multiple of 30, midpoints go counter-clockwise") {
    CHECK(round_bearing_30(0.0) == 0);
    CHECK(round_bearing_30(14.9) == 0);
    CHECK(round_bearing_30(15.0) == 30);  // exact midpoint rounds toward TurnLeft
    CHECK(round_bearing_30(44.9) == 30);
    CHECK(round_bearing_30(45.0) == 60);
    CHECK(round_bearing_30(-14.9) == 0);
    CHECK(round_bearing_30(-15.0) == 0);   // -15 == 345 midpoint -> 360 -> 0
    CHECK(round_bearing_30(-16.0) == 330);
    CHECK(round_bearing_30(359.9) == 0);
}

TEST_CASE("noise-free demonstrations reach the goal, stop there, and never collide") {
    std::vector<std::pair<std::shared_ptr<const OccupancyGrid>, std::string>> maps;
    for (std::uint64_t s = 0; s < 3; ++s)
        maps.push_back({std::make_shared<OccupancyGrid>(
                            generate_map(40, 40, 0.15, {2, 2, 2, 2, 2, 2}, 100 + s)),
                        "map" + std::to_string(s)});
    ExpertConfig cfg;
    cfg.noise_eps = 0.0;
    cfg.seed = 9;
    DemoGenStats stats;
    auto demos = generate_demonstrations(maps, 12, cfg, &stats);
    REQUIRE(!demos.empty());
    CHECK(stats.truncated == 0);
    for (const auto& d : demos) {
        REQUIRE(!d.steps.empty());
        CHECK(d.success);
        CHECK(d.steps.back().action == Action::Stop);
        int forwards = 0;
        for (const auto& s : d.steps) {
            CHECK(!s.collided);  // expert checks before moving
            forwards += s.action == Action::MoveForward;
        }
        // path must cover at least the required geodesic distance minus the
        // stop slack
        CHECK(forwards * 0.25 >= d.episode.d_init_m - kSuccessRadius - 1e-9);
        // demonstrated Stop only occurs within the success radius
        auto& grid = *d.episode.grid;
        Pose pose = d.episode.start;
        for (const auto& s : d.steps) {
            if (s.action == Action::Stop) {
                double dist = geodesic_distance(grid, pose.cell(),
                                                grid.goal_cells(d.episode.goal));
                CHECK(dist <= kSuccessRadius);
            }
            pose = step(grid, pose, s.action).pose;
        }
    }
}

TEST_CASE("demo generation is deterministic in the seed") {
    std::vector<std::pair<std::shared_ptr<const OccupancyGrid>, std::string>> maps = {
        {std::make_shared<OccupancyGrid>(generate_map(30, 30, 0.2, {1, 1, 1, 1, 1, 1}, 55)), "m"}};
    ExpertConfig cfg;
    cfg.noise_eps = 0.15;
    cfg.seed = 77;
    auto a = generate_demonstrations(maps, 8, cfg);
    auto b = generate_demonstrations(maps, 8, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].episode.id == b[i].episode.id);
        REQUIRE(a[i].steps.size() == b[i].steps.size());
        for (std::size_t t = 0; t < a[i].steps.size(); ++t) {
            CHECK(a[i].steps[t].action == b[i].steps[t].action);
            CHECK(a[i].steps[t].collided == b[i].steps[t].collided);
        }
    }
    cfg.seed = 78;
    auto c = generate_demonstrations(maps, 8, cfg);
    bool any_diff = a.size() != c.size();
    for (std::size_t i = 0; !any_diff && i < a.size(); ++i)
        any_diff = a[i].steps.size() != c[i].steps.size();
    CHECK(any_diff);
}

TEST_CASE("noisy demonstrations contain collisions and wall-facing states") {
    std::vector<std::pair<std::shared_ptr<const OccupancyGrid>, std::string>> maps;
    for (std::uint64_t s = 0; s < 3; ++s)
        maps.push_back({std::make_shared<OccupancyGrid>(
                            generate_map(40, 40, 0.25, {2, 2, 2, 2, 2, 2}, 31 + s)),
                        "m" + std::to_string(s)});
    ExpertConfig cfg;
    cfg.noise_eps = 0.25;
    cfg.seed = 5;
    auto demos = generate_demonstrations(maps, 40, cfg);
    int collisions = 0, steps = 0, wall_facing = 0;
    for (const auto& d : demos) {
        Pose pose = d.episode.start;
        for (const auto& s : d.steps) {
            collisions += s.collided;
            ++steps;
            wall_facing += !colliding_actions(*d.episode.grid, pose).empty();
            pose = step(*d.episode.grid, pose, s.action).pose;
        }
    }
    CHECK(collisions > 0);
    // a meaningful fraction of states has a masked forward action
    CHECK(wall_facing > steps / 100);
}

TEST_CASE("demo corpus round trip and streaming") {
    auto dir = testutil::temp_dir();
    auto grid = std::make_shared<OccupancyGrid>(generate_map(30, 30, 0.15, {1, 1, 1, 1, 1, 1}, 61));
    write_map(*grid, dir + "/m61.json");
    std::vector<std::pair<std::shared_ptr<const OccupancyGrid>, std::string>> maps = {
        {grid, "m61.json"}};
    ExpertConfig cfg;
    cfg.noise_eps = 0.1;
    cfg.seed = 3;
    auto demos = generate_demonstrations(maps, 10, cfg);
    write_demos(demos, dir + "/demos.jsonl");

    auto back = read_demos(dir + "/demos.jsonl");
    REQUIRE(back.size() == demos.size());
    for (std::size_t i = 0; i < demos.size(); ++i) {
        CHECK(back[i].episode.id == demos[i].episode.id);
        CHECK(back[i].episode.start == demos[i].episode.start);
        CHECK(back[i].episode.d_init_m == demos[i].episode.d_init_m);
        CHECK(back[i].success == demos[i].success);
        REQUIRE(back[i].steps.size() == demos[i].steps.size());
        for (std::size_t t = 0; t < demos[i].steps.size(); ++t) {
            const auto& x = demos[i].steps[t];
            const auto& y = back[i].steps[t];
            CHECK(x.action == y.action);
            CHECK(x.collided == y.collided);
            CHECK(x.obs.patch == y.obs.patch);
            CHECK(x.obs.gps_dx_m == y.obs.gps_dx_m);
            CHECK(x.obs.gps_dy_m == y.obs.gps_dy_m);
            CHECK(x.obs.compass_rad == y.obs.compass_rad);
            CHECK(x.obs.prev_action == y.obs.prev_action);
            CHECK(x.obs.goal == y.obs.goal);
            CHECK(x.obs.collided_last == y.obs.collided_last);
        }
    }

    // streaming visits the same records one at a time and can stop early
    int seen = 0;
    for_each_demo(dir + "/demos.jsonl", [&](DemonstrationRecord&& r) {
        CHECK(r.episode.id == demos[static_cast<std::size_t>(seen)].episode.id);
        return ++seen < 3;
    });
    CHECK(seen == 3);
}

TEST_CASE("demo corpus: truncated and malformed files produce located errors") {
    auto dir = testutil::temp_dir();
    auto grid = std::make_shared<OccupancyGrid>(generate_map(20, 20, 0.1, {1, 1, 1, 1, 1, 1}, 8));
    write_map(*grid, dir + "/m8.json");
    ExpertConfig cfg;
    cfg.seed = 1;
    auto demos = generate_demonstrations({{grid, "m8.json"}}, 2, cfg);
    write_demos(demos, dir + "/d.jsonl");

    // drop the last line
    std::ifstream in(dir + "/d.jsonl");
    std::vector<std::string> lines;
    std::string l;
    while (std::getline(in, l)) lines.push_back(l);
    in.close();
    {
        std::ofstream out(dir + "/trunc.jsonl");
        for (std::size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << "\n";
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(read_demos(dir + "/trunc.jsonl")),
                         doctest::Contains("truncated"), Error);

    // corrupt a field on a known line
    {
        std::ofstream out(dir + "/bad.jsonl");
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (i == 1) {
                auto j = nlohmann::json::parse(lines[i]);
                j.erase("compass");
                out << j.dump() << "\n";
            } else {
                out << lines[i] << "\n";
            }
        }
    }
    try {
        auto r = read_demos(dir + "/bad.jsonl");
        FAIL("expected error");
    } catch (const Error& e) {
        std::string msg = e.what();
        CHECK(msg.find(":2") != std::string::npos);       // line number
        CHECK(msg.find("compass") != std::string::npos);  // field name
    }
}
