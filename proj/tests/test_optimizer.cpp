#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sandwalk/optimizer.hpp"

using namespace sandwalk;

namespace {

/// Small, fast scenario shared by the GA tests.
struct Fixture {
    GaitProfile gait = synth_gait(0.35, 0.3, 0.04, 2, 0.85);
    StressMap map = test_map(2e5);
    Scenario sc;

    Fixture() {
        sc.gait = &gait;
        sc.map = &map;
        sc.params.t_f = 0.6;
        sc.params.dt = 5e-4;
        sc.params.settle_time = 0.2;
        sc.params.plate_count = 40;
        sc.waypoints = 4;
        sc.depth_levels = 2;
    }
};

}  // namespace

TEST_CASE("evaluate is deterministic") {
    Fixture f;
    const Genome g{{2, 1, 2, 1}};
    const CostBreakdown a = evaluate(g, f.sc);
    const CostBreakdown b = evaluate(g, f.sc);
    REQUIRE(a.j_w == b.j_w);
    REQUIRE(a.x_tf == b.x_tf);
    REQUIRE(a.w_abs == b.w_abs);
}

TEST_CASE("all-K genome equals a hand-built flat-bottom contour") {
    Fixture f;
    const Genome g{{2, 2, 2, 2}};
    const CostBreakdown via_genome = evaluate(g, f.sc);

    // Same geometry built directly: flat bottom at -H with end caps.
    const double L = f.sc.domain_half_length, H = f.sc.domain_half_height;
    FootContour c;
    c.vertices = {{-L, 0.0}, {-L, -H}, {L, -H}, {L, 0.0}};
    c.width = f.sc.params.foot_width;
    const SimTrajectory traj = simulate(f.gait, c, c, f.map, f.sc.params);
    const CostBreakdown direct = metrics(traj);

    REQUIRE(via_genome.j_w == Catch::Approx(direct.j_w).margin(1e-9));
    REQUIRE(via_genome.x_tf == Catch::Approx(direct.x_tf).margin(1e-9));
    REQUIRE(via_genome.w_abs == Catch::Approx(direct.w_abs).margin(1e-9));
}

TEST_CASE("cost sign: forward progress with losses gives negative j_w") {
    Fixture f;
    const CostBreakdown c = evaluate(Genome{{1, 1, 1, 1}}, f.sc);
    REQUIRE(c.x_tf > 0.0);
    REQUIRE(c.w_abs > 0.0);
    REQUIRE(c.j_w < 0.0);
}

TEST_CASE("degenerate near-stationary scenario is handled by the reward floor") {
    // Frozen gait: both ankles pinned, no stance switches, essentially no
    // forward progress; the negative-reward product collapses to the floor.
    GaitProfile frozen;
    frozen.time = {0.0, 1.0};
    frozen.left_pos = {{0.05, -0.85}, {0.05, -0.85}};
    frozen.right_pos = {{-0.05, -0.85}, {-0.05, -0.85}};
    frozen.left_vel = {{0, 0}, {0, 0}};
    frozen.right_vel = {{0, 0}, {0, 0}};
    frozen.velocities_given = true;

    Fixture f;
    f.sc.gait = &frozen;
    f.sc.params.t_f = 0.3;
    const CostBreakdown c = evaluate(Genome{{1, 2, 2, 1}}, f.sc);
    REQUIRE(std::isfinite(c.j_w));
    REQUIRE(c.dvx == 0.0);
    REQUIRE(c.j_w == -(c.x_tf * c.z_bar) / kRewardFloor);
}

TEST_CASE("GA finds the brute-force optimum on an enumerable instance") {
    Fixture f;
    const auto [best_g, best_c] = brute_force_best(f.sc);  // 2^4 = 16 genomes

    GAConfig cfg;
    cfg.population = 8;
    cfg.generations = 5;
    cfg.seed = 7;
    const OptimizeResult res = optimize(cfg, f.sc);
    REQUIRE(res.best_cost.j_w == best_c.j_w);
    REQUIRE(res.best.k == best_g.k);
}

TEST_CASE("single-generation run returns the best of the initial population") {
    Fixture f;
    GAConfig cfg;
    cfg.population = 6;
    cfg.generations = 1;
    cfg.seed = 3;
    const OptimizeResult res = optimize(cfg, f.sc);
    REQUIRE(res.history.size() == 1);
    REQUIRE(res.best_cost.j_w == res.history[0].best_j_w);
}

TEST_CASE("elitism keeps the per-generation best monotone") {
    Fixture f;
    GAConfig cfg;
    cfg.population = 8;
    cfg.generations = 6;
    cfg.seed = 11;
    cfg.elites = 2;
    const OptimizeResult res = optimize(cfg, f.sc);
    for (std::size_t i = 1; i < res.history.size(); ++i)
        REQUIRE(res.history[i].best_j_w <= res.history[i - 1].best_j_w + 1e-15);
}

TEST_CASE("seed determinism at any worker count") {
    Fixture f;
    GAConfig cfg;
    cfg.population = 8;
    cfg.generations = 4;
    cfg.seed = 42;
    const OptimizeResult serial = optimize(cfg, f.sc, /*workers=*/1);
    const OptimizeResult parallel = optimize(cfg, f.sc, /*workers=*/4);
    REQUIRE(serial.best.k == parallel.best.k);
    REQUIRE(serial.best_cost.j_w == parallel.best_cost.j_w);
    REQUIRE(serial.history.size() == parallel.history.size());
    for (std::size_t i = 0; i < serial.history.size(); ++i) {
        REQUIRE(serial.history[i].best_j_w == parallel.history[i].best_j_w);
        REQUIRE(serial.history[i].mean_j_w == parallel.history[i].mean_j_w);
    }
}

TEST_CASE("different seeds explore differently") {
    Fixture f;
    GAConfig a, b;
    a.population = b.population = 6;
    a.generations = b.generations = 2;
    a.seed = 1;
    b.seed = 2;
    const OptimizeResult ra = optimize(a, f.sc);
    const OptimizeResult rb = optimize(b, f.sc);
    // Histories are allowed to collide only by coincidence of tiny spaces;
    // with 16 genomes the initial populations differ essentially always.
    CHECK((ra.history[0].mean_j_w != rb.history[0].mean_j_w ||
           ra.history[0].best_j_w != rb.history[0].best_j_w));
}

TEST_CASE("config validation") {
    GAConfig cfg;
    cfg.population = 1;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.crossover_rate = 1.5;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.elites = 40;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("genome bounds are preserved through the run") {
    Fixture f;
    f.sc.waypoints = 5;
    f.sc.depth_levels = 3;
    GAConfig cfg;
    cfg.population = 10;
    cfg.generations = 4;
    cfg.seed = 9;
    const OptimizeResult res = optimize(cfg, f.sc);
    for (int v : res.best.k) {
        REQUIRE(v >= 1);
        REQUIRE(v <= 3);
    }
}
