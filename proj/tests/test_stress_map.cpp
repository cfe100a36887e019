#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "sandwalk/stress_map.hpp"

using namespace sandwalk;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string render(const StressMap& m) {
    std::ostringstream os;
    write_stress_map(os, m);
    return os.str();
}

}  // namespace

TEST_CASE("symmetry_reduce identity inside the principal domain") {
    const auto r = symmetry_reduce(0.3, 0.4);
    CHECK(r.beta == Catch::Approx(0.3));
    CHECK(r.gamma == Catch::Approx(0.4));
    CHECK(r.sign_x == 1.0);
}

TEST_CASE("symmetry_reduce mirrors leftward motion") {
    // Moving leftward and slightly down: gamma near -pi.
    const double gamma = -kPi + 0.2;  // velocity direction (-cos 0.2, -sin 0.2)
    const auto r = symmetry_reduce(0.3, gamma);
    CHECK(r.sign_x == -1.0);
    CHECK(r.beta == Catch::Approx(-0.3));
    CHECK(r.gamma == Catch::Approx(-kPi - gamma));  // mirrored about vertical
    // Leftward and up.
    const auto r2 = symmetry_reduce(-0.1, kPi - 0.25);
    CHECK(r2.sign_x == -1.0);
    CHECK(r2.beta == Catch::Approx(0.1));
    CHECK(r2.gamma == Catch::Approx(0.25));
}

TEST_CASE("symmetry_reduce wraps plate orientation by pi") {
    const auto r = symmetry_reduce(kHalfPi + 0.1, 0.0);
    CHECK(r.beta == Catch::Approx(-kHalfPi + 0.1));
    CHECK(r.sign_x == 1.0);
}

TEST_CASE("symmetry_reduce is idempotent on its own output") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ang(-10.0, 10.0);
    for (int i = 0; i < 2000; ++i) {
        const auto r1 = symmetry_reduce(ang(rng), ang(rng));
        const auto r2 = symmetry_reduce(r1.beta, r1.gamma);
        REQUIRE(r2.beta == Catch::Approx(r1.beta).margin(1e-15));
        REQUIRE(r2.gamma == Catch::Approx(r1.gamma).margin(1e-15));
        REQUIRE(r2.sign_x == 1.0);
        REQUIRE(r1.beta > -kHalfPi - 1e-15);
        REQUIRE(r1.beta <= kHalfPi + 1e-15);
        REQUIRE(std::abs(r1.gamma) <= kHalfPi + 1e-15);
    }
}

TEST_CASE("test_map matches its closed forms") {
    const StressMap m = test_map(2e5);
    SECTION("straight-down motion is opposed straight up") {
        const Stress s = query(m, 0.0, -kHalfPi);
        CHECK(s.alpha_x == Catch::Approx(0.0).margin(1e-6));
        CHECK(s.alpha_z == Catch::Approx(2e5));
    }
    SECTION("pure horizontal motion is opposed horizontally at any beta") {
        for (double beta : {-1.2, -0.4, 0.0, 0.7, 1.5}) {
            const Stress s = query(m, beta, 0.0);
            CHECK(s.alpha_x == Catch::Approx(-2e5));
            CHECK(s.alpha_z == Catch::Approx(0.0).margin(1e-6));
        }
    }
    SECTION("stress opposes the motion direction over the whole grid") {
        for (double b : m.beta_grid)
            for (double g : m.gamma_grid) {
                const Stress s = query(m, b, g);
                const double dot = s.alpha_x * std::cos(g) + s.alpha_z * std::sin(g);
                REQUIRE(dot <= 1e-9);
            }
    }
    SECTION("rejects a <= 0") {
        CHECK_THROWS(test_map(0.0));
        CHECK_THROWS(test_map(-1.0));
    }
}

TEST_CASE("query returns stored node values exactly, scaled by zeta") {
    StressMap m = test_map(3.7e4);
    m.zeta = 5.0;
    for (std::size_t ib = 0; ib < m.rows(); ib += 3) {
        for (std::size_t ig = 0; ig < m.cols(); ig += 3) {
            const Stress s = query(m, m.beta_grid[ib], m.gamma_grid[ig]);
            REQUIRE(s.alpha_x == m.ax(ib, ig) * 5.0);
            REQUIRE(s.alpha_z == m.az(ib, ig) * 5.0);
        }
    }
}

TEST_CASE("query is positively homogeneous in zeta, exactly") {
    StressMap m1 = test_map(2e5);
    StressMap m5 = m1;
    m5.zeta = 5.0;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ang(-kHalfPi, kHalfPi);
    for (int i = 0; i < 500; ++i) {
        const double b = ang(rng), g = ang(rng);
        const Stress s1 = query(m1, b, g);
        const Stress s5 = query(m5, b, g);
        REQUIRE(s5.alpha_x == 5.0 * s1.alpha_x);
        REQUIRE(s5.alpha_z == 5.0 * s1.alpha_z);
    }
}

TEST_CASE("query at a cell midpoint averages the four surrounding nodes") {
    const StressMap m = generic_stress_map();
    for (std::size_t ib : {std::size_t{0}, std::size_t{4}, std::size_t{12}}) {
        for (std::size_t ig : {std::size_t{2}, std::size_t{9}, std::size_t{16}}) {
            const double b = 0.5 * (m.beta_grid[ib] + m.beta_grid[ib + 1]);
            const double g = 0.5 * (m.gamma_grid[ig] + m.gamma_grid[ig + 1]);
            const double mean_x = 0.25 * (m.ax(ib, ig) + m.ax(ib, ig + 1) + m.ax(ib + 1, ig) +
                                          m.ax(ib + 1, ig + 1));
            const double mean_z = 0.25 * (m.az(ib, ig) + m.az(ib, ig + 1) + m.az(ib + 1, ig) +
                                          m.az(ib + 1, ig + 1));
            const Stress s = query_unscaled(m, b, g);
            // no_tension may clamp alpha_z for gamma > 0; compare the raw bilinear.
            if (!(m.no_tension && g > 0.0 && mean_z < 0.0))
                REQUIRE(s.alpha_z == Catch::Approx(mean_z).margin(1e-9));
            REQUIRE(s.alpha_x == Catch::Approx(mean_x).margin(1e-9));
        }
    }
}

TEST_CASE("query is continuous across cell boundaries") {
    const StressMap m = test_map(2e5);
    const double d = 1e-9;
    for (std::size_t ib = 1; ib + 1 < m.rows(); ib += 2) {
        const double edge = m.beta_grid[ib];
        const Stress lo = query(m, edge - d, 0.3);
        const Stress hi = query(m, edge + d, 0.3);
        REQUIRE(std::abs(hi.alpha_x - lo.alpha_x) <= 1e-3);
        REQUIRE(std::abs(hi.alpha_z - lo.alpha_z) <= 1e-3);
    }
    for (std::size_t ig = 1; ig + 1 < m.cols(); ig += 2) {
        const double edge = m.gamma_grid[ig];
        const Stress lo = query(m, -0.2, edge - d);
        const Stress hi = query(m, -0.2, edge + d);
        REQUIRE(std::abs(hi.alpha_x - lo.alpha_x) <= 1e-3);
        REQUIRE(std::abs(hi.alpha_z - lo.alpha_z) <= 1e-3);
    }
}

TEST_CASE("map CSV round trip") {
    const StressMap m = generic_stress_map();
    std::istringstream in(render(m));
    const StressMap r = load_stress_map(in);
    REQUIRE(r.rows() == 19);
    REQUIRE(r.cols() == 19);
    REQUIRE(r.no_tension == m.no_tension);
    REQUIRE(r.name == "generic");
    REQUIRE(r.zeta == 1.0);
    for (std::size_t i = 0; i < m.alpha_x.size(); ++i) {
        REQUIRE(r.alpha_x[i] == m.alpha_x[i]);
        REQUIRE(r.alpha_z[i] == m.alpha_z[i]);
    }
    for (std::size_t i = 0; i < m.rows(); ++i)
        REQUIRE(r.beta_grid[i] == Catch::Approx(m.beta_grid[i]).margin(1e-12));
}

TEST_CASE("loader rejects malformed input with located errors") {
    const StressMap m = test_map(1e5, 5);
    const std::string good = render(m);

    SECTION("missing one row is a ragged grid") {
        std::string txt = good;
        txt.erase(txt.rfind('\n', txt.size() - 2) + 1);  // drop last data row
        std::istringstream in(txt);
        CHECK_THROWS_MATCHES(load_stress_map(in), StressMapParseError,
                             Catch::Matchers::MessageMatches(ContainsSubstring("ragged grid")));
    }
    SECTION("angle outside the domain") {
        std::string txt = good;
        txt += "114.59155902616465,0,1,1\n";  // beta = 2 rad
        std::istringstream in(txt);
        CHECK_THROWS_MATCHES(
            load_stress_map(in), StressMapParseError,
            Catch::Matchers::MessageMatches(ContainsSubstring("angle out of [-pi/2, pi/2]")));
    }
    SECTION("malformed header") {
        std::istringstream in("beta,gamma,ax,az\n0,0,1,1\n");
        CHECK_THROWS_MATCHES(load_stress_map(in), StressMapParseError,
                             Catch::Matchers::MessageMatches(ContainsSubstring("header")));
    }
    SECTION("non-finite value") {
        std::string txt = "beta_deg,gamma_deg,alpha_x,alpha_z\n-90,-90,inf,1\n";
        std::istringstream in(txt);
        CHECK_THROWS_MATCHES(load_stress_map(in), StressMapParseError,
                             Catch::Matchers::MessageMatches(ContainsSubstring("line 2")));
    }
    SECTION("non-uniform grid") {
        std::string txt = "beta_deg,gamma_deg,alpha_x,alpha_z\n";
        for (double b : {-90.0, -40.0, 90.0})  // uneven beta spacing
            for (double g : {-90.0, 0.0, 90.0})
                txt += std::to_string(b) + "," + std::to_string(g) + ",1,1\n";
        std::istringstream in(txt);
        CHECK_THROWS_MATCHES(load_stress_map(in), StressMapParseError,
                             Catch::Matchers::MessageMatches(ContainsSubstring("non-uniform")));
    }
    SECTION("field count") {
        std::string txt = "beta_deg,gamma_deg,alpha_x,alpha_z\n-90,-90,1\n";
        std::istringstream in(txt);
        CHECK_THROWS_MATCHES(load_stress_map(in), StressMapParseError,
                             Catch::Matchers::MessageMatches(ContainsSubstring("4 fields")));
    }
}

TEST_CASE("no-tension flag zeroes tensile support for upward motion") {
    StressMap m = test_map(1e5);
    // Raw analytic map pulls down on an upward-moving plate.
    REQUIRE(query(m, 0.0, kHalfPi).alpha_z == Catch::Approx(-1e5));
    m.no_tension = true;
    CHECK(query(m, 0.0, kHalfPi).alpha_z == 0.0);
    CHECK(query(m, 0.0, 0.3).alpha_z == 0.0);
    // Downward motion is unaffected.
    CHECK(query(m, 0.0, -kHalfPi).alpha_z == Catch::Approx(1e5));
    // Horizontal stays untouched.
    CHECK(query(m, 0.0, kHalfPi).alpha_x == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("generic map is physically sane") {
    const StressMap m = generic_stress_map();
    // Normalized vertical penetration stress at (0, straight down) = 1 N/cm^3.
    CHECK(query(m, 0.0, -kHalfPi).alpha_z == Catch::Approx(1e6).epsilon(1e-9));
    // Drag-induced lift: a flat plate dragged horizontally is pushed up.
    CHECK(query(m, 0.0, 0.0).alpha_z > 0.0);
    // Horizontal drag opposes rightward motion.
    CHECK(query(m, 0.0, 0.0).alpha_x < 0.0);
    // Passivity: the medium never pumps energy into the foot. Strict on the
    // intrusion side; the extraction side is extrapolated by the published
    // intrusion fit and the clamp leaves a sub-0.3% residual there.
    for (double b : m.beta_grid)
        for (double g : m.gamma_grid) {
            const Stress s = query(m, b, g);
            const double dot = s.alpha_x * std::cos(g) + s.alpha_z * std::sin(g);
            REQUIRE(dot <= (g <= 0.0 ? 1e-6 : 3e-3 * 1e6));
        }
}
