#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sandwalk/geometry.hpp"

namespace sandwalk {

struct StressMapParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Local granular stress lookup: alpha_x(beta, gamma) and alpha_z(beta, gamma)
/// in N/m^3 (force per unit depth per unit plate area), tabulated on a uniform
/// grid over [-pi/2, pi/2] x [-pi/2, pi/2]. `zeta` is the dimensionless
/// material hardness factor applied on query.
struct StressMap {
    std::vector<double> beta_grid;    // radians, ascending, uniform
    std::vector<double> gamma_grid;   // radians, ascending, uniform
    std::vector<double> alpha_x;      // row-major: [ib * gamma_grid.size() + ig]
    std::vector<double> alpha_z;
    double zeta = 1.0;
    bool no_tension = false;          // clamp alpha_z >= 0 for upward motion
    std::string name;

    std::size_t rows() const { return beta_grid.size(); }
    std::size_t cols() const { return gamma_grid.size(); }
    double ax(std::size_t ib, std::size_t ig) const { return alpha_x[ib * cols() + ig]; }
    double az(std::size_t ib, std::size_t ig) const { return alpha_z[ib * cols() + ig]; }
};

/// Signed local stresses returned by a map query, N/m^3.
struct Stress {
    double alpha_x = 0.0;
    double alpha_z = 0.0;
};

struct ReducedAngles {
    double beta;     // in (-pi/2, pi/2]
    double gamma;    // in [-pi/2, pi/2]
    double sign_x;   // +-1, applied to alpha_x for mirrored (leftward) motion
};

/// Map arbitrary (beta, gamma) onto the principal lookup domain. Plate
/// orientation is pi-periodic; leftward motion (|gamma| > pi/2) mirrors onto
/// rightward motion about the vertical plane, flipping beta and the sign of
/// the horizontal stress while alpha_z is symmetric.
inline ReducedAngles symmetry_reduce(double beta, double gamma) {
    double b = wrap_orientation(beta);
    double g = wrap_pi(gamma);
    if (g > kHalfPi) {
        return {wrap_orientation(-b), kPi - g, -1.0};
    }
    if (g < -kHalfPi) {
        return {wrap_orientation(-b), -kPi - g, -1.0};
    }
    return {b, g, 1.0};
}

namespace detail {

// Fractional grid coordinate with node snapping: queries within 1e-9 rad of a
// node return the stored node value exactly.
inline double grid_coord(const std::vector<double>& grid, double angle) {
    const double lo = grid.front();
    const double step = (grid.back() - lo) / static_cast<double>(grid.size() - 1);
    double u = (angle - lo) / step;
    const double r = std::round(u);
    if (std::abs(angle - (lo + r * step)) < 1e-9) u = r;
    return std::clamp(u, 0.0, static_cast<double>(grid.size() - 1));
}

inline double bilinear(const std::vector<double>& table, std::size_t cols,
                       double ub, double ug, std::size_t nb, std::size_t ng) {
    const std::size_t ib = std::min(static_cast<std::size_t>(ub), nb - 2);
    const std::size_t ig = std::min(static_cast<std::size_t>(ug), ng - 2);
    const double fb = ub - static_cast<double>(ib);
    const double fg = ug - static_cast<double>(ig);
    const double v00 = table[ib * cols + ig];
    const double v01 = table[ib * cols + ig + 1];
    const double v10 = table[(ib + 1) * cols + ig];
    const double v11 = table[(ib + 1) * cols + ig + 1];
    return (1.0 - fb) * ((1.0 - fg) * v00 + fg * v01) +
           fb * ((1.0 - fg) * v10 + fg * v11);
}

}  // namespace detail

/// Query without the material factor: symmetry reduction, bilinear
/// interpolation and the no-tension clamp, but no zeta scaling.
inline Stress query_unscaled(const StressMap& map, double beta, double gamma) {
    const ReducedAngles r = symmetry_reduce(beta, gamma);
    const double ub = detail::grid_coord(map.beta_grid, r.beta);
    const double ug = detail::grid_coord(map.gamma_grid, r.gamma);
    const std::size_t nb = map.rows(), ng = map.cols();
    double ax = detail::bilinear(map.alpha_x, ng, ub, ug, nb, ng);
    double az = detail::bilinear(map.alpha_z, ng, ub, ug, nb, ng);
    if (map.no_tension && r.gamma > 0.0 && az < 0.0) az = 0.0;
    return {r.sign_x * ax, az};
}

/// Local stresses at (beta, gamma), scaled by map.zeta. Total function: any
/// finite angles are reduced onto the lookup domain first.
inline Stress query(const StressMap& map, double beta, double gamma) {
    Stress s = query_unscaled(map, beta, gamma);
    return {s.alpha_x * map.zeta, s.alpha_z * map.zeta};
}

namespace detail {

inline std::vector<double> uniform_angle_grid(std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = -kHalfPi + kPi * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

}  // namespace detail

/// Analytic map for closed-form tests: the stress vector exactly opposes the
/// unit motion direction, alpha_x = -a cos(gamma), alpha_z = -a sin(gamma),
/// so per-plate power is -a |z| dA |v| <= 0 by construction.
inline StressMap test_map(double a, std::size_t grid_nodes = 19) {
    if (!(a > 0.0)) throw std::invalid_argument("test_map: stress magnitude must be > 0");
    StressMap m;
    m.beta_grid = detail::uniform_angle_grid(grid_nodes);
    m.gamma_grid = detail::uniform_angle_grid(grid_nodes);
    m.alpha_x.resize(grid_nodes * grid_nodes);
    m.alpha_z.resize(grid_nodes * grid_nodes);
    for (std::size_t ib = 0; ib < grid_nodes; ++ib) {
        for (std::size_t ig = 0; ig < grid_nodes; ++ig) {
            const double g = m.gamma_grid[ig];
            m.alpha_x[ib * grid_nodes + ig] = -a * std::cos(g);
            m.alpha_z[ib * grid_nodes + ig] = -a * std::sin(g);
        }
    }
    m.name = "test";
    return m;
}

/// Generic dry-sand stress map. Evaluates the discrete Fourier fit of plate
/// intrusion stresses published for legged locomotion on granular media
/// (Li, Zhang & Goldman, Science 339:1408, 2013, supplement eq. S3 with the
/// scale-invariant "generic" coefficient set of Zhang & Goldman 2014), sampled
/// on a 19x19 grid. The generic set is normalized so vertical penetration
/// stress at (beta=0, straight down) equals one; `scale` restores physical
/// units and defaults to 1 N/cm^3 = 1e6 N/m^3, a mid-range value for dry sand.
///
/// Convention conversion: the published fit measures the intrusion angle
/// positive downward and reports stresses that resist the motion; here gamma
/// is the atan2 velocity angle with z up, so gamma_fit = -gamma and the
/// horizontal stress changes sign.
inline StressMap generic_stress_map(double scale = 1.0e6, std::size_t grid_nodes = 19) {
    constexpr double A00 = 0.206, A10 = 0.169;
    constexpr double B11 = 0.212, B01 = 0.358, Bm11 = 0.055;
    constexpr double C11 = -0.124, C01 = 0.253, Cm11 = 0.007;
    constexpr double D10 = 0.088;
    StressMap m;
    m.beta_grid = detail::uniform_angle_grid(grid_nodes);
    m.gamma_grid = detail::uniform_angle_grid(grid_nodes);
    m.alpha_x.resize(grid_nodes * grid_nodes);
    m.alpha_z.resize(grid_nodes * grid_nodes);
    for (std::size_t ib = 0; ib < grid_nodes; ++ib) {
        const double b = m.beta_grid[ib];
        for (std::size_t ig = 0; ig < grid_nodes; ++ig) {
            const double g_fit = -m.gamma_grid[ig];
            const double az = A00 + A10 * std::cos(2.0 * b) +
                              B11 * std::sin(2.0 * b + g_fit) +
                              B01 * std::sin(g_fit) +
                              Bm11 * std::sin(g_fit - 2.0 * b);
            const double ax_fit = C11 * std::cos(2.0 * b + g_fit) +
                                  C01 * std::cos(g_fit) +
                                  Cm11 * std::cos(g_fit - 2.0 * b) +
                                  D10 * std::sin(2.0 * b);
            m.alpha_x[ib * grid_nodes + ig] = -scale * ax_fit;
            m.alpha_z[ib * grid_nodes + ig] = scale * az;
        }
    }
    m.no_tension = true;
    m.name = "generic";
    return m;
}

// ---------------------------------------------------------------------------
// Map file format: UTF-8 CSV, header `beta_deg,gamma_deg,alpha_x,alpha_z`,
// one row per node in row-major beta-then-gamma order, angles in degrees,
// stresses in N/m^3. `#` starts a comment; `# no_tension=true` and
// `# name=<label>` are recognized.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

[[noreturn]] inline void parse_fail(std::size_t line_no, const std::string& what) {
    throw StressMapParseError("stress map line " + std::to_string(line_no) + ": " + what);
}

inline double parse_finite(const std::string& s, std::size_t line_no, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) parse_fail(line_no, std::string("bad number for ") + what + ": '" + s + "'");
        if (!std::isfinite(v)) parse_fail(line_no, std::string("non-finite value for ") + what);
        return v;
    } catch (const StressMapParseError&) {
        throw;
    } catch (const std::exception&) {
        parse_fail(line_no, std::string("bad number for ") + what + ": '" + s + "'");
    }
}

inline void check_uniform_span(const std::vector<double>& grid, const char* axis) {
    if (grid.size() < 2) throw StressMapParseError(std::string("stress map: ") + axis + " grid needs >= 2 nodes");
    if (std::abs(grid.front() + kHalfPi) > 1e-9 || std::abs(grid.back() - kHalfPi) > 1e-9)
        throw StressMapParseError(std::string("stress map: ") + axis + " grid must span [-pi/2, pi/2]");
    const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double d = grid[i] - grid[i - 1];
        if (d <= 0.0) throw StressMapParseError(std::string("stress map: ") + axis + " grid not ascending");
        if (std::abs(d - step) > 1e-9) throw StressMapParseError(std::string("stress map: non-uniform ") + axis + " grid");
    }
}

}  // namespace detail

inline StressMap load_stress_map(std::istream& in) {
    StressMap m;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<double> betas, gammas_first, gammas_cur;
    std::size_t row_count = 0;

    auto close_beta_block = [&](std::size_t at_line) {
        if (betas.size() == 1) {
            gammas_first = gammas_cur;
        } else if (gammas_cur != gammas_first) {
            detail::parse_fail(at_line, "ragged grid (inconsistent gamma rows across beta blocks)");
        }
        gammas_cur.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string body = detail::trim(t.substr(1));
            if (body == "no_tension=true") m.no_tension = true;
            else if (body.rfind("name=", 0) == 0) m.name = detail::trim(body.substr(5));
            continue;
        }
        if (!header_seen) {
            const auto fields = detail::split_csv(t);
            if (fields != std::vector<std::string>{"beta_deg", "gamma_deg", "alpha_x", "alpha_z"})
                detail::parse_fail(line_no, "malformed header, expected 'beta_deg,gamma_deg,alpha_x,alpha_z'");
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_csv(t);
        if (fields.size() != 4) detail::parse_fail(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
        const double beta_deg = detail::parse_finite(fields[0], line_no, "beta_deg");
        const double gamma_deg = detail::parse_finite(fields[1], line_no, "gamma_deg");
        if (std::abs(beta_deg) > 90.0 + 1e-9 || std::abs(gamma_deg) > 90.0 + 1e-9)
            detail::parse_fail(line_no, "angle out of [-pi/2, pi/2]");
        const double beta = beta_deg * kPi / 180.0;
        const double gamma = gamma_deg * kPi / 180.0;
        if (betas.empty() || std::abs(beta - betas.back()) > 1e-12) {
            if (!betas.empty()) close_beta_block(line_no);
            betas.push_back(beta);
        }
        gammas_cur.push_back(gamma);
        m.alpha_x.push_back(detail::parse_finite(fields[2], line_no, "alpha_x"));
        m.alpha_z.push_back(detail::parse_finite(fields[3], line_no, "alpha_z"));
        ++row_count;
    }
    if (!header_seen) throw StressMapParseError("stress map: empty input (missing header)");
    if (betas.empty()) throw StressMapParseError("stress map: no data rows");
    close_beta_block(line_no);

    if (row_count != betas.size() * gammas_first.size())
        throw StressMapParseError("stress map: ragged grid (row count " + std::to_string(row_count) +
                                  " != " + std::to_string(betas.size()) + " x " +
                                  std::to_string(gammas_first.size()) + ")");
    detail::check_uniform_span(betas, "beta");
    detail::check_uniform_span(gammas_first, "gamma");

    m.beta_grid = std::move(betas);
    m.gamma_grid = std::move(gammas_first);
    m.zeta = 1.0;
    return m;
}

inline void write_stress_map(std::ostream& out, const StressMap& map) {
    char buf[128];
    if (!map.name.empty()) out << "# name=" << map.name << "\n";
    if (map.no_tension) out << "# no_tension=true\n";
    out << "beta_deg,gamma_deg,alpha_x,alpha_z\n";
    for (std::size_t ib = 0; ib < map.rows(); ++ib) {
        for (std::size_t ig = 0; ig < map.cols(); ++ig) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n",
                          map.beta_grid[ib] * 180.0 / kPi,
                          map.gamma_grid[ig] * 180.0 / kPi,
                          map.ax(ib, ig), map.az(ib, ig));
            out << buf;
        }
    }
}

}  // namespace sandwalk
