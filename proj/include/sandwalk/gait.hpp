#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sandwalk/geometry.hpp"
#include "sandwalk/stress_map.hpp"  // detail::trim / split_csv

namespace sandwalk {

struct GaitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Default leg segment lengths, m (thigh, shank).
inline constexpr double kThighLength = 0.47;
inline constexpr double kShankLength = 0.45;

/// Position + velocity of one ankle relative to the hip, body frame.
struct AnkleSample {
    Vec2 pos;
    Vec2 vel;
};

/// Time series of left/right ankle positions (and velocities) relative to the
/// hip. Velocities double as Hermite slopes for interpolation; when a loaded
/// file omits them they are filled by central differences and slope-limited
/// to keep the interpolant monotone between samples.
struct GaitProfile {
    std::vector<double> time;                  // strictly increasing, s
    std::vector<Vec2> left_pos, right_pos;     // m, relative to hip
    std::vector<Vec2> left_vel, right_vel;     // m/s
    std::vector<double> step_events;           // stance-switch times, s
    bool loopable = false;
    bool velocities_given = false;

    std::size_t size() const { return time.size(); }
    double t_begin() const { return time.front(); }
    double t_end() const { return time.back(); }
    double duration() const { return time.back() - time.front(); }
};

namespace detail {

inline double hermite(double p0, double m0, double p1, double m1, double h, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * h * m0 +
           (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * h * m1;
}

inline double hermite_deriv(double p0, double m0, double p1, double m1, double h, double t) {
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * h * m0 +
            (-6 * t2 + 6 * t) * p1 + (3 * t2 - 2 * t) * h * m1) / h;
}

/// Central-difference slopes with one-sided ends, then Fritsch-Carlson
/// limiting so the cubic never overshoots the data.
inline std::vector<double> monotone_slopes(const std::vector<double>& t,
                                           const std::vector<double>& y) {
    const std::size_t n = t.size();
    std::vector<double> m(n, 0.0);
    if (n == 1) return m;
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) m[i] = 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = 0.0;
            m[i + 1] = 0.0;
        } else {
            const double a = m[i] / d[i], b = m[i + 1] / d[i];
            if (a < 0.0) m[i] = 0.0;
            if (b < 0.0) m[i + 1] = 0.0;
            const double s = std::hypot(a, b);
            if (s > 3.0) {
                m[i] = 3.0 * (m[i] / s);
                m[i + 1] = 3.0 * (m[i + 1] / s);
            }
        }
    }
    return m;
}

}  // namespace detail

/// Fill absent velocities from positions (per component) and mark the profile
/// ready for sampling.
inline void fill_velocities(GaitProfile& g) {
    auto fill = [&](const std::vector<Vec2>& pos, std::vector<Vec2>& vel) {
        std::vector<double> x(g.size()), z(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) { x[i] = pos[i].x; z[i] = pos[i].z; }
        const auto mx = detail::monotone_slopes(g.time, x);
        const auto mz = detail::monotone_slopes(g.time, z);
        vel.resize(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) vel[i] = {mx[i], mz[i]};
    };
    fill(g.left_pos, g.left_vel);
    fill(g.right_pos, g.right_vel);
}

/// Sample both ankles at time t by cubic Hermite interpolation; velocities
/// are the interpolant's derivative, so they are consistent with positions.
/// Loopable profiles wrap t by the profile period.
inline std::pair<AnkleSample, AnkleSample> sample(const GaitProfile& g, double t) {
    if (g.size() < 2) throw GaitError("gait profile has fewer than 2 samples");
    double tq = t;
    if (tq < g.t_begin() - 1e-12 || tq > g.t_end() + 1e-12) {
        if (!g.loopable)
            throw GaitError("gait sample time " + std::to_string(t) + " outside profile range");
        const double period = g.duration();
        tq = g.t_begin() + std::fmod(tq - g.t_begin(), period);
        if (tq < g.t_begin()) tq += period;
    }
    tq = std::clamp(tq, g.t_begin(), g.t_end());
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(g.time.begin(), g.time.end(), tq) - g.time.begin());
    i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;
    const double h = g.time[i + 1] - g.time[i];
    const double s = (tq - g.time[i]) / h;
    auto eval = [&](const std::vector<Vec2>& p, const std::vector<Vec2>& v) -> AnkleSample {
        AnkleSample out;
        out.pos.x = detail::hermite(p[i].x, v[i].x, p[i + 1].x, v[i + 1].x, h, s);
        out.pos.z = detail::hermite(p[i].z, v[i].z, p[i + 1].z, v[i + 1].z, h, s);
        out.vel.x = detail::hermite_deriv(p[i].x, v[i].x, p[i + 1].x, v[i + 1].x, h, s);
        out.vel.z = detail::hermite_deriv(p[i].z, v[i].z, p[i + 1].z, v[i + 1].z, h, s);
        return out;
    };
    return {eval(g.left_pos, g.left_vel), eval(g.right_pos, g.right_vel)};
}

// ---------------------------------------------------------------------------
// Leg kinematics. theta1 is the hip angle from the downward vertical
// (positive swings the leg forward), theta2 the knee angle in the same
// rotational sense (knee flexion is negative with the knee-forward branch).
// The ankle frame angle follows theta_A = pi/2 - (theta1 + theta2); the foot
// is level when the shank is vertical, i.e. at foot pitch theta_A - pi/2.
// ---------------------------------------------------------------------------

struct LegState {
    double theta1 = 0.0, theta2 = 0.0;   // rad
    double omega1 = 0.0, omega2 = 0.0;   // rad/s
};

inline Vec2 forward_kinematics(double theta1, double theta2, double l1, double l2) {
    const double t12 = theta1 + theta2;
    return {l1 * std::sin(theta1) + l2 * std::sin(t12),
            -l1 * std::cos(theta1) - l2 * std::cos(t12)};
}

/// Law-of-cosines inverse kinematics, knee-forward branch. Throws GaitError
/// for targets outside the reachable annulus |l1-l2| <= d <= l1+l2.
inline std::pair<double, double> inverse_kinematics(const Vec2& ankle_rel, double l1, double l2) {
    const double d = ankle_rel.norm();
    const double slack = 1e-9;
    if (d > l1 + l2 + slack || d < std::abs(l1 - l2) - slack)
        throw GaitError("ankle target out of reach (d=" + std::to_string(d) + " m)");
    const double cos_knee = std::clamp((l1 * l1 + l2 * l2 - d * d) / (2.0 * l1 * l2), -1.0, 1.0);
    const double knee_interior = std::acos(cos_knee);
    const double theta2 = -(kPi - knee_interior);
    const double cos_psi = std::clamp((l1 * l1 + d * d - l2 * l2) / (2.0 * l1 * d), -1.0, 1.0);
    const double phi = std::atan2(ankle_rel.x, -ankle_rel.z);
    const double theta1 = phi + std::acos(cos_psi);
    return {theta1, theta2};
}

/// Angles plus rates for a moving ankle target. Rates come from the leg
/// Jacobian; near the straight-leg singularity (sin theta2 ~ 0) they fall
/// back to central differencing of the IK solution along the velocity.
inline LegState leg_state(const Vec2& ankle_rel, const Vec2& ankle_vel, double l1, double l2) {
    LegState st;
    const auto [t1, t2] = inverse_kinematics(ankle_rel, l1, l2);
    st.theta1 = t1;
    st.theta2 = t2;
    const double s2 = std::sin(t2);
    if (std::abs(s2) > 1e-4) {
        const double c1 = std::cos(t1), s1 = std::sin(t1);
        const double c12 = std::cos(t1 + t2), s12 = std::sin(t1 + t2);
        st.omega1 = (ankle_vel.x * s12 - ankle_vel.z * c12) / (l1 * s2);
        const double w12 = (c1 * ankle_vel.z - s1 * ankle_vel.x) / (l2 * s2);
        st.omega2 = w12 - st.omega1;
    } else {
        const double h = 1e-6;
        auto clamp_reach = [&](Vec2 p) {
            const double d = p.norm();
            const double dmax = (l1 + l2) * (1.0 - 1e-12);
            if (d > dmax && d > 0.0) p = p * (dmax / d);
            return p;
        };
        const auto [a1, a2] = inverse_kinematics(clamp_reach(ankle_rel - ankle_vel * h), l1, l2);
        const auto [b1, b2] = inverse_kinematics(clamp_reach(ankle_rel + ankle_vel * h), l1, l2);
        st.omega1 = (b1 - a1) / (2.0 * h);
        st.omega2 = (b2 - a2) / (2.0 * h);
    }
    return st;
}

/// Ankle frame angle and rate: theta_A = pi/2 - (theta1 + theta2),
/// omega_A = omega1 + omega2.
inline std::pair<double, double> ankle_frame(const LegState& st) {
    return {kHalfPi - (st.theta1 + st.theta2), st.omega1 + st.omega2};
}

/// Rotation angle of the foot frame relative to level ground.
inline double foot_pitch(double theta_A) { return theta_A - kHalfPi; }

// ---------------------------------------------------------------------------
// Synthetic gait
// ---------------------------------------------------------------------------

/// Alternating-leg walking profile relative to the hip. The stance ankle
/// translates backward at step_length/step_period with constant height
/// -hip_height; the swing ankle follows a C1 arc (cubic in x, sin^2 lift in
/// z) whose end slopes match the stance rate. The left leg is in stance
/// first; one step event is recorded at each swing touch-down.
inline GaitProfile synth_gait(double step_length, double step_period, double lift_height,
                              int n_steps, double hip_height,
                              double max_reach = kThighLength + kShankLength) {
    if (!(step_length > 0.0) || !(step_period > 0.0) || lift_height < 0.0 || n_steps < 1 ||
        !(hip_height > 0.0))
        throw GaitError("synth_gait: parameters must be positive");
    const double L = step_length, T = step_period;
    const int per_step = 200;
    const std::size_t total = static_cast<std::size_t>(n_steps) * per_step;

    auto stance = [&](double s) -> AnkleSample {
        return {{L * (0.5 - s), -hip_height}, {-L / T, 0.0}};
    };
    auto swing = [&](double s) -> AnkleSample {
        const double sigma = ((-4.0 * s + 6.0) * s - 1.0) * s;
        const double dsigma = (-12.0 * s + 12.0) * s - 1.0;
        return {{L * (sigma - 0.5), -hip_height + lift_height * std::pow(std::sin(kPi * s), 2)},
                {L * dsigma / T, lift_height * kPi * std::sin(2.0 * kPi * s) / T}};
    };

    GaitProfile g;
    g.velocities_given = true;
    g.time.reserve(total + 1);
    for (std::size_t j = 0; j <= total; ++j) {
        const double t = T * static_cast<double>(j) / per_step;
        int phase = static_cast<int>(j / per_step);
        double s = static_cast<double>(j % per_step) / per_step;
        if (j == total) { phase = n_steps - 1; s = 1.0; }
        const bool left_stance = (phase % 2 == 0);
        const AnkleSample st = stance(s), sw = swing(s);
        g.time.push_back(t);
        g.left_pos.push_back(left_stance ? st.pos : sw.pos);
        g.left_vel.push_back(left_stance ? st.vel : sw.vel);
        g.right_pos.push_back(left_stance ? sw.pos : st.pos);
        g.right_vel.push_back(left_stance ? sw.vel : st.vel);
    }
    for (int k = 1; k <= n_steps; ++k) g.step_events.push_back(T * k);

    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.left_pos[i].norm() > max_reach || g.right_pos[i].norm() > max_reach)
            throw GaitError("synth_gait: unreachable parameter combination (ankle distance exceeds leg length)");
    }
    return g;
}

// ---------------------------------------------------------------------------
// Gait CSV: header `t,lx,lz,rx,rz[,lvx,lvz,rvx,rvz]`, SI units, comment lines
// `# step_event=<t>` and `# loop=true`.
// ---------------------------------------------------------------------------

inline GaitProfile load_gait(std::istream& in, double max_reach = kThighLength + kShankLength) {
    GaitProfile g;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool with_vel = false;
    auto fail = [&](const std::string& what) -> void {
        throw GaitError("gait line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string body = detail::trim(t.substr(1));
            if (body == "loop=true") g.loopable = true;
            else if (body.rfind("step_event=", 0) == 0) {
                try {
                    g.step_events.push_back(std::stod(body.substr(11)));
                } catch (const std::exception&) {
                    fail("bad step_event value");
                }
            }
            continue;
        }
        const auto fields = detail::split_csv(t);
        if (!header_seen) {
            if (fields.size() == 5 &&
                fields == std::vector<std::string>{"t", "lx", "lz", "rx", "rz"}) {
                with_vel = false;
            } else if (fields.size() == 9 &&
                       fields == std::vector<std::string>{"t", "lx", "lz", "rx", "rz", "lvx",
                                                          "lvz", "rvx", "rvz"}) {
                with_vel = true;
            } else {
                fail("malformed header, expected 't,lx,lz,rx,rz[,lvx,lvz,rvx,rvz]'");
            }
            header_seen = true;
            continue;
        }
        const std::size_t want = with_vel ? 9 : 5;
        if (fields.size() != want)
            fail("ragged row: expected " + std::to_string(want) + " fields, got " +
                 std::to_string(fields.size()));
        std::vector<double> vals(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            try {
                vals[i] = std::stod(fields[i]);
            } catch (const std::exception&) {
                fail("bad number '" + fields[i] + "'");
            }
            if (!std::isfinite(vals[i])) fail("non-finite value");
        }
        if (!g.time.empty() && vals[0] <= g.time.back()) fail("time not strictly increasing");
        g.time.push_back(vals[0]);
        g.left_pos.push_back({vals[1], vals[2]});
        g.right_pos.push_back({vals[3], vals[4]});
        if (with_vel) {
            g.left_vel.push_back({vals[5], vals[6]});
            g.right_vel.push_back({vals[7], vals[8]});
        }
        if (g.left_pos.back().norm() > max_reach || g.right_pos.back().norm() > max_reach)
            fail("ankle sample out of reach (> l1+l2)");
    }
    if (!header_seen) throw GaitError("gait: empty input (missing header)");
    if (g.size() < 2) throw GaitError("gait: need at least 2 samples");
    for (double te : g.step_events)
        if (te < g.t_begin() - 1e-9 || te > g.t_end() + 1e-9)
            throw GaitError("gait: step event outside time range");
    g.velocities_given = with_vel;
    if (!with_vel) fill_velocities(g);
    return g;
}

inline void write_gait(std::ostream& out, const GaitProfile& g) {
    char buf[256];
    if (g.loopable) out << "# loop=true\n";
    for (double te : g.step_events) {
        std::snprintf(buf, sizeof(buf), "# step_event=%.17g\n", te);
        out << buf;
    }
    out << "t,lx,lz,rx,rz,lvx,lvz,rvx,rvz\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      g.time[i], g.left_pos[i].x, g.left_pos[i].z, g.right_pos[i].x,
                      g.right_pos[i].z, g.left_vel[i].x, g.left_vel[i].z, g.right_vel[i].x,
                      g.right_vel[i].z);
        out << buf;
    }
}

}  // namespace sandwalk
