#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sandwalk/foot_contour.hpp"
#include "sandwalk/gait.hpp"
#include "sandwalk/geometry.hpp"
#include "sandwalk/stress_map.hpp"

namespace sandwalk {

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plate speeds below this are treated as "not moving": the motion direction
/// is taken from the plate's previous-step value instead of atan2 on noise.
inline constexpr double kSlowMotionSpeed = 1e-6;  // m/s

/// Floor for the negative-reward product in the cost ratio.
inline constexpr double kRewardFloor = 1e-9;

struct WalkerParams {
    double mass = 60.0;               // kg
    double l1 = kThighLength;         // m
    double l2 = kShankLength;         // m
    double gravity = 9.81;            // m/s^2
    double dt = 1e-4;                 // s
    double t_f = 1.8;                 // s
    double foot_width = 0.08;         // m, out-of-plane
    std::size_t plate_count = 100;    // N
    double settle_time = 0.5;         // s
    double log_stride = 1e-3;         // s

    void validate() const {
        if (!(mass > 0) || !(l1 > 0) || !(l2 > 0) || !(gravity >= 0) || !(dt > 0) ||
            !(t_f >= 0) || !(foot_width > 0) || plate_count < 1 || !(settle_time >= 0) ||
            !(log_stride > 0))
            throw std::invalid_argument("WalkerParams: all parameters must be positive");
        if (dt > 1e-3 + 1e-15)
            throw std::invalid_argument("WalkerParams: dt must be <= 1e-3 s (depth-proportional "
                                        "contact stiffness destabilizes larger explicit steps)");
        if (log_stride < dt) throw std::invalid_argument("WalkerParams: log_stride must be >= dt");
    }
};

struct SimState {
    Vec2 r{0.0, 0.0};   // COM position, m
    Vec2 v{0.0, 0.0};   // COM velocity, m/s
    double t = 0.0;     // s
    double w_left = 0.0, w_right = 0.0;  // cumulative work by resistive forces, J
    std::vector<double> gamma_mem_left, gamma_mem_right;  // per-plate motion-direction memory
};

/// Per-plate RFT forces for a world-frame plate set: f = alpha(beta, gamma)
/// * |z| * dC * width for submerged plate centers, zero above the surface.
/// The material factor is applied as the final multiply so forces are exactly
/// homogeneous in zeta. `gamma_memory` holds each plate's last motion
/// direction and is updated for plates moving faster than kSlowMotionSpeed.
inline std::vector<Vec2> plate_forces(const PlateSet& plates, const StressMap& map,
                                      double foot_width, std::vector<double>& gamma_memory) {
    const std::size_t n = plates.plates.size();
    if (gamma_memory.size() != n) gamma_memory.assign(n, -kHalfPi);
    std::vector<Vec2> forces(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Plate& p = plates.plates[i];
        const double speed = p.velocity.norm();
        if (speed >= kSlowMotionSpeed)
            gamma_memory[i] = std::atan2(p.velocity.z, p.velocity.x);
        if (p.center.z >= 0.0) continue;
        const Stress s = query_unscaled(map, p.beta, gamma_memory[i]);
        const double geom = -p.center.z * p.arc_len * foot_width;  // |z| dC w
        forces[i] = {(s.alpha_x * geom) * map.zeta, (s.alpha_z * geom) * map.zeta};
    }
    return forces;
}

/// Componentwise ground reaction force total, summed left foot then right in
/// plate-index order (fixed order keeps runs bit-deterministic).
inline Vec2 total_grf(const std::vector<Vec2>& left, const std::vector<Vec2>& right) {
    Vec2 f;
    for (const Vec2& v : left) f += v;
    for (const Vec2& v : right) f += v;
    return f;
}

/// Foot geometry prepared for simulation: plates discretized once in the
/// foot frame.
struct FootModel {
    PlateSet plates;
    Vec2 ankle_offset;
    double width;
};

inline FootModel make_foot_model(const FootContour& contour, std::size_t plate_count,
                                 double width) {
    return {discretize(contour, plate_count), contour.ankle_offset, width};
}

/// Hip-relative kinematic inputs of one leg for a single step.
struct LegKinematics {
    Vec2 ankle_rel;   // ankle position relative to the COM/hip, m
    Vec2 ankle_vel;   // relative velocity, m/s
    double pitch;     // foot frame rotation vs level ground, rad
    double omega;     // rad/s
};

inline LegKinematics leg_kinematics(const AnkleSample& ankle, double l1, double l2) {
    const LegState st = leg_state(ankle.pos, ankle.vel, l1, l2);
    const auto [theta_a, omega_a] = ankle_frame(st);
    return {ankle.pos, ankle.vel, foot_pitch(theta_a), omega_a};
}

struct StepForces {
    Vec2 f_left, f_right;          // per-foot GRF, N
    double p_left = 0, p_right = 0;  // per-foot instantaneous power, W
    double support_stiffness = 0;    // d(F_z)/d(depth) of static support, N/m
};

namespace detail {

struct FootEval {
    Vec2 force;
    double power;
    double stiffness;
};

inline FootEval eval_foot(const SimState& state, const LegKinematics& kin,
                          const FootModel& foot, const StressMap& map,
                          std::vector<double>& gamma_mem, bool with_stiffness) {
    const Vec2 ankle_pos = state.r + kin.ankle_rel;
    const Vec2 ankle_vel = state.v + kin.ankle_vel;
    const PlateSet world = world_plates(foot.plates, foot.ankle_offset, ankle_pos,
                                        kin.pitch, ankle_vel, kin.omega);
    const auto forces = plate_forces(world, map, foot.width, gamma_mem);
    FootEval out{{0, 0}, 0.0, 0.0};
    for (std::size_t i = 0; i < forces.size(); ++i) {
        out.force += forces[i];
        out.power += forces[i].dot(world.plates[i].velocity);
    }
    if (with_stiffness) {
        for (const Plate& p : world.plates) {
            if (p.center.z >= 0.0) continue;
            out.stiffness += query(map, p.beta, -kHalfPi).alpha_z * p.arc_len * foot.width;
        }
    }
    return out;
}

}  // namespace detail

/// Forces and powers at the current state without advancing it.
inline StepForces probe_forces(SimState& state, const LegKinematics& left_kin,
                               const LegKinematics& right_kin, const FootModel& left,
                               const FootModel& right, const StressMap& map,
                               bool with_stiffness = false) {
    const auto fl = detail::eval_foot(state, left_kin, left, map, state.gamma_mem_left,
                                      with_stiffness);
    const auto fr = detail::eval_foot(state, right_kin, right, map, state.gamma_mem_right,
                                      with_stiffness);
    return {fl.force, fr.force, fl.power, fr.power, fl.stiffness + fr.stiffness};
}

/// Explicit forward Euler update: v(t+dt) = v(t) + a(t) dt, then
/// r(t+dt) = r(t) + v(t) dt with the pre-update velocity. `damping` is a
/// settle-phase viscous coefficient (zero during the gait).
inline void integrate(SimState& state, const StepForces& f, const WalkerParams& params,
                      bool accumulate_work, double damping = 0.0) {
    const Vec2 grf = f.f_left + f.f_right;
    const Vec2 a{(grf.x - damping * state.v.x) / params.mass,
                 (grf.z - damping * state.v.z) / params.mass - params.gravity};
    const Vec2 v_old = state.v;
    state.v += a * params.dt;
    state.r += v_old * params.dt;
    if (accumulate_work) {
        state.w_left += f.p_left * params.dt;
        state.w_right += f.p_right * params.dt;
    }
    state.t += params.dt;
    if (!std::isfinite(state.r.x) || !std::isfinite(state.r.z) || !std::isfinite(state.v.x) ||
        !std::isfinite(state.v.z))
        throw SimulationError("simulation diverged at t=" + std::to_string(state.t) + " s");
}

/// One simulation step driven by the gait profile at state.t (gait time is
/// taken relative to the profile start). Returns the forces acting during
/// the step.
inline StepForces step(SimState& state, const GaitProfile& gait, const FootModel& left,
                       const FootModel& right, const StressMap& map,
                       const WalkerParams& params) {
    const auto [ls, rs] = sample(gait, gait.t_begin() + state.t);
    const LegKinematics lk = leg_kinematics(ls, params.l1, params.l2);
    const LegKinematics rk = leg_kinematics(rs, params.l1, params.l2);
    const StepForces f = probe_forces(state, lk, rk, left, right, map);
    integrate(state, f, params, /*accumulate_work=*/true);
    return f;
}

struct TrajectorySample {
    double t = 0;
    Vec2 r, v;
    Vec2 f_left, f_right;
    double p_left = 0, p_right = 0;
    double w_left = 0, w_right = 0;
};

struct SimTrajectory {
    std::vector<TrajectorySample> samples;         // gait phase, first sample at t = 0
    std::vector<TrajectorySample> settle_samples;  // settle phase, t in [-settle_time, 0)
    std::vector<double> step_events;               // s, gait-phase clock
    double dt = 0.0;
    double log_stride = 0.0;
};

struct SimOptions {
    Vec2 initial_velocity{0.0, 0.0};
    double extra_drop = 0.0;  // extra initial COM lowering below the touch pose, m
};

/// Run a full simulation: place the COM so the lowest stance-foot vertex
/// touches z = 0, settle under frozen gait kinematics, then play the gait to
/// t_f. Work is not accumulated during settling, and the settle phase adds a
/// near-critical vertical damper (scaled from the instantaneous support
/// stiffness) so the walker relaxes to static force balance instead of
/// ringing on the depth-proportional contact force.
inline SimTrajectory simulate(const GaitProfile& gait, const FootContour& left_contour,
                              const FootContour& right_contour, const StressMap& map,
                              const WalkerParams& params, const SimOptions& opts = {}) {
    params.validate();
    if (!gait.loopable && params.t_f > gait.duration() + 1e-9)
        throw SimulationError("gait profile (" + std::to_string(gait.duration()) +
                              " s) shorter than t_f for a non-loopable profile");

    const FootModel left = make_foot_model(left_contour, params.plate_count, params.foot_width);
    const FootModel right = make_foot_model(right_contour, params.plate_count, params.foot_width);

    const auto [ls0, rs0] = sample(gait, gait.t_begin());
    const LegKinematics lk0 = leg_kinematics(ls0, params.l1, params.l2);
    const LegKinematics rk0 = leg_kinematics(rs0, params.l1, params.l2);

    // Initial placement: lowest plate vertex over both feet touches z = 0.
    auto lowest = [](const LegKinematics& kin, const FootModel& foot) {
        const PlateSet w = world_plates(foot.plates, foot.ankle_offset, kin.ankle_rel,
                                        kin.pitch, {0, 0}, 0.0);
        double m = w.plates.front().a.z;
        for (const Plate& p : w.plates) m = std::min({m, p.a.z, p.b.z});
        return m;
    };
    const double min_z = std::min(lowest(lk0, left), lowest(rk0, right));

    SimState state;
    state.r = {0.0, -min_z - opts.extra_drop};
    state.v = opts.initial_velocity;
    state.gamma_mem_left.assign(left.plates.plates.size(), -kHalfPi);
    state.gamma_mem_right.assign(right.plates.plates.size(), -kHalfPi);

    SimTrajectory traj;
    traj.dt = params.dt;
    traj.log_stride = params.log_stride;
    const long stride_k = std::max<long>(1, std::lround(params.log_stride / params.dt));

    // Settle: gait frozen at its start pose, relative velocities zero.
    const LegKinematics lk_frozen{lk0.ankle_rel, {0, 0}, lk0.pitch, 0.0};
    const LegKinematics rk_frozen{rk0.ankle_rel, {0, 0}, rk0.pitch, 0.0};
    const long n_settle = std::lround(params.settle_time / params.dt);
    for (long i = 0; i < n_settle; ++i) {
        state.t = -params.settle_time + static_cast<double>(i) * params.dt;
        const StepForces f = probe_forces(state, lk_frozen, rk_frozen, left, right, map,
                                          /*with_stiffness=*/true);
        if (i % stride_k == 0)
            traj.settle_samples.push_back({state.t, state.r, state.v, f.f_left, f.f_right,
                                           f.p_left, f.p_right, 0.0, 0.0});
        const double damping = 2.0 * std::sqrt(params.mass * std::max(f.support_stiffness, 100.0));
        integrate(state, f, params, /*accumulate_work=*/false, damping);
    }

    // Gait phase.
    state.t = 0.0;
    state.w_left = state.w_right = 0.0;
    const long n = std::lround(params.t_f / params.dt);
    StepForces f{};
    for (long i = 0; i < n; ++i) {
        state.t = static_cast<double>(i) * params.dt;
        const auto [ls, rs] = sample(gait, gait.t_begin() + state.t);
        const LegKinematics lk = leg_kinematics(ls, params.l1, params.l2);
        const LegKinematics rk = leg_kinematics(rs, params.l1, params.l2);
        f = probe_forces(state, lk, rk, left, right, map);
        if (i % stride_k == 0)
            traj.samples.push_back({state.t, state.r, state.v, f.f_left, f.f_right, f.p_left,
                                    f.p_right, state.w_left, state.w_right});
        integrate(state, f, params, /*accumulate_work=*/true);
    }
    // Terminal sample at t_f.
    state.t = static_cast<double>(n) * params.dt;
    {
        const double tq = gait.loopable ? state.t : std::min(state.t, gait.duration());
        const auto [ls, rs] = sample(gait, gait.t_begin() + tq);
        const LegKinematics lk = leg_kinematics(ls, params.l1, params.l2);
        const LegKinematics rk = leg_kinematics(rs, params.l1, params.l2);
        f = probe_forces(state, lk, rk, left, right, map);
        traj.samples.push_back({state.t, state.r, state.v, f.f_left, f.f_right, f.p_left,
                                f.p_right, state.w_left, state.w_right});
    }

    const int loops = gait.loopable
                          ? static_cast<int>(std::ceil(params.t_f / gait.duration()))
                          : 1;
    for (int rep = 0; rep < loops; ++rep) {
        for (double te : gait.step_events) {
            const double shifted = te - gait.t_begin() + rep * gait.duration();
            if (shifted >= -1e-9 && shifted <= params.t_f + 1e-9)
                traj.step_events.push_back(shifted);
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Decomposed reward terms of one run plus the scalar cost
/// j_w = -(x_tf * z_bar) / max(w_abs * p_max * dvx, kRewardFloor).
struct CostBreakdown {
    double x_tf = 0;    // forward COM displacement at t_f, m
    double z_bar = 0;   // mean COM height over the gait phase, m
    double w_abs = 0;   // |W_left + W_right| at t_f, J
    double p_max = 0;   // max |total instantaneous power|, W
    double dvx = 0;     // summed forward-velocity drops across stance switches, m/s
    double j_w = 0;     // dimensionless, lower is better
};

inline double reward_ratio_cost(double x_tf, double z_bar, double w_abs, double p_max,
                                double dvx) {
    return -(x_tf * z_bar) / std::max(w_abs * p_max * dvx, kRewardFloor);
}

namespace detail {

inline double vx_at(const SimTrajectory& traj, double t) {
    const auto& s = traj.samples;
    if (t <= s.front().t) return s.front().v.x;
    if (t >= s.back().t) return s.back().v.x;
    std::size_t hi = 1;
    while (hi < s.size() && s[hi].t < t) ++hi;
    const auto& b = s[hi];
    const auto& a = s[hi - 1];
    const double u = (t - a.t) / (b.t - a.t);
    return a.v.x + u * (b.v.x - a.v.x);
}

}  // namespace detail

/// Gait-phase metrics. The velocity-loss term sums the positive forward
/// velocity drops across each stance switch, sampled 50 ms before and after
/// the event.
inline CostBreakdown metrics(const SimTrajectory& traj) {
    if (traj.samples.empty()) throw std::invalid_argument("metrics: empty trajectory");
    CostBreakdown c;
    const auto& s = traj.samples;
    c.x_tf = s.back().r.x - s.front().r.x;
    double zsum = 0.0;
    double pmax = 0.0;
    for (const auto& k : s) {
        zsum += k.r.z;
        pmax = std::max(pmax, std::abs(k.p_left + k.p_right));
    }
    c.z_bar = zsum / static_cast<double>(s.size());
    c.p_max = pmax;
    c.w_abs = std::abs(s.back().w_left + s.back().w_right);
    constexpr double window = 0.05;  // s
    for (double te : traj.step_events) {
        const double before = detail::vx_at(traj, te - window);
        const double after = detail::vx_at(traj, te + window);
        c.dvx += std::max(0.0, before - after);
    }
    c.j_w = reward_ratio_cost(c.x_tf, c.z_bar, c.w_abs, c.p_max, c.dvx);
    return c;
}

}  // namespace sandwalk
