#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "sandwalk/geometry.hpp"

namespace sandwalk {

/// Foot-bottom contour as an ordered polyline in the foot frame (x_p forward,
/// z_p up, heel-to-toe ordering). Curved canonical shapes are stored as dense
/// samplings of their exact parametric curves. `ankle_offset` is the point of
/// the foot frame the ankle attaches to.
struct FootContour {
    std::vector<Vec2> vertices;
    Vec2 ankle_offset{0.0, 0.0};
    double width = 0.08;            // out-of-plane width, m
    std::string label;

    double min_z() const {
        double m = vertices.front().z;
        for (const auto& v : vertices) m = std::min(m, v.z);
        return m;
    }
    double arc_length() const {
        double s = 0.0;
        for (std::size_t i = 1; i < vertices.size(); ++i)
            s += (vertices[i] - vertices[i - 1]).norm();
        return s;
    }
};

/// One elementary plate: a straight segment with endpoints, center, center
/// velocity (world frame only), orientation beta in (-pi/2, pi/2] and arc
/// length along the contour it covers.
struct Plate {
    Vec2 a, b;
    Vec2 center;
    Vec2 velocity{0.0, 0.0};
    double beta = 0.0;
    double arc_len = 0.0;
};

struct PlateSet {
    std::vector<Plate> plates;
    double total_arc = 0.0;
};

enum class FootShape { ellipse, rectangle, circle, reversed_L, triangle };

inline FootShape foot_shape_from_name(const std::string& name) {
    if (name == "ellipse") return FootShape::ellipse;
    if (name == "rectangle") return FootShape::rectangle;
    if (name == "circle") return FootShape::circle;
    if (name == "reversed_L" || name == "reversed-l" || name == "reversed_l") return FootShape::reversed_L;
    if (name == "triangle") return FootShape::triangle;
    throw std::invalid_argument("unknown foot shape '" + name + "'");
}

inline const char* foot_shape_name(FootShape s) {
    switch (s) {
        case FootShape::ellipse: return "ellipse";
        case FootShape::rectangle: return "rectangle";
        case FootShape::circle: return "circle";
        case FootShape::reversed_L: return "reversed_L";
        case FootShape::triangle: return "triangle";
    }
    return "?";
}

namespace detail {

inline void append_arc_samples(std::vector<Vec2>& out, double a, double b,
                               double t0, double t1, std::size_t n) {
    // Elliptical arc (a cos t, b sin t), t0 -> t1, appending n samples after t0.
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
        out.push_back({a * std::cos(t), b * std::sin(t)});
    }
}

}  // namespace detail

/// Bottom contour of one of the five canonical shapes, heel to toe, with the
/// stated effective contact length (the horizontal span of the intruding
/// curve). Curved shapes keep the 2:1 long:short aspect; boxy shapes use 2:1
/// side lengths. The ankle attaches at the shape's top-center.
///
/// Vertical heel/toe faces are part of the contour where the shape has them
/// (rectangle, reversed_L) so deep sinkage still produces horizontal drag.
inline FootContour make_canonical(FootShape kind, double contact_length,
                                  std::size_t curve_samples = 720) {
    if (!(contact_length > 0.0)) throw std::invalid_argument("make_canonical: contact_length must be > 0");
    const double c = contact_length;
    const double half = c / 2.0;
    FootContour f;
    f.label = foot_shape_name(kind);
    switch (kind) {
        case FootShape::ellipse: {
            // Bottom half-ellipse, semi-axes (c/2, c/4).
            f.vertices.push_back({-half, 0.0});
            detail::append_arc_samples(f.vertices, half, c / 4.0, kPi, 2.0 * kPi, curve_samples);
            break;
        }
        case FootShape::rectangle: {
            // c x c/2 box: heel face, flat sole, toe face.
            f.vertices = {{-half, 0.0}, {-half, -half}, {half, -half}, {half, 0.0}};
            break;
        }
        case FootShape::circle: {
            // Bottom half-circle of radius c/2.
            f.vertices.push_back({-half, 0.0});
            detail::append_arc_samples(f.vertices, half, half, kPi, 2.0 * kPi, curve_samples);
            break;
        }
        case FootShape::reversed_L: {
            // Flat sole of length c with a single heel face of height c/2.
            f.vertices = {{-half, 0.0}, {-half, -half}, {half, -half}};
            break;
        }
        case FootShape::triangle: {
            // Downward isoceles wedge, base c, apex depth c/2.
            f.vertices = {{-half, 0.0}, {0.0, -half}, {half, 0.0}};
            break;
        }
    }
    f.ankle_offset = {0.0, 0.0};
    return f;
}

namespace detail {

/// Natural cubic spline through (x_i, y_i) with uniform-or-not x spacing:
/// returns second derivatives (zero at both ends).
inline std::vector<double> natural_spline_m2(const std::vector<double>& x,
                                             const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m2(n, 0.0);
    if (n < 3) return m2;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1];
        const double h1 = x[i + 1] - x[i];
        a[i] = h0 / 6.0;
        b[i] = (h0 + h1) / 3.0;
        c[i] = h1 / 6.0;
        d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    // Thomas solve on the interior unknowns.
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m2[i] = (d[i] - c[i] * (i + 2 < n ? m2[i + 1] : 0.0)) / b[i];
        if (i == 1) break;
    }
    return m2;
}

inline double spline_eval(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& m2, double xq) {
    const std::size_t n = x.size();
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(x.begin(), x.end(), xq) - x.begin());
    i = std::clamp<std::size_t>(i, 1, n - 1) - 1;
    const double h = x[i + 1] - x[i];
    const double t = (xq - x[i]) / h;
    const double u = 1.0 - t;
    return u * y[i] + t * y[i + 1] +
           h * h / 6.0 * ((u * u * u - u) * m2[i] + (t * t * t - t) * m2[i + 1]);
}

}  // namespace detail

/// Waypoint-controlled contour: n waypoints uniform in x_p over [-L, L] at
/// depths z_p = -k_i * H / K (k_i in {1..K}), joined by a natural cubic
/// spline sampled into a dense polyline, with vertical end caps rising to
/// z_p = 0 at both ends. The sampled bottom is clamped into the design box
/// [-L, L] x [-H, 0]; spline overshoot past the box is flattened.
inline FootContour from_waypoints(const std::vector<int>& k, double L, double H, int K,
                                  std::size_t samples_per_span = 200) {
    const std::size_t n = k.size();
    if (n < 2) throw std::invalid_argument("from_waypoints: need at least 2 waypoints");
    if (K < 1) throw std::invalid_argument("from_waypoints: K must be >= 1");
    if (!(L > 0.0) || !(H > 0.0)) throw std::invalid_argument("from_waypoints: L and H must be > 0");
    for (int ki : k)
        if (ki < 1 || ki > K)
            throw std::invalid_argument("from_waypoints: waypoint index " + std::to_string(ki) +
                                        " out of {1.." + std::to_string(K) + "}");
    std::vector<double> xs(n), zs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = -L + 2.0 * L * static_cast<double>(i) / static_cast<double>(n - 1);
        zs[i] = -static_cast<double>(k[i]) * H / static_cast<double>(K);
    }
    const auto m2 = detail::natural_spline_m2(xs, zs);

    FootContour f;
    f.label = "waypoints";
    f.width = 0.08;
    f.vertices.push_back({-L, 0.0});
    const std::size_t total = samples_per_span * (n - 1);
    for (std::size_t j = 0; j <= total; ++j) {
        const double x = -L + 2.0 * L * static_cast<double>(j) / static_cast<double>(total);
        double z = detail::spline_eval(xs, zs, m2, x);
        z = std::clamp(z, -H, 0.0);
        const Vec2 p{x, z};
        if ((p - f.vertices.back()).norm() > 1e-9) f.vertices.push_back(p);
    }
    if (f.vertices.back().z < -1e-9) f.vertices.push_back({L, 0.0});
    f.ankle_offset = {0.0, 0.0};
    return f;
}

/// Partition a contour into N plates of equal arc length along the polyline.
/// Plate chords connect points interpolated on the contour; beta follows the
/// chord slope.
inline PlateSet discretize(const FootContour& contour, std::size_t N) {
    if (N < 1) throw std::invalid_argument("discretize: N must be >= 1");
    const auto& v = contour.vertices;
    if (v.size() < 2) throw std::invalid_argument("discretize: contour needs >= 2 vertices");
    std::vector<double> cum(v.size(), 0.0);
    for (std::size_t i = 1; i < v.size(); ++i)
        cum[i] = cum[i - 1] + (v[i] - v[i - 1]).norm();
    const double S = cum.back();
    if (!(S > 1e-9)) throw std::invalid_argument("discretize: degenerate contour (zero arc length)");

    auto point_at = [&](double s) -> Vec2 {
        const std::size_t j = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin()),
            1, v.size() - 1);
        const double seg = cum[j] - cum[j - 1];
        const double t = seg > 0.0 ? (s - cum[j - 1]) / seg : 0.0;
        return v[j - 1] + (v[j] - v[j - 1]) * t;
    };

    PlateSet ps;
    ps.total_arc = S;
    ps.plates.resize(N);
    Vec2 prev = v.front();
    for (std::size_t i = 0; i < N; ++i) {
        const double s1 = S * static_cast<double>(i + 1) / static_cast<double>(N);
        const Vec2 next = (i + 1 == N) ? v.back() : point_at(s1);
        Plate& p = ps.plates[i];
        p.a = prev;
        p.b = next;
        p.center = (prev + next) * 0.5;
        p.arc_len = S / static_cast<double>(N);
        p.beta = segment_orientation(prev, next);
        prev = next;
    }
    return ps;
}

/// Rigid-body transform of a foot-frame plate set into the world frame.
/// `angle` rotates the foot frame counterclockwise (zero = foot level),
/// `omega` is its angular rate; plate-center velocities combine the ankle
/// linear velocity with the rotational transfer omega x r.
inline PlateSet world_plates(const PlateSet& foot_frame, const Vec2& ankle_offset,
                             const Vec2& ankle_pos, double angle,
                             const Vec2& ankle_vel, double omega) {
    PlateSet out;
    out.total_arc = foot_frame.total_arc;
    out.plates.resize(foot_frame.plates.size());
    const double c = std::cos(angle), s = std::sin(angle);
    auto xf = [&](const Vec2& p) -> Vec2 {
        const Vec2 r = p - ankle_offset;
        return {ankle_pos.x + c * r.x - s * r.z, ankle_pos.z + s * r.x + c * r.z};
    };
    for (std::size_t i = 0; i < foot_frame.plates.size(); ++i) {
        const Plate& in = foot_frame.plates[i];
        Plate& p = out.plates[i];
        p.a = xf(in.a);
        p.b = xf(in.b);
        p.center = xf(in.center);
        p.arc_len = in.arc_len;
        p.beta = segment_orientation(p.a, p.b);
        const Vec2 rc = p.center - ankle_pos;
        p.velocity = ankle_vel + angular_velocity_at(omega, rc);
    }
    return out;
}

}  // namespace sandwalk
