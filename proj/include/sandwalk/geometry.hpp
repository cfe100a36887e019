#pragma once

#include <cmath>
#include <numbers>

namespace sandwalk {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = kPi / 2.0;

/// Planar vector in the sagittal plane: x forward, z up.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, z + o.z}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, z - o.z}; }
    Vec2 operator*(double s) const { return {x * s, z * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; z += o.z; return *this; }

    double dot(const Vec2& o) const { return x * o.x + z * o.z; }
    double norm() const { return std::hypot(x, z); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Rotate v counterclockwise by angle (radians).
inline Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.z, s * v.x + c * v.z};
}

/// 2D cross-product velocity transfer: omega x r for out-of-plane omega.
inline Vec2 angular_velocity_at(double omega, const Vec2& r) {
    return {-omega * r.z, omega * r.x};
}

/// Wrap an angle into (-pi, pi].
inline double wrap_pi(double a) {
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

/// Wrap a plate-orientation angle into (-pi/2, pi/2] (orientation is
/// unsigned: a plate rotated by pi is the same plate).
inline double wrap_orientation(double a) {
    double w = std::remainder(a, kPi);
    if (w <= -kHalfPi) w += kPi;
    return w;
}

/// Orientation angle of the segment a->b, wrapped into (-pi/2, pi/2].
inline double segment_orientation(const Vec2& a, const Vec2& b) {
    return wrap_orientation(std::atan2(b.z - a.z, b.x - a.x));
}

}  // namespace sandwalk
