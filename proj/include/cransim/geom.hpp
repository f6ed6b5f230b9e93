// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

namespace cransim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline double horizontal_distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

// azimuth of the direction a -> b, in [0, 2*pi)
inline double azimuth(const Vec3& from, const Vec3& to) {
    double phi = std::atan2(to.y - from.y, to.x - from.x);
    if (phi < 0.0) phi += kTwoPi;
    return phi;
}

// wrap angle into [0, 2*pi)
inline double wrap_two_pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

// wrap angle into [-pi, pi)
inline double wrap_pi(double a) {
    a = wrap_two_pi(a + kPi);
    return a - kPi;
}

// unsigned angular distance, in [0, pi]
inline double angular_distance(double a, double b) { return std::fabs(wrap_pi(a - b)); }

}  // namespace cransim
