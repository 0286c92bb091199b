#pragma once

#include <cmath>

namespace tumblerpod {

// Planar vector. In the aerial frame x is horizontal and z points down.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double z_) : x(x_), z(z_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, z + o.z}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, z - o.z}; }
    constexpr Vec2 operator-() const { return {-x, -z}; }
    constexpr Vec2 operator*(double s) const { return {x * s, z * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, z / s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; z += o.z; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; z -= o.z; return *this; }

    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, z); }
    constexpr double squared_norm() const { return x * x + z * z; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.z * b.z; }
// z-component of the planar cross product; positive rotates +x toward +z.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.z - a.z * b.x; }
// Rotate by +90 degrees (the direction a point at `v` moves under positive spin).
constexpr Vec2 perp(Vec2 v) { return {-v.z, v.x}; }

inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.z); }

}  // namespace tumblerpod
