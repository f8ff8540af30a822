#pragma once

#include <cmath>

namespace capgeo {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {x * a, y * a}; }
    Vec2 operator/(double a) const { return {x / a, y / a}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    Vec2 normalized() const { double n = norm(); return {x / n, y / n}; }
    Vec2 perp() const { return {-y, x}; }  // ccw rotation by pi/2
};

inline Vec2 operator*(double a, Vec2 v) { return v * a; }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm2() const { return x * x + y * y + z * z; }
};

// Symmetric positive-definite 2x2 metric tensor.
struct Mat2 {
    double a11 = 1.0, a12 = 0.0, a22 = 1.0;

    double dot(Vec2 u, Vec2 v) const {
        return a11 * u.x * v.x + a12 * (u.x * v.y + u.y * v.x) + a22 * u.y * v.y;
    }
    double norm(Vec2 u) const { return std::sqrt(dot(u, u)); }
    double det() const { return a11 * a22 - a12 * a12; }
};

// Christoffel symbols of the second kind; g^k_{ij} stored as k in {x,y},
// ij in {xx, xy, yy} (symmetric in ij).
struct Christoffel {
    double x_xx = 0, x_xy = 0, x_yy = 0;
    double y_xx = 0, y_xy = 0, y_yy = 0;

    // Gamma(v, v): the quadratic form entering the geodesic equation
    // x'' = -Gamma(x', x').
    Vec2 quad(Vec2 v) const {
        return {x_xx * v.x * v.x + 2.0 * x_xy * v.x * v.y + x_yy * v.y * v.y,
                y_xx * v.x * v.x + 2.0 * y_xy * v.x * v.y + y_yy * v.y * v.y};
    }
};

inline double wrap_angle_2pi(double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    a = std::fmod(a, two_pi);
    if (a < 0) a += two_pi;
    return a;
}

// Signed difference b - a wrapped into (-pi, pi].
inline double wrap_angle_diff(double b, double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double d = std::fmod(b - a, two_pi);
    if (d <= -3.141592653589793238462643383279) d += two_pi;
    if (d > 3.141592653589793238462643383279) d -= two_pi;
    return d;
}

}  // namespace capgeo
