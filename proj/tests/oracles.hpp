#pragma once

// Test-only oracles, independent of the library's computational paths:
// closed-form circle geometry, transcendental root solves, brute-force
// winding numbers, and a deterministic RNG.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "capgeo/chart.hpp"
#include "capgeo/domain.hpp"

namespace oracles {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

// Deterministic uniform generator (splitmix-fed xorshift), so expected values
// do not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<uint64_t>(hi - lo + 1));
    }

private:
    uint64_t state_;
};

// Chord of the unit circle with tangent-chord angle alpha launched ccw from
// boundary angle b0: the far endpoint sits at b0 + 2 alpha and the chord has
// length 2 sin(alpha).
inline double chord_far_endpoint(double b0, double alpha) {
    return std::fmod(b0 + 2.0 * alpha, kTwoPi);
}
inline double chord_length(double alpha) { return 2.0 * std::sin(alpha); }

// Straight chord polyline between unit-circle angles, n segments.
inline capgeo::geom::Polyline flat_chord(double b0, double b1, int n = 64) {
    capgeo::geom::Polyline poly;
    capgeo::Vec2 a{std::cos(b0), std::sin(b0)};
    capgeo::Vec2 b{std::cos(b1), std::sin(b1)};
    for (int i = 0; i <= n; ++i) poly.push_back(a + (b - a) * (static_cast<double>(i) / n));
    return poly;
}

// Capillary chord domain on the flat disk: the stationary side wets the long
// arc; launched from basepoint b0 at contact angle theta.
inline capgeo::curve::SimpleDomain flat_capillary_domain(const capgeo::geom::MetricChart& chart,
                                                         double b0, double theta, int n = 200) {
    auto poly = flat_chord(b0, b0 + 2 * theta, n);
    return capgeo::curve::SimpleDomain::proper(chart, poly, capgeo::curve::Side::ArcFromBack);
}

// Bisection for a continuous scalar root on [lo, hi] with f(lo) f(hi) < 0.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-14) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (flo * fm <= 0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Smallest eigenvalue of the flat-chord stability problem from its
// transcendental characteristic equation: the even negative mode solves
// mu tanh(mu L / 2) = sigma, giving lambda = -mu^2.
inline double flat_chord_lowest_eigenvalue(double theta) {
    double L = 2.0 * std::sin(theta);
    double sigma = 1.0 / std::sin(theta);
    auto f = [&](double mu) { return mu * std::tanh(mu * L / 2.0) - sigma; };
    double hi = 2.0;
    while (f(hi) < 0) hi *= 2.0;
    double mu = bisect(f, 1e-9, hi);
    return -mu * mu;
}

// Brute-force winding number of a closed sequence of circle angles.
inline int winding_of_angles(const std::vector<double>& angles) {
    double total = 0.0;
    for (size_t i = 0; i < angles.size(); ++i) {
        double a = angles[i];
        double b = angles[(i + 1) % angles.size()];
        total += capgeo::wrap_angle_diff(b, a);
    }
    return static_cast<int>(std::llround(total / kTwoPi));
}

// Central-difference first variation of a polyline functional under a vertex
// perturbation field.
inline double finite_difference_variation(const std::function<double(const capgeo::geom::Polyline&)>& functional,
                                          const capgeo::geom::Polyline& poly,
                                          const std::vector<capgeo::Vec2>& field,
                                          double eps = 1e-6) {
    capgeo::geom::Polyline plus = poly, minus = poly;
    for (size_t i = 0; i < poly.size(); ++i) {
        plus[i] += field[i] * eps;
        minus[i] -= field[i] * eps;
    }
    return (functional(plus) - functional(minus)) / (2 * eps);
}

}  // namespace oracles
