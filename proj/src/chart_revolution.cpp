#include <algorithm>
#include <cmath>

#include "capgeo/chart.hpp"

namespace capgeo::geom {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

template <typename F>
double gauss2(F&& f, double a, double b, int n) {
    const double off = 0.5 / std::sqrt(3.0);
    double h = (b - a) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double mid = a + (i + 0.5) * h;
        sum += f(mid - off * h) + f(mid + off * h);
    }
    return sum * h * 0.5;
}

}  // namespace

RevolutionDisk::RevolutionDisk(RevolutionProfile p) : profile_(std::move(p)) {
    if (!(profile_.s >= 0.0 && profile_.s < 1.0))
        throw InvalidChart("revolution disk: need 0 <= s < 1");
    r1_ = profile_.r(1.0);
    dr1_ = profile_.dr(1.0);
    if (!(r1_ > 0)) throw InvalidChart("revolution disk: r(1) must be positive");

    // Profile inequalities checked on samples: r >= 0, r' > 0 on (s, 1],
    // r'' <= 0 (up to slack).
    const int samples = 512;
    for (int i = 1; i <= samples; ++i) {
        double u = profile_.s + (1.0 - profile_.s) * i / samples;
        if (!(profile_.r(u) >= 0)) throw InvalidChart("revolution disk: r < 0");
        if (!(profile_.dr(u) > 0)) throw InvalidChart("revolution disk: r' <= 0");
        if (profile_.ddr(u) > profile_.concavity_slack)
            throw InvalidChart("revolution disk: r'' > 0");
    }

    // Cumulative meridian arclength. With a tip (r(s) = 0, r' blowing up)
    // the substitution u = s + w^2 removes the integrable singularity.
    const int n = 4096;
    rho_table_.assign(n + 1, 0.0);
    if (profile_.meridian_arclength) {
        for (int i = 0; i <= n; ++i) rho_table_[i] = profile_.meridian_arclength(grid_u(i));
    } else if (profile_.has_tip) {
        double wmax = std::sqrt(1.0 - profile_.s);
        auto integrand = [this](double w) {
            double u = profile_.s + w * w;
            return 2.0 * std::hypot(w, w * profile_.dr(u));
        };
        for (int i = 0; i < n; ++i) {
            double w0 = wmax * i / n, w1 = wmax * (i + 1) / n;
            rho_table_[i + 1] = rho_table_[i] + gauss2(integrand, w0, w1, 2);
        }
    } else {
        auto integrand = [this](double u) { return std::hypot(1.0, profile_.dr(u)); };
        for (int i = 0; i < n; ++i)
            rho_table_[i + 1] = rho_table_[i] + gauss2(integrand, grid_u(i), grid_u(i + 1), 2);
    }
    rho1_ = rho_table_.back();

    tip_guard_ = profile_.has_tip ? 1e-9 : 0.0;
    set_boundary_length(kTwoPi * r1_);
    validate_convexity();
}

double RevolutionDisk::grid_u(int i) const {
    const int n = static_cast<int>(rho_table_.size()) - 1;
    if (profile_.has_tip && !profile_.meridian_arclength) {
        double wmax = std::sqrt(1.0 - profile_.s);
        double w = wmax * i / n;
        return profile_.s + w * w;
    }
    return profile_.s + (1.0 - profile_.s) * i / n;
}

double RevolutionDisk::meridian_length(double u) const {
    if (profile_.meridian_arclength) return profile_.meridian_arclength(u);
    u = std::clamp(u, profile_.s, 1.0);
    const int n = static_cast<int>(rho_table_.size()) - 1;
    double pos;
    if (profile_.has_tip) {
        double wmax = std::sqrt(1.0 - profile_.s);
        pos = std::sqrt(std::max(u - profile_.s, 0.0)) / wmax * n;
    } else {
        pos = (u - profile_.s) / (1.0 - profile_.s) * n;
    }
    size_t i = std::min(static_cast<size_t>(pos), rho_table_.size() - 2);
    double w = pos - i;
    return rho_table_[i] * (1 - w) + rho_table_[i + 1] * w;
}

double RevolutionDisk::u_of_meridian_length(double rho) const {
    rho = std::clamp(rho, 0.0, rho1_);
    size_t lo = 0, hi = rho_table_.size() - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (rho_table_[mid] <= rho)
            lo = mid;
        else
            hi = mid;
    }
    // Bisection within the bracketing cell; near the tip the inverse is
    // sqrt-shaped and any interpolation overshoots badly.
    double ulo = grid_u(static_cast<int>(lo)), uhi = grid_u(static_cast<int>(hi));
    for (int it = 0; it < 60 && uhi - ulo > 1e-16; ++it) {
        double um = 0.5 * (ulo + uhi);
        if (meridian_length(um) <= rho)
            ulo = um;
        else
            uhi = um;
    }
    return std::clamp(0.5 * (ulo + uhi), profile_.s, 1.0);
}

Mat2 RevolutionDisk::metric(Vec2 p) const {
    double dr = profile_.dr(p.x);
    double r = profile_.r(p.x);
    return {1.0 + dr * dr, 0.0, r * r};
}

Christoffel RevolutionDisk::christoffel(Vec2 p) const {
    double r = profile_.r(p.x);
    double dr = profile_.dr(p.x);
    double ddr = profile_.ddr(p.x);
    double e = 1.0 + dr * dr;
    Christoffel c;
    c.x_xx = dr * ddr / e;
    c.x_yy = -r * dr / e;
    c.y_xy = dr / r;
    return c;
}

double RevolutionDisk::gaussian_curvature(Vec2 p) const {
    if (p.x <= profile_.s)
        throw TipSingularity("revolution disk: curvature requested at the axis point");
    double r = profile_.r(p.x);
    double dr = profile_.dr(p.x);
    double ddr = profile_.ddr(p.x);
    double e = 1.0 + dr * dr;
    double k = -ddr / (r * e * e);
    if (!std::isfinite(k)) throw NonFiniteCurvature("revolution disk: K is not finite");
    return k;
}

Vec2 RevolutionDisk::boundary_point(double beta) const { return {1.0, beta}; }

double RevolutionDisk::boundary_param(Vec2 p, double tol) const {
    if (std::fabs(p.x - 1.0) > tol)
        throw NotOnBoundary("revolution disk: point is not on the rim u = 1");
    return wrap_angle_2pi(p.y);
}

Vec2 RevolutionDisk::boundary_tangent_ccw(double) const { return {0.0, 1.0 / r1_}; }

double RevolutionDisk::boundary_geodesic_curvature(double) const {
    return dr1_ / (r1_ * std::hypot(1.0, dr1_));
}

double RevolutionDisk::boundary_arclength(double beta) const { return beta * r1_; }
double RevolutionDisk::boundary_speed(double) const { return r1_; }

double RevolutionDisk::interior_coordinate(Vec2 p) const { return 1.0 - p.x; }

bool RevolutionDisk::in_coordinate_domain(Vec2 p) const {
    return p.x > profile_.s + tip_guard_;
}

Vec3 RevolutionDisk::chordal(Vec2 p) const {
    double r = profile_.r(p.x);
    return {p.x, r * std::cos(p.y), r * std::sin(p.y)};
}

Vec2 RevolutionDisk::disk_projection(Vec2 p) const {
    double rad = meridian_length(p.x) / rho1_;
    return {rad * std::cos(p.y), rad * std::sin(p.y)};
}

Vec2 RevolutionDisk::disk_unprojection(Vec2 q) const {
    double rad = q.norm();
    double u = u_of_meridian_length(rad * rho1_);
    return {u, std::atan2(q.y, q.x)};
}

double RevolutionDisk::suggested_step() const {
    return std::min({1e-3, rho1_ / 200.0, kTwoPi * r1_ / 200.0});
}

double RevolutionDisk::curvature_integral(int resolution, double*) const {
    if (!profile_.has_tip)
        throw QuadratureFailure("revolution disk: curvature audit needs a closed tip (r(s)=0)");
    // Integrate K b(rho) drho in meridian arclength; the annulus rho < 1e-3
    // around the axis is excluded and its mass reported separately by the
    // audit. Panels refine geometrically toward the tip.
    const double rho_excl = 1e-3;
    auto integrand = [this](double rho) {
        double u = u_of_meridian_length(rho);
        u = std::max(u, profile_.s + 1e-13);
        double dr = profile_.dr(u);
        double ddr = profile_.ddr(u);
        double e = 1.0 + dr * dr;
        return -ddr / (e * e) * kTwoPi;  // K * r, with r cancelled analytically
    };
    // Shrink the exclusion below 1e-3 when the tip curvature is large, so the
    // excluded mass (~ pi rho^2 K_tip) stays under the audit tolerance.
    double k_tip = std::fabs(integrand(std::min(2.0 * rho_excl, rho1_))) /
                   (kTwoPi * std::max(profile_.r(u_of_meridian_length(
                                          std::min(2.0 * rho_excl, rho1_))),
                                      1e-12));
    double rho_used = rho_excl;
    if (k_tip > 1.0) rho_used = std::min(rho_excl, std::sqrt(2e-4 / (kPi * k_tip)));

    // Geometric refinement toward the tip, with extra panel edges at the
    // profile's derivative jumps.
    std::vector<double> edges;
    double lo = rho_used;
    int panels = 0;
    while (lo < rho1_) {
        edges.push_back(lo);
        double hi = std::min(lo * 2.0, rho1_);
        if (rho1_ - hi < rho1_ / 16.0) hi = rho1_;
        lo = hi;
        if (++panels > 64) break;
    }
    edges.push_back(rho1_);
    for (double ub : profile_.breakpoints) {
        double rb = meridian_length(ub);
        if (rb > rho_used && rb < rho1_) edges.push_back(rb);
    }
    std::sort(edges.begin(), edges.end());
    double total = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        if (edges[i + 1] - edges[i] < 1e-15) continue;
        total += gauss2(integrand, edges[i], edges[i + 1], std::max(8, resolution / 4));
    }
    return total;
}

const RevolutionDisk& as_revolution(const MetricChart& chart) {
    const auto* rd = dynamic_cast<const RevolutionDisk*>(&chart);
    if (!rd) throw InvalidChart("expected a revolution chart");
    return *rd;
}

ChartPtr revolution_disk(RevolutionProfile profile) {
    return std::make_shared<RevolutionDisk>(std::move(profile));
}

}  // namespace capgeo::geom
