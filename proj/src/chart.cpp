#include "capgeo/chart.hpp"

#include <algorithm>
#include <cmath>

#include "capgeo/polyline.hpp"

namespace capgeo::geom {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

struct OdeState {
    Vec2 q, w;
};

OdeState rk4_step(const MetricChart& chart, const OdeState& st, double h) {
    auto accel = [&chart](const OdeState& s) -> Vec2 { return -chart.christoffel(s.q).quad(s.w); };
    Vec2 k1q = st.w, k1w = accel(st);
    OdeState s2{st.q + k1q * (h / 2), st.w + k1w * (h / 2)};
    Vec2 k2q = s2.w, k2w = accel(s2);
    OdeState s3{st.q + k2q * (h / 2), st.w + k2w * (h / 2)};
    Vec2 k3q = s3.w, k3w = accel(s3);
    OdeState s4{st.q + k3q * h, st.w + k3w * h};
    Vec2 k4q = s4.w, k4w = accel(s4);
    return {st.q + (k1q + 2 * k2q + 2 * k3q + k4q) * (h / 6),
            st.w + (k1w + 2 * k2w + 2 * k3w + k4w) * (h / 6)};
}

// Composite 2-point Gauss quadrature of f over [a, b] with n panels.
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

Vec2 MetricChart::boundary_inward_normal(double beta) const {
    Vec2 p = boundary_point(beta);
    Vec2 t = boundary_tangent_ccw(beta);
    Mat2 g = metric(p);
    Vec2 e = t.perp();
    Vec2 n = e - t * (g.dot(e, t) / g.dot(t, t));
    n = n / g.norm(n);
    double eps = 1e-6;
    if (interior_coordinate(p + n * eps) < interior_coordinate(p)) n = -n;
    return n;
}

double MetricChart::boundary_geodesic_curvature_at(Vec2 p) const {
    return boundary_geodesic_curvature(boundary_param(p));
}

double MetricChart::boundary_arc_ccw(double b1, double b2) const {
    double s1 = boundary_arclength(wrap_angle_2pi(b1));
    double s2 = boundary_arclength(wrap_angle_2pi(b2));
    double d = s2 - s1;
    if (d < 0) d += boundary_length();
    return d;
}

double MetricChart::boundary_arc_distance(double b1, double b2) const {
    double d = boundary_arc_ccw(b1, b2);
    return std::min(d, boundary_length() - d);
}

Trajectory MetricChart::geodesic_trace(Vec2 p, Vec2 v, double max_len,
                                       const TraceOptions& opts) const {
    if (!(max_len > 0)) throw Error("geodesic_trace: max_len must be positive");
    double vn = metric_norm(p, v);
    if (std::fabs(vn - 1.0) > 1e-12)
        throw Error("geodesic_trace: tangent is not g-unit (|v|_g deviates by " +
                    std::to_string(vn - 1.0) + ")");
    if (interior_coordinate(p) < -1e-9) throw LeftChart("geodesic_trace: start outside chart");

    double h = opts.step > 0 ? opts.step : std::min(1e-3, suggested_step());
    if (h <= 0) throw StepUnderflow("geodesic_trace: nonpositive step");

    Trajectory traj;
    traj.points.push_back(p);
    traj.arclength.push_back(0.0);
    traj.initial_tangent = v;

    SegmentGrid grid(4 * h, period());
    const double arm_eps = 1e-8;
    bool armed = interior_coordinate(p) > arm_eps;

    OdeState st{p, v};
    double s = 0.0;
    for (;;) {
        double hstep = std::min(h, max_len - s);
        if (hstep < 1e-15) {
            traj.hit = HitType::LengthExceeded;
            break;
        }
        OdeState next = rk4_step(*this, st, hstep);
        if (!in_coordinate_domain(next.q))
            throw LeftChart("geodesic_trace: left the coordinate domain at arclength " +
                            std::to_string(s));

        bool boundary_event = false;
        double boundary_tau = hstep;
        if (armed && interior_coordinate(next.q) < 0.0) {
            boundary_event = true;
            double lo = 0.0, hi = hstep;
            int iters = 0;
            while (hi - lo > opts.event_tol) {
                if (++iters > 200) throw StepUnderflow("geodesic_trace: event bisection stalled");
                double mid = 0.5 * (lo + hi);
                if (interior_coordinate(rk4_step(*this, st, mid).q) < 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            boundary_tau = 0.5 * (lo + hi);
        }

        std::optional<SegmentHit> si;
        double si_tau = hstep;
        if (opts.detect_self_intersection && grid.size() >= 2) {
            si = grid.first_crossing(st.q, next.q, grid.size() - 1);
            if (si) {
                double seg_len = (next.q - st.q).norm();
                double frac = seg_len > 0 ? (si->point - st.q).norm() / seg_len : 0.0;
                si_tau = frac * hstep;
            }
        }

        if (boundary_event && (!si || boundary_tau <= si_tau)) {
            OdeState end = rk4_step(*this, st, boundary_tau);
            s += boundary_tau;
            traj.points.push_back(end.q);
            traj.arclength.push_back(s);
            traj.terminal_tangent = end.w;
            traj.hit = HitType::BoundaryHit;
            traj.boundary_hit_param = boundary_param(end.q, 1e-5);
            break;
        }
        if (si) {
            s += si_tau;
            traj.points.push_back(si->point);
            traj.arclength.push_back(s);
            traj.terminal_tangent = next.w;
            traj.hit = HitType::SelfIntersection;
            traj.self_intersection_point = si->point;
            traj.self_intersection_arclength = s;
            break;
        }

        grid.insert(st.q, next.q);
        st = next;
        s += hstep;
        traj.points.push_back(st.q);
        traj.arclength.push_back(s);
        if (!armed && interior_coordinate(st.q) > arm_eps) armed = true;
        if (traj.hit == HitType::LengthExceeded && s >= max_len) {
            traj.terminal_tangent = st.w;
            break;
        }
    }
    if (traj.hit == HitType::LengthExceeded) traj.terminal_tangent = st.w;
    traj.length = traj.arclength.back();
    return traj;
}

GaussBonnetReport MetricChart::gauss_bonnet_audit(int resolution) const {
    int res = resolution > 0 ? resolution : default_resolution();

    // Boundary term: periodic trapezoid of kappa(beta) * ds/dbeta.
    auto boundary_integral = [this](int n) {
        double sum = 0.0;
        double db = kTwoPi / n;
        for (int i = 0; i < n; ++i) {
            double b = i * db;
            sum += boundary_geodesic_curvature(b) * boundary_speed(b);
        }
        return sum * db;
    };
    int nb = std::max(2048, 8 * res);
    double total_kappa = boundary_integral(nb);

    double tip_unused = 0.0;
    double k_full = curvature_integral(res, &tip_unused);
    double k_half = curvature_integral(std::max(8, res / 2), &tip_unused);
    double k_quarter = curvature_integral(std::max(8, res / 4), &tip_unused);
    double est_fine = std::fabs(k_full - k_half);
    double est_coarse = std::fabs(k_half - k_quarter);
    if (est_fine > 5e-3 && est_fine > est_coarse)
        throw QuadratureFailure("gauss_bonnet_audit: refinement does not reduce the estimate");

    GaussBonnetReport rep;
    rep.total_K = k_full;
    rep.total_kappa = total_kappa;
    rep.residual = std::fabs(rep.total_K + rep.total_kappa - kTwoPi);
    if (kind() == ChartKind::RevolutionDisk)
        rep.tip_mass = kTwoPi - rep.total_K - rep.total_kappa;
    return rep;
}

double MetricChart::min_gaussian_curvature(int samples) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        double rad = (i + 0.5) / samples;
        for (int j = 0; j < samples; ++j) {
            double ang = kTwoPi * j / samples;
            Vec2 q = disk_unprojection({rad * std::cos(ang), rad * std::sin(ang)});
            if (!in_coordinate_domain(q)) continue;
            best = std::min(best, gaussian_curvature(q));
        }
    }
    return best;
}

void MetricChart::validate_convexity(int samples) const {
    for (int i = 0; i < samples; ++i) {
        double b = kTwoPi * i / samples;
        if (!(boundary_geodesic_curvature(b) > 0))
            throw InvalidChart("boundary is not strictly convex at beta = " + std::to_string(b));
    }
}

// ---------------------------------------------------------------------------
// Flat unit disk.

namespace {

class FlatDisk final : public MetricChart {
public:
    FlatDisk() { set_boundary_length(kTwoPi); }

    ChartKind kind() const override { return ChartKind::FlatUnitDisk; }
    Mat2 metric(Vec2) const override { return {}; }
    Christoffel christoffel(Vec2) const override { return {}; }
    double gaussian_curvature(Vec2) const override { return 0.0; }
    Vec2 boundary_point(double beta) const override { return {std::cos(beta), std::sin(beta)}; }
    double boundary_param(Vec2 p, double tol) const override {
        if (std::fabs(p.norm() - 1.0) > tol)
            throw NotOnBoundary("flat disk: point is not on the unit circle");
        return wrap_angle_2pi(std::atan2(p.y, p.x));
    }
    Vec2 boundary_tangent_ccw(double beta) const override {
        return {-std::sin(beta), std::cos(beta)};
    }
    double boundary_geodesic_curvature(double) const override { return 1.0; }
    double boundary_arclength(double beta) const override { return beta; }
    double boundary_speed(double) const override { return 1.0; }
    double interior_coordinate(Vec2 p) const override { return 1.0 - p.norm(); }
    Vec3 chordal(Vec2 p) const override { return {p.x, p.y, 0.0}; }

protected:
    double curvature_integral(int, double*) const override { return 0.0; }
};

}  // namespace

ChartPtr flat_unit_disk() { return std::make_shared<FlatDisk>(); }

// ---------------------------------------------------------------------------
// Conformal disk e^{2 phi} (dx^2 + dy^2).

namespace {

class ConformalDisk final : public MetricChart {
public:
    ConformalDisk(std::function<double(Vec2)> phi, std::function<Vec2(Vec2)> grad,
                  std::function<double(Vec2)> lap)
        : phi_(std::move(phi)), grad_(std::move(grad)), lap_(std::move(lap)) {
        build_boundary_table();
        validate_convexity();
    }

    ChartKind kind() const override { return ChartKind::ConformalDisk; }

    Mat2 metric(Vec2 p) const override {
        double w = std::exp(2.0 * phi_(p));
        return {w, 0.0, w};
    }

    Christoffel christoffel(Vec2 p) const override {
        Vec2 g = grad_phi(p);
        Christoffel c;
        c.x_xx = g.x;
        c.x_xy = g.y;
        c.x_yy = -g.x;
        c.y_xx = -g.y;
        c.y_xy = g.x;
        c.y_yy = g.y;
        return c;
    }

    double gaussian_curvature(Vec2 p) const override {
        double k = -std::exp(-2.0 * phi_(p)) * laplacian_phi(p);
        if (!std::isfinite(k)) throw NonFiniteCurvature("conformal disk: K is not finite");
        return k;
    }

    Vec2 boundary_point(double beta) const override { return {std::cos(beta), std::sin(beta)}; }
    double boundary_param(Vec2 p, double tol) const override {
        if (std::fabs(p.norm() - 1.0) > tol)
            throw NotOnBoundary("conformal disk: point is not on the unit circle");
        return wrap_angle_2pi(std::atan2(p.y, p.x));
    }
    Vec2 boundary_tangent_ccw(double beta) const override {
        Vec2 t{-std::sin(beta), std::cos(beta)};
        return t * std::exp(-phi_(boundary_point(beta)));
    }
    double boundary_geodesic_curvature(double beta) const override {
        Vec2 p = boundary_point(beta);
        Vec2 g = grad_phi(p);
        double phi_r = g.x * p.x + g.y * p.y;  // radial derivative on the unit circle
        return std::exp(-phi_(p)) * (1.0 + phi_r);
    }
    double boundary_arclength(double beta) const override {
        beta = std::clamp(beta, 0.0, kTwoPi);
        double pos = beta / kTwoPi * (arc_table_.size() - 1);
        size_t i = std::min(static_cast<size_t>(pos), arc_table_.size() - 2);
        double w = pos - i;
        return arc_table_[i] * (1 - w) + arc_table_[i + 1] * w;
    }
    double boundary_speed(double beta) const override {
        return std::exp(phi_(boundary_point(beta)));
    }
    double interior_coordinate(Vec2 p) const override { return 1.0 - p.norm(); }
    Vec3 chordal(Vec2 p) const override { return {p.x, p.y, 0.0}; }

protected:
    double curvature_integral(int resolution, double*) const override {
        // Product rule in polar coordinates: Simpson radially, trapezoid in angle.
        int nr = std::max(16, resolution);
        if (nr % 2 == 1) ++nr;
        int na = std::max(32, 2 * resolution);
        double dr = 1.0 / nr, da = kTwoPi / na;
        double total = 0.0;
        for (int i = 0; i <= nr; ++i) {
            double rad = i * dr;
            double wr = (i == 0 || i == nr) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            double ring = 0.0;
            for (int j = 0; j < na; ++j) {
                double ang = j * da;
                Vec2 p{rad * std::cos(ang), rad * std::sin(ang)};
                ring += gaussian_curvature(p) * std::exp(2.0 * phi_(p));
            }
            total += wr * ring * rad;
        }
        return total * dr / 3.0 * da;
    }

private:
    std::function<double(Vec2)> phi_;
    std::function<Vec2(Vec2)> grad_;
    std::function<double(Vec2)> lap_;
    std::vector<double> arc_table_;

    Vec2 grad_phi(Vec2 p) const {
        if (grad_) return grad_(p);
        const double h = 1e-6;
        return {(phi_({p.x + h, p.y}) - phi_({p.x - h, p.y})) / (2 * h),
                (phi_({p.x, p.y + h}) - phi_({p.x, p.y - h})) / (2 * h)};
    }
    double laplacian_phi(Vec2 p) const {
        if (lap_) return lap_(p);
        const double h = 1e-4;
        return (phi_({p.x + h, p.y}) + phi_({p.x - h, p.y}) + phi_({p.x, p.y + h}) +
                phi_({p.x, p.y - h}) - 4.0 * phi_(p)) /
               (h * h);
    }

    void build_boundary_table() {
        const int n = 4096;
        arc_table_.assign(n + 1, 0.0);
        double db = kTwoPi / n;
        auto speed = [this](double b) { return std::exp(phi_(boundary_point(b))); };
        for (int i = 0; i < n; ++i)
            arc_table_[i + 1] = arc_table_[i] + gauss2(speed, i * db, (i + 1) * db, 1);
        set_boundary_length(arc_table_.back());
    }
};

}  // namespace

ChartPtr conformal_disk(std::function<double(Vec2)> phi, std::function<Vec2(Vec2)> grad_phi,
                        std::function<double(Vec2)> laplacian_phi) {
    return std::make_shared<ConformalDisk>(std::move(phi), std::move(grad_phi),
                                           std::move(laplacian_phi));
}

ChartPtr conformal_disk_expr(const Expr& phi) {
    Expr copy = phi;
    return conformal_disk([copy](Vec2 p) { return copy.eval(p.x, p.y); });
}

// Bicubic (Catmull-Rom) interpolation of phi samples on a uniform grid over
// [-1.1, 1.1]^2; the sampling pad lets curvature stencils reach past the rim.
namespace {

class GridField {
public:
    GridField(const std::function<double(Vec2)>& f, int n) : n_(n) {
        if (n_ < 8) throw InvalidChart("conformal grid: resolution must be at least 8");
        values_.resize(static_cast<size_t>(n_) * n_);
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i)
                values_[static_cast<size_t>(j) * n_ + i] = f({coord(i), coord(j)});
    }

    double eval(Vec2 p) const {
        auto [ix, fx] = locate(p.x);
        auto [iy, fy] = locate(p.y);
        double rows[4];
        for (int j = 0; j < 4; ++j) {
            rows[j] = cr(at(ix - 1, iy - 1 + j), at(ix, iy - 1 + j), at(ix + 1, iy - 1 + j),
                         at(ix + 2, iy - 1 + j), fx);
        }
        return cr(rows[0], rows[1], rows[2], rows[3], fy);
    }

private:
    int n_;
    std::vector<double> values_;
    static constexpr double lo_ = -1.1, hi_ = 1.1;

    double coord(int i) const { return lo_ + (hi_ - lo_) * i / (n_ - 1); }
    double at(int i, int j) const {
        i = std::clamp(i, 0, n_ - 1);
        j = std::clamp(j, 0, n_ - 1);
        return values_[static_cast<size_t>(j) * n_ + i];
    }
    std::pair<int, double> locate(double x) const {
        double t = (x - lo_) / (hi_ - lo_) * (n_ - 1);
        int i = std::clamp(static_cast<int>(std::floor(t)), 0, n_ - 2);
        return {i, t - i};
    }
    static double cr(double p0, double p1, double p2, double p3, double t) {
        return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 +
                                              t * (3 * (p1 - p2) + p3 - p0)));
    }
};

}  // namespace

ChartPtr conformal_disk_grid(const std::function<double(Vec2)>& phi, int n) {
    auto grid = std::make_shared<GridField>(phi, n);
    return conformal_disk([grid](Vec2 p) { return grid->eval(p); });
}

}  // namespace capgeo::geom
