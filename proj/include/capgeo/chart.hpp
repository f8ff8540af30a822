#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "capgeo/errors.hpp"
#include "capgeo/expr.hpp"
#include "capgeo/vec2.hpp"

namespace capgeo::geom {

enum class ChartKind { FlatUnitDisk, ConformalDisk, RevolutionDisk };

enum class HitType { BoundaryHit, LengthExceeded, SelfIntersection };

// Chart-coordinate polyline. Flat and conformal charts use (x, y) in the
// closed unit disk; revolution charts use (u, t) with t lifted continuously
// (not reduced mod 2pi) along the curve.
using Polyline = std::vector<Vec2>;

struct Trajectory {
    Polyline points;
    std::vector<double> arclength;  // cumulative, arclength[0] == 0
    Vec2 initial_tangent;
    Vec2 terminal_tangent;
    double length = 0.0;
    HitType hit = HitType::LengthExceeded;
    std::optional<double> boundary_hit_param;
    std::optional<Vec2> self_intersection_point;
    double self_intersection_arclength = 0.0;
};

struct TraceOptions {
    double step = 0.0;                    // 0 -> chart default
    bool detect_self_intersection = true;
    double event_tol = 1e-10;             // bisection tolerance in arclength
};

struct GaussBonnetReport {
    double total_K = 0.0;
    double total_kappa = 0.0;
    double residual = 0.0;   // |total_K + total_kappa - 2*pi|
    double tip_mass = 0.0;   // curvature mass recovered around the excluded tip disk
};

// A Riemannian 2-disk with strictly convex boundary, presented in one
// coordinate chart. Immutable after construction; every operation is pure.
class MetricChart {
public:
    virtual ~MetricChart() = default;

    virtual ChartKind kind() const = 0;

    virtual Mat2 metric(Vec2 p) const = 0;
    virtual Christoffel christoffel(Vec2 p) const = 0;
    virtual double gaussian_curvature(Vec2 p) const = 0;

    double metric_dot(Vec2 p, Vec2 a, Vec2 b) const { return metric(p).dot(a, b); }
    double metric_norm(Vec2 p, Vec2 v) const { return metric(p).norm(v); }

    // Boundary parametrization. The boundary parameter beta lives in
    // [0, 2pi): the polar angle for planar charts, the angle t for
    // revolution charts. It increases counterclockwise.
    double boundary_length() const { return boundary_length_; }
    virtual Vec2 boundary_point(double beta) const = 0;
    virtual double boundary_param(Vec2 p, double tol = 1e-7) const = 0;
    virtual Vec2 boundary_tangent_ccw(double beta) const = 0;  // g-unit
    Vec2 boundary_inward_normal(double beta) const;            // g-unit
    virtual double boundary_geodesic_curvature(double beta) const = 0;
    double boundary_geodesic_curvature_at(Vec2 p) const;

    // Metric arclength of the boundary from beta = 0, counterclockwise.
    virtual double boundary_arclength(double beta) const = 0;
    // ds/dbeta along the boundary.
    virtual double boundary_speed(double beta) const = 0;
    // Arclength of the counterclockwise arc from b1 to b2.
    double boundary_arc_ccw(double b1, double b2) const;
    // Shorter-arc distance between two boundary parameters.
    double boundary_arc_distance(double b1, double b2) const;

    // > 0 strictly inside the disk, 0 on the boundary, < 0 outside.
    virtual double interior_coordinate(Vec2 p) const = 0;
    // False where the chart's coordinates degenerate (revolution tip).
    virtual bool in_coordinate_domain(Vec2 p) const { (void)p; return true; }
    // Period of the second coordinate (2pi on revolution charts, 0 otherwise).
    virtual double period() const { return 0.0; }
    // Embedding used for chordal distances between chart points.
    virtual Vec3 chordal(Vec2 p) const = 0;
    // Projection of the chart onto the closed unit disk (identity for planar
    // charts); used to host planar constructions like half-plane cuts.
    virtual Vec2 disk_projection(Vec2 p) const { return p; }
    virtual Vec2 disk_unprojection(Vec2 q) const { return q; }

    virtual double suggested_step() const { return 1e-3; }

    // Integrates the geodesic ODE from p with g-unit tangent v by fixed-step
    // RK4, locating boundary crossings and self-intersections by bisection.
    Trajectory geodesic_trace(Vec2 p, Vec2 v, double max_len,
                              const TraceOptions& opts = {}) const;

    GaussBonnetReport gauss_bonnet_audit(int resolution = 0) const;

    double min_gaussian_curvature(int samples = 96) const;

protected:
    // Area integral of K; tip_mass receives the recovered mass of the
    // excluded tip disk (revolution charts only).
    virtual double curvature_integral(int resolution, double* tip_mass) const = 0;
    virtual int default_resolution() const { return 128; }

    void set_boundary_length(double l) { boundary_length_ = l; }
    void validate_convexity(int samples = 256) const;

private:
    double boundary_length_ = 0.0;
};

using ChartPtr = std::shared_ptr<const MetricChart>;

ChartPtr flat_unit_disk();

// Conformal disk e^{2 phi}(dx^2 + dy^2). phi must be smooth on a
// neighborhood of the closed unit disk. Derivative closures are optional;
// finite differences are used when they are absent.
ChartPtr conformal_disk(std::function<double(Vec2)> phi,
                        std::function<Vec2(Vec2)> grad_phi = nullptr,
                        std::function<double(Vec2)> laplacian_phi = nullptr);

// phi given as a parsed expression in x, y; derivatives by stencil.
ChartPtr conformal_disk_expr(const Expr& phi);

// phi sampled to an n x n grid and evaluated by bicubic interpolation.
ChartPtr conformal_disk_grid(const std::function<double(Vec2)>& phi, int n);

struct RevolutionProfile {
    double s = 0.0;  // profile domain is [s, 1]
    std::function<double(double)> r, dr, ddr;
    // Optional closed-form meridian arclength from u = s; computed by
    // quadrature when absent.
    std::function<double(double)> meridian_arclength;
    bool has_tip = true;  // r(s) == 0
    // u-values where profile derivatives jump; quadrature panels are split
    // there.
    std::vector<double> breakpoints;
    double concavity_slack = 1e-9;  // tolerance for the r'' <= 0 check
};

ChartPtr revolution_disk(RevolutionProfile profile);

class RevolutionDisk;  // defined in chart_revolution
const RevolutionDisk& as_revolution(const MetricChart& chart);

// Accessors needed by the cone development oracle and quadrature.
class RevolutionDisk : public MetricChart {
public:
    explicit RevolutionDisk(RevolutionProfile p);

    ChartKind kind() const override { return ChartKind::RevolutionDisk; }
    Mat2 metric(Vec2 p) const override;
    Christoffel christoffel(Vec2 p) const override;
    double gaussian_curvature(Vec2 p) const override;
    Vec2 boundary_point(double beta) const override;
    double boundary_param(Vec2 p, double tol) const override;
    Vec2 boundary_tangent_ccw(double beta) const override;
    double boundary_geodesic_curvature(double beta) const override;
    double boundary_arclength(double beta) const override;
    double boundary_speed(double beta) const override;
    double interior_coordinate(Vec2 p) const override;
    bool in_coordinate_domain(Vec2 p) const override;
    double period() const override { return 6.283185307179586476925286766559; }
    Vec3 chordal(Vec2 p) const override;
    Vec2 disk_projection(Vec2 p) const override;
    Vec2 disk_unprojection(Vec2 q) const override;
    double suggested_step() const override;

    double tip_param() const { return profile_.s; }
    bool has_tip() const { return profile_.has_tip; }
    double r_at(double u) const { return profile_.r(u); }
    double dr_at(double u) const { return profile_.dr(u); }
    // Meridian arclength from the tip parameter to u.
    double meridian_length(double u) const;
    double u_of_meridian_length(double rho) const;

protected:
    double curvature_integral(int resolution, double* tip_mass) const override;
    int default_resolution() const override { return 256; }

private:
    RevolutionProfile profile_;
    double r1_, dr1_, rho1_;
    std::vector<double> rho_table_;  // cumulative meridian length on u-grid
    double tip_guard_ = 1e-6;        // coordinate floor above s for tracing

    double grid_u(int i) const;
};

}  // namespace capgeo::geom
