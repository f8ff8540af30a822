#pragma once

#include <optional>

#include "capgeo/capillary.hpp"
#include "capgeo/chart.hpp"

namespace capgeo::cone {

// Rounded Euclidean cone: exact cone r(u) = c u outside the blend point u0,
// closed by a spherical-cap arc that meets the axis with a vertical tangent
// and matches the cone C^1 at u0. The boundary turning is k and the cap
// carries curvature mass 2 pi - k, both in closed form.
struct SharpnessDisk {
    double k = 0.0;
    double c = 0.0;           // cone slope k / sqrt(4 pi^2 - k^2)
    double u0 = 0.0;          // blend point cos(k/2) / 2
    double s = 0.0;           // axis point of the cap
    double cap_radius = 0.0;  // radius of the blend circle in the (u, r) plane
    double cap_center = 0.0;  // its center on the u axis
    geom::ChartPtr chart;

    double sector_angle() const;          // development angle; equals k
    double development_radius(double u) const;  // u sqrt(1 + c^2)
    double lasso_length() const;          // 2 ell(1) sin(k/2)
};

SharpnessDisk build_sharpness_disk(double k);

struct DevelopedShot {
    geom::Trajectory trajectory;        // chart (u, t) coordinates, t lifted
    double min_development_radius = 0.0;
    double development_angle = 0.0;     // signed total angle subtended
    std::optional<double> arrival_param;
    std::optional<double> arrival_angle;
    bool self_intersects = false;
    double length = 0.0;
};

// Develops the cone isometrically onto a planar sector and maps the straight
// segment back to the chart; exact up to floating point. Declines shots that
// leave the cone region u >= u0 (LeavesConeRegion).
DevelopedShot unroll_geodesic_oracle(const SharpnessDisk& disk, double boundary_param,
                                     double alpha);

struct SharpnessReport {
    capillary::LassoRecord lasso;       // located by ODE shooting
    double oracle_lasso_length = 0.0;   // closed form via the development
    double theta = 0.0;                 // k/2 + epsilon
    bool all_shots_self_intersect = false;
    int shots = 0;
    double symmetry_spread = 0.0;  // max deviation of per-basepoint results
};

// Confirms the critical lasso at contact angle k/2 by both the development
// oracle and ODE shooting, then shoots at theta = k/2 + epsilon from many
// basepoints and reports whether every shot self-intersects.
SharpnessReport verify_sharpness(const SharpnessDisk& disk, double epsilon, int basepoints = 64,
                                 int workers = 1);

}  // namespace capgeo::cone
