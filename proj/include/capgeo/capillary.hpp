#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "capgeo/chart.hpp"
#include "capgeo/domain.hpp"

namespace capgeo::capillary {

using geom::MetricChart;

struct ShotResult {
    geom::Trajectory trajectory;
    std::optional<double> arrival_param;  // boundary parameter, when it lands
    std::optional<double> arrival_angle;  // angle to the ccw boundary tangent
    bool self_intersected = false;
};

// Launches a geodesic from the boundary point at parameter p with interior
// angle alpha in (0, pi) to the counterclockwise boundary tangent.
ShotResult shoot_from_boundary(const MetricChart& chart, double p, double alpha, double max_len);

// Shoots at alpha = theta and returns (arrival angle - theta). Throws
// NoArrival when the shot self-intersects or runs out of length.
double capillary_defect(const MetricChart& chart, double p, double theta, double max_len = 0.0);

struct CapillaryGeodesic {
    curve::SimpleDomain domain;       // the stationary side
    curve::SimpleDomain dual_domain;  // the complementary side of the same chord
    double theta = 0.0;
    double basepoint = 0.0;  // launch boundary parameter
    curve::CapillaryMeasure measure;
    curve::FirstVariation residual;
};

struct FindResult {
    std::vector<CapillaryGeodesic> geodesics;
    bool s1_family = false;  // defect vanished at every sampled basepoint
    std::string diagnostics;
};

// Scans capillary_defect over grid_n basepoints, isolates sign changes and
// refines by bisection. Throws NoneFound (with diagnostics in the message)
// when no geodesic passes the residual thresholds.
FindResult find_capillary_geodesics(const MetricChart& chart, double theta, int grid_n);

struct LassoRecord {
    double basepoint = 0.0;
    double launch_angle = 0.0;  // alpha_0
    double arrival_angle = 0.0; // alpha_L
    double length = 0.0;
    double eq_residual = 0.0;   // |cos(alpha_0) - cos(alpha_L)|
    bool critical = false;
    geom::Polyline points;
};

struct LassoScanOptions {
    int basepoint_grid = 48;
    int angle_grid = 96;
    double close_tol = 1e-3;      // boundary-arc closing tolerance
    double critical_tol = 1e-5;
    int workers = 1;
};

// Scans (basepoint x launch angle), flags trajectories that return to their
// basepoint with total length within the bound, refines, and classifies
// critical lassos (equal launch and arrival angles). An empty list is
// numerical evidence of absence, not a proof.
std::vector<LassoRecord> find_critical_lassos(const MetricChart& chart, double length_bound,
                                              const LassoScanOptions& opts = {});

enum class StarVerdict { ProvenByGB, NumericallyClear, LassoFound };

struct StarReport {
    bool gb_sufficient = false;
    bool scan_found_lasso = false;
    StarVerdict verdict = StarVerdict::NumericallyClear;
    double min_K = 0.0;
    double total_kappa = 0.0;
    double bound_used = 0.0;
};

// Sufficient-condition check (min K >= 0 and total boundary turning >= pi)
// plus a lasso scan with the given length bound (computed from a coarse
// width estimate when absent).
StarReport star_hypothesis_check(const MetricChart& chart, double theta,
                                 std::optional<double> length_bound = {}, int workers = 1);

struct SpectrumReport {
    std::vector<double> eigenvalues;  // ascending
    int index = 0;
    int nullity = 0;
    double zero_tol = 0.0;
    std::vector<double> nodes;                      // arclength positions
    std::vector<std::vector<double>> eigenfunctions;  // first three
};

// Morse index and nullity of the second-variation form
//   Q(f,f) = int(f'^2 - K f^2) ds - (1/sin theta)(kappa(p1) f(p1)^2 + kappa(p2) f(p2)^2)
// discretized with piecewise-linear elements along the geodesic.
SpectrumReport morse_index(const MetricChart& chart, const CapillaryGeodesic& geo,
                           int nodes = 480);

// Q(f, f) evaluated on the discretization for a caller-supplied profile
// f(arclength); used by tests against closed-form variations.
double stability_form(const MetricChart& chart, const CapillaryGeodesic& geo,
                      const std::function<double(double)>& f, int nodes = 480);

}  // namespace capgeo::capillary
