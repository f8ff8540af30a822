#pragma once

#include <string>
#include <vector>

#include "capgeo/chart.hpp"
#include "capgeo/domain.hpp"

namespace capgeo::minmax {

using geom::MetricChart;

// Discrete 1- or 2-parameter family of simple domains. Arity 1 holds a single
// row; arity 2 holds grid_n rows indexed by the circle parameter s, each a
// column over t. Boundary slices are the Empty and Full sentinels.
struct Sweepout {
    int arity = 1;
    int grid_n = 0;
    std::vector<std::vector<curve::SimpleDomain>> slices;  // [s][t], t = 0..grid_n

    const curve::SimpleDomain& at(int s, int t) const { return slices[s][t]; }
    int rows() const { return static_cast<int>(slices.size()); }
};

// Distance used for the discrete continuity check: Hausdorff between closed
// domain boundaries for proper pairs; a sentinel against a proper domain
// compares to the diameter of the (complementary) domain.
double slice_distance(const MetricChart& chart, const curve::SimpleDomain& a,
                      const curve::SimpleDomain& b);

struct LineFamilyParams {
    double direction = 0.0;  // pole of the half-plane cuts (arity 1)
    double tighten_tol = 1e-6;
    // Common flow time applied to each slice during construction. Finite by
    // default on curved charts: slices straddling a geodesic bifurcation
    // diverge under per-slice full convergence, while a common finite budget
    // keeps the family continuous. Flat-chart slices are already geodesics.
    double build_budget = -1.0;
};

// Half-plane-cut family: cut boundary circles at angular half-width alpha
// sweeping (0, pi), relative boundaries replaced by flow geodesics between
// the cut's boundary intersection points. Verifies every sweepout invariant.
Sweepout build_line_sweepout(const MetricChart& chart, int arity, int grid_n,
                             const LineFamilyParams& params = {}, int workers = 1);

// Winding number of s -> e(Phi_{s,t}) computed by lifting boundary-parameter
// increments (each must stay below pi).
int endpoint_degree(const Sweepout& sw, int t_row);

void verify_sweepout(const MetricChart& chart, const Sweepout& sw);

// Applies the fixed-endpoint flow to the interior curve of every proper
// slice; per-slice L^theta never increases and the endpoint map (hence the
// degree) is untouched.
Sweepout tighten_sweepout(const MetricChart& chart, const Sweepout& sw, double flow_budget,
                          double theta, int workers = 1);

struct WidthReport {
    double theta = 0.0;
    double w1_upper = 0.0;
    double w2_upper = 0.0;
    double lower_bound = 0.0;  // cos(theta) |boundary|
    std::vector<double> candidate_critical_values;
    std::vector<double> family_sups_1, family_sups_2;
    bool ordering_ok = true;  // lower < w1 <= w2 (+slack) for nested families
    std::string diagnostics;
    // sup L^theta per slice of the best tightened 2-family, for plotting
    std::vector<std::vector<double>> value_grid;
};

struct WidthParams {
    std::vector<double> directions_1{0.0, 1.1};
    std::vector<double> directions_2{0.0};
    double flow_budget = -1.0;  // default per flow module
};

double sup_l_theta(const MetricChart& chart, const Sweepout& sw, double theta);

WidthReport estimate_widths(const MetricChart& chart, double theta, int grid_n,
                            const WidthParams& params = {}, int workers = 1);

}  // namespace capgeo::minmax
