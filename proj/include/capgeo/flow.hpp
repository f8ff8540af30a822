#pragma once

#include <iosfwd>
#include <vector>

#include "capgeo/chart.hpp"
#include "capgeo/polyline.hpp"

namespace capgeo::flow {

using geom::MetricChart;
using geom::Polyline;

struct FlowState {
    Polyline curve;
    double time = 0.0;
    std::vector<double> length_history;
    int step_count = 0;
    bool converged = false;
    double residual = 0.0;  // max discrete geodesic curvature at the last step
};

struct TraceRow {
    double time, length, max_curvature;
};

// One semi-implicit curve-shortening step with fixed endpoints: the second
// difference along the curve is treated implicitly (tridiagonal solve per
// coordinate), the metric's Christoffel term explicitly; vertices are then
// redistributed to quasi-uniform arclength spacing. Raises StepTooLarge when
// the metric length increases beyond 1e-9 slack, EmbeddednessLost when the
// curve crosses itself.
FlowState csf_step(const MetricChart& chart, const FlowState& st, double dt);

struct FlowOptions {
    int resample_n = 0;       // 0: pick from curve length
    double dt_factor = 0.25;  // dt = dt_factor * min spacing
    std::vector<TraceRow>* trace = nullptr;
};

// Runs the flow until the discrete geodesic curvature drops below tol or the
// time budget (default 50 * initial_length^2) is exhausted; endpoints are
// pinned bitwise.
FlowState csf_run(const MetricChart& chart, const Polyline& curve, double tol,
                  double max_time = -1.0, const FlowOptions& opts = {});

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

}  // namespace capgeo::flow
