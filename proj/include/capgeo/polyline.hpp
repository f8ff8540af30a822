#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "capgeo/chart.hpp"
#include "capgeo/vec2.hpp"

namespace capgeo::geom {

// Metric arclength of a chart polyline (trapezoidal metric weights per
// segment).
double g_length(const MetricChart& chart, const Polyline& poly);
std::vector<double> cumulative_g_arclength(const MetricChart& chart, const Polyline& poly);

// Resamples to n+1 vertices at quasi-uniform metric arclength spacing.
// Endpoints are preserved bitwise; interior vertices lie on the input
// polyline, so the length never increases.
Polyline resample_uniform(const MetricChart& chart, const Polyline& poly, int n);

// Discrete geodesic-curvature vector at interior vertex i (covariant second
// difference with respect to metric arclength).
Vec2 curvature_vector(const MetricChart& chart, const Polyline& poly, size_t i);
// max over interior vertices of |H|_g.
double max_geodesic_curvature(const MetricChart& chart, const Polyline& poly);

struct SegmentHit {
    size_t a = 0, b = 0;  // segment indices
    Vec2 point;           // chart coordinates of the crossing
};

// Uniform-grid index over polyline segments supporting crossing queries.
// On charts with a periodic second coordinate the y-values are compared
// modulo the period.
class SegmentGrid {
public:
    SegmentGrid(double cell, double period);

    size_t size() const { return segs_.size(); }
    void insert(Vec2 a, Vec2 b);
    // Strict proper crossing of [a,b] against stored segments; segments with
    // index >= skip_from are ignored (used to skip adjacent trace segments).
    std::optional<SegmentHit> first_crossing(Vec2 a, Vec2 b, size_t skip_from) const;
    // Any stored pair of non-adjacent segments closer than tol, or properly
    // crossing. Used for embeddedness checks.
    bool any_contact(double tol) const;

private:
    struct Seg { Vec2 a, b; };
    double cell_, period_;
    std::vector<Seg> segs_;
    std::unordered_map<int64_t, std::vector<uint32_t>> cells_;

    void cells_for(Vec2 a, Vec2 b, std::vector<int64_t>& out) const;
};

// True when a proper crossing exists between the open segments, writing the
// crossing point. Touching at shared endpoints does not count.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, Vec2* point);
double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

// Embeddedness of a polyline in chart coordinates: no pair of non-adjacent
// segments crosses or comes within tol.
bool polyline_self_intersects(const MetricChart& chart, const Polyline& poly,
                              double tol = 1e-10);

// Symmetric Hausdorff distance between two polylines under the chart's
// chordal embedding, with dense resampling (default step 1e-3).
double hausdorff_distance(const MetricChart& chart, const Polyline& a,
                          const Polyline& b, double step = 1e-3);

}  // namespace capgeo::geom
