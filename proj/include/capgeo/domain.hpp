#pragma once

#include <iosfwd>
#include <string>
#include <utility>

#include "capgeo/chart.hpp"
#include "capgeo/polyline.hpp"

namespace capgeo::curve {

using geom::MetricChart;
using geom::Polyline;

enum class DomainState { Empty, Full, Proper };

// Which polyline endpoint starts the wetted boundary arc: the arc of the
// disk boundary belonging to the domain runs counterclockwise from q1 to q2,
// and q1 sits at the polyline's front or back.
enum class Side { ArcFromFront, ArcFromBack };

struct CapillaryMeasure {
    double interior_len = 0.0;
    double boundary_len = 0.0;
    double l_theta = 0.0;
};

struct FirstVariation {
    double max_interior_H = 0.0;
    std::pair<double, double> angle_defect{0.0, 0.0};
};

// A simple domain: the empty set, the full disk, or a region bounded by an
// embedded relative-boundary polyline with both endpoints on the disk
// boundary. Immutable value type.
class SimpleDomain {
public:
    static SimpleDomain empty_domain();
    static SimpleDomain full_domain();
    // Validates embeddedness (tolerance 1e-10 in chart coordinates), endpoint
    // placement, and strict interiority of inner vertices; resamples to
    // quasi-uniform arclength spacing when the input spacing is uneven.
    static SimpleDomain proper(const MetricChart& chart, Polyline relative_boundary, Side side);

    DomainState state() const { return state_; }
    bool is_proper() const { return state_ == DomainState::Proper; }
    const Polyline& relative_boundary() const;
    Side side() const;
    SimpleDomain flipped() const;

    // Ordered endpoint pair (q1, q2): the wetted arc runs counterclockwise
    // from q1 to q2. Throws NoEndpoints on sentinels.
    std::pair<double, double> endpoint_pair() const;
    double endpoint_function() const { return endpoint_pair().first; }

    double front_param() const;
    double back_param() const;

private:
    DomainState state_ = DomainState::Empty;
    Polyline poly_;
    Side side_ = Side::ArcFromFront;
    double beta_front_ = 0.0, beta_back_ = 0.0;
};

CapillaryMeasure l_theta(const MetricChart& chart, const SimpleDomain& dom, double theta);

std::pair<double, double> endpoint_pair(const SimpleDomain& dom);

// Contact angles theta_i in (0, pi) with <eta, nu_bar>_g = -cos(theta_i),
// eta the outward curve tangent at the endpoint and nu_bar the boundary
// tangent leaving the wetted arc.
std::pair<double, double> contact_angles(const MetricChart& chart, const SimpleDomain& dom);

FirstVariation first_variation_residual(const MetricChart& chart, const SimpleDomain& dom,
                                        double theta);

enum class FMode { Interior, Capillary };

// Fixed-dictionary surrogate for the varifold bounded-Lipschitz distance:
// sup over 64 Lipschitz-normalized test functions on position x direction of
// the difference of integrals. A lower bound of the true distance; vanishes
// iff the discrete measures agree on the dictionary.
double f_distance(const MetricChart& chart, const SimpleDomain& a, const SimpleDomain& b,
                  FMode mode, double theta = 0.0);

double hausdorff(const MetricChart& chart, const Polyline& a, const Polyline& b);

// Closed boundary of the domain (relative boundary plus wetted arc) as a
// chart polyline; used for slice distances and containment.
Polyline closed_boundary(const MetricChart& chart, const SimpleDomain& dom,
                         int arc_samples = 256);

bool domain_contains(const MetricChart& chart, const SimpleDomain& dom, Vec2 p);

// header names the coordinate columns: "x,y" on planar charts, "u,t" on
// revolution charts.
void write_domain_csv(std::ostream& os, const SimpleDomain& dom, const char* header = "x,y");
SimpleDomain read_domain_csv(const MetricChart& chart, std::istream& is);

void write_polyline_csv(std::ostream& os, const Polyline& poly, const char* header = "x,y");
Polyline read_polyline_csv(std::istream& is);

inline const char* csv_header_for(const MetricChart& chart) {
    return chart.kind() == geom::ChartKind::RevolutionDisk ? "u,t" : "x,y";
}

}  // namespace capgeo::curve
