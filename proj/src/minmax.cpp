#include "capgeo/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "capgeo/capillary.hpp"
#include "capgeo/errors.hpp"
#include "capgeo/flow.hpp"
#include "capgeo/parallel.hpp"

namespace capgeo::minmax {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

double boundary_diameter(const MetricChart& chart) {
    double best = 0.0;
    const int n = 128;
    std::vector<Vec3> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back(chart.chordal(chart.boundary_point(kTwoPi * i / n)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) best = std::max(best, (pts[i] - pts[j]).norm());
    return best;
}

double polyline_diameter(const MetricChart& chart, const geom::Polyline& poly) {
    double best = 0.0;
    std::vector<Vec3> pts;
    pts.reserve(poly.size());
    for (Vec2 p : poly) pts.push_back(chart.chordal(p));
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, (pts[i] - pts[j]).norm());
    return best;
}

}  // namespace

namespace {

geom::Polyline domain_loop(const MetricChart& chart, const curve::SimpleDomain& d,
                           bool complement) {
    return curve::closed_boundary(chart, complement ? d.flipped() : d, 128);
}

}  // namespace

double slice_distance(const MetricChart& chart, const curve::SimpleDomain& a,
                      const curve::SimpleDomain& b) {
    using curve::DomainState;
    if (a.state() == b.state() && !a.is_proper()) return 0.0;
    if (!a.is_proper() && !b.is_proper()) return boundary_diameter(chart);  // Empty vs Full
    if (!a.is_proper() || !b.is_proper()) {
        const auto& sentinel = a.is_proper() ? b : a;
        const auto& proper = a.is_proper() ? a : b;
        bool complement = sentinel.state() == DomainState::Full;
        geom::Polyline loop = domain_loop(chart, proper, complement);
        loop = geom::resample_uniform(chart, loop, 96);
        return polyline_diameter(chart, loop);
    }
    return geom::hausdorff_distance(chart, domain_loop(chart, a, false),
                                    domain_loop(chart, b, false), 5e-3);
}

// Cheap upper bound for same-family slices: resample both closed boundaries
// to corresponding vertices; the max matched distance dominates the Hausdorff
// distance of the piecewise-linear loops.
static double slice_distance_upper(const MetricChart& chart, const curve::SimpleDomain& a,
                                   const curve::SimpleDomain& b) {
    if (!a.is_proper() || !b.is_proper()) return slice_distance(chart, a, b);
    geom::Polyline la = geom::resample_uniform(chart, domain_loop(chart, a, false), 128);
    geom::Polyline lb = geom::resample_uniform(chart, domain_loop(chart, b, false), 128);
    double worst = 0.0;
    for (size_t i = 0; i < la.size(); ++i)
        worst = std::max(worst, (chart.chordal(la[i]) - chart.chordal(lb[i])).norm());
    return worst;
}

namespace {

// Alpha schedule: Empty, then half-widths from alpha_min to pi - alpha_min,
// then Full. alpha_min ~ 1/n keeps the sentinel jumps within 5/n.
std::vector<double> alpha_schedule(int grid_n) {
    std::vector<double> alphas(grid_n + 1);
    double amin = 1.0 / grid_n;
    alphas[0] = 0.0;
    alphas[grid_n] = kPi;
    for (int i = 1; i < grid_n; ++i)
        alphas[i] = amin + (kPi - 2 * amin) * (i - 1) / (grid_n - 2);
    return alphas;
}

// Fades the common flow budget to zero for slices that pass near a chart
// degeneracy (the revolution tip). The flow there is both stiff in these
// coordinates and strongly expanding across the cap, so neighboring slices
// would be torn apart; unflowed tip-crossing slices keep the family
// continuous while every slice still flows for a well-defined common-law
// time that depends continuously on the slice.
double tip_budget_factor(const MetricChart& chart, const geom::Polyline& poly) {
    if (chart.period() <= 0) return 1.0;
    double clearance = std::numeric_limits<double>::infinity();
    for (Vec2 p : poly) clearance = std::min(clearance, chart.disk_projection(p).norm());
    double w = std::clamp((clearance - 0.1) / 0.3, 0.0, 1.0);
    return w * w;
}

curve::SimpleDomain line_slice(const MetricChart& chart, double direction, double alpha,
                               double tighten_tol, double build_budget) {
    double b1 = wrap_angle_2pi(direction - alpha);
    double b2 = wrap_angle_2pi(direction + alpha);
    Vec2 pa = chart.boundary_point(b1);
    Vec2 pb = chart.boundary_point(b2);

    geom::Polyline init;
    if (chart.kind() == geom::ChartKind::FlatUnitDisk) {
        init = {pa, pb};
    } else {
        // Straight cut in disk-projection coordinates, pulled back to the
        // chart, then tightened to a geodesic by the fixed-endpoint flow.
        Vec2 qa = chart.disk_projection(pa);
        Vec2 qb = chart.disk_projection(pb);
        const int m = 96;
        init.reserve(m + 1);
        // The projection origin is a coordinate degeneracy (the revolution
        // tip); its metric neighborhood is tiny, so nudging the rare
        // center-crossing vertex onto a small guard circle moves the curve
        // by a comparable tiny amount and keeps the family continuous.
        const double guard = chart.period() > 0 ? 1.5e-3 : 0.0;
        for (int i = 0; i <= m; ++i) {
            double w = static_cast<double>(i) / m;
            Vec2 q = qa + (qb - qa) * w;
            if (guard > 0 && q.norm() < guard)
                q = q.norm() > 0 ? q * (guard / q.norm()) : Vec2{guard, 0.0};
            // Keep strictly inside: shrink toward the cut midpoint minutely.
            if (i != 0 && i != m) q = q * (1.0 - 1e-9);
            init.push_back(chart.disk_unprojection(q));
        }
        if (chart.period() > 0) {
            // Lift the periodic coordinate continuously along the chain, then
            // pin the exact boundary endpoints on the same branch.
            for (size_t i = 1; i < init.size(); ++i)
                init[i].y = init[i - 1].y + wrap_angle_diff(init[i].y, init[i - 1].y);
            double period = chart.period();
            pa.y += period * std::round((init.front().y - pa.y) / period);
            pb.y += period * std::round((init.back().y - pb.y) / period);
        }
        init.front() = pa;
        init.back() = pb;
    }
    if (init.size() >= 2 && chart.kind() != geom::ChartKind::FlatUnitDisk) {
        double base = build_budget > 0 ? build_budget : (chart.period() > 0 ? 0.01 : 0.05);
        double budget = base * tip_budget_factor(chart, init);
        if (budget > 0) {
            auto st = flow::csf_run(chart, init, tighten_tol, budget);
            init = st.curve;
        }
    }
    return curve::SimpleDomain::proper(chart, std::move(init), curve::Side::ArcFromFront);
}

}  // namespace

Sweepout build_line_sweepout(const MetricChart& chart, int arity, int grid_n,
                             const LineFamilyParams& params, int workers) {
    if (arity != 1 && arity != 2) throw Error("sweepout arity must be 1 or 2");
    if (grid_n < 32) throw Error("sweepout grid_n must be at least 32");

    auto alphas = alpha_schedule(grid_n);
    // The circle axis is sampled a bit denser than grid_n so that a one-row
    // direction step moves boundary points by less than the 5/grid_n
    // continuity allowance (a step of 2 pi / grid_n would exceed it).
    int rows = arity == 1 ? 1 : static_cast<int>(std::ceil(1.3 * grid_n));

    Sweepout sw;
    sw.arity = arity;
    sw.grid_n = grid_n;
    sw.slices.assign(rows, std::vector<curve::SimpleDomain>(grid_n + 1));

    parallel_for(rows, workers, [&](int si) {
        double dir = params.direction + (arity == 2 ? kTwoPi * si / rows : 0.0);
        auto& row = sw.slices[si];
        row[0] = curve::SimpleDomain::empty_domain();
        row[grid_n] = curve::SimpleDomain::full_domain();
        for (int ti = 1; ti < grid_n; ++ti)
            row[ti] = line_slice(chart, dir, alphas[ti], params.tighten_tol, params.build_budget);
    });

    verify_sweepout(chart, sw);
    return sw;
}

int endpoint_degree(const Sweepout& sw, int t_row) {
    if (sw.arity != 2) throw Error("endpoint_degree needs a 2-parameter sweepout");
    if (t_row <= 0 || t_row >= sw.grid_n) throw RowHasSentinel("row index touches the sentinels");
    int n = sw.rows();
    double total = 0.0;
    for (int s = 0; s < n; ++s) {
        const auto& a = sw.at(s, t_row);
        const auto& b = sw.at((s + 1) % n, t_row);
        if (!a.is_proper() || !b.is_proper())
            throw RowHasSentinel("row contains a sentinel slice");
        double d = wrap_angle_diff(b.endpoint_pair().first, a.endpoint_pair().first);
        if (!(std::fabs(d) < kPi))
            throw ContinuityCheckFailed("endpoint increment reached pi; row too coarse");
        total += d;
    }
    double deg = total / kTwoPi;
    int rounded = static_cast<int>(std::lround(deg));
    if (std::fabs(deg - rounded) > 0.05)
        throw DegreeCheckFailed("winding sum is not close to an integer");
    return rounded;
}

void verify_sweepout(const MetricChart& chart, const Sweepout& sw) {
    double tol = 5.0 / sw.grid_n;
    auto check_pair = [&](const curve::SimpleDomain& a, const curve::SimpleDomain& b,
                          const char* what) {
        double upper = slice_distance_upper(chart, a, b);
        if (upper <= tol) return;
        double exact = slice_distance(chart, a, b);
        if (exact > tol)
            throw ContinuityCheckFailed(std::string(what) + ": slices are " +
                                        std::to_string(exact) + " apart (allowed " +
                                        std::to_string(tol) + ")");
    };
    for (int s = 0; s < sw.rows(); ++s) {
        const auto& row = sw.slices[s];
        if (row.front().state() != curve::DomainState::Empty ||
            row.back().state() != curve::DomainState::Full)
            throw ContinuityCheckFailed("sweepout rows must run from Empty to Full");
        for (int t = 0; t + 1 <= sw.grid_n; ++t)
            check_pair(row[t], row[t + 1], "column step");
    }
    if (sw.arity == 2) {
        for (int s = 0; s < sw.rows(); ++s) {
            int s2 = (s + 1) % sw.rows();
            for (int t = 1; t < sw.grid_n; ++t)
                check_pair(sw.at(s, t), sw.at(s2, t), "row step");
        }
        for (int t : {1, sw.grid_n / 2, sw.grid_n - 1}) {
            if (endpoint_degree(sw, t) != 1)
                throw DegreeCheckFailed("endpoint map degree is not 1 on row " +
                                        std::to_string(t));
        }
    }
}

Sweepout tighten_sweepout(const MetricChart& chart, const Sweepout& sw, double flow_budget,
                          double theta, int workers) {
    Sweepout out = sw;
    int rows = out.rows();
    int cols = sw.grid_n + 1;
    parallel_for(rows * cols, workers, [&](int idx) {
        int s = idx / cols, t = idx % cols;
        const auto& dom = sw.at(s, t);
        if (!dom.is_proper()) return;
        double budget = flow_budget;
        if (chart.period() > 0) {
            double factor = tip_budget_factor(chart, dom.relative_boundary());
            if (factor == 0.0) return;  // tip-hugging slice: leave untouched
            budget = (budget > 0 ? budget : 0.01) * factor;
        }
        double before = curve::l_theta(chart, dom, theta).l_theta;
        auto st = flow::csf_run(chart, dom.relative_boundary(), 1e-6, budget);
        auto tightened = curve::SimpleDomain::proper(chart, st.curve, dom.side());
        double after = curve::l_theta(chart, tightened, theta).l_theta;
        if (after > before + 1e-9)
            throw Error("tighten_sweepout: L^theta increased on slice (" + std::to_string(s) +
                        "," + std::to_string(t) + ")");
        out.slices[s][t] = std::move(tightened);
    });
    verify_sweepout(chart, out);
    return out;
}

double sup_l_theta(const MetricChart& chart, const Sweepout& sw, double theta) {
    double best = 0.0;
    for (const auto& row : sw.slices)
        for (const auto& dom : row)
            best = std::max(best, curve::l_theta(chart, dom, theta).l_theta);
    return best;
}

WidthReport estimate_widths(const MetricChart& chart, double theta, int grid_n,
                            const WidthParams& params, int workers) {
    if (!(theta > 0 && theta < kPi / 2)) throw InvalidTheta("estimate_widths: theta");
    WidthReport rep;
    rep.theta = theta;
    rep.lower_bound = std::cos(theta) * chart.boundary_length();

    // A common finite tightening budget on curved charts keeps families
    // continuous across geodesic bifurcations; on the flat disk slices are
    // exact geodesics and the budget is moot.
    double budget = params.flow_budget;
    if (budget <= 0 && chart.kind() != geom::ChartKind::FlatUnitDisk)
        budget = chart.period() > 0 ? 0.01 : 0.05;
    std::ostringstream diag;

    double w1 = std::numeric_limits<double>::infinity();
    for (double dir : params.directions_1) {
        auto sw = build_line_sweepout(chart, 1, grid_n, {dir, 1e-6}, workers);
        auto tight = tighten_sweepout(chart, sw, budget, theta, workers);
        double sup = sup_l_theta(chart, tight, theta);
        rep.family_sups_1.push_back(sup);
        w1 = std::min(w1, sup);
    }
    rep.w1_upper = w1;

    double w2 = std::numeric_limits<double>::infinity();
    for (double dir : params.directions_2) {
        auto sw = build_line_sweepout(chart, 2, grid_n, {dir, 1e-6}, workers);
        auto tight = tighten_sweepout(chart, sw, budget, theta, workers);
        double sup = sup_l_theta(chart, tight, theta);
        rep.family_sups_2.push_back(sup);
        if (sup < w2) {
            w2 = sup;
            rep.value_grid.assign(tight.rows(), std::vector<double>(grid_n + 1, 0.0));
            for (int s = 0; s < tight.rows(); ++s)
                for (int t = 0; t <= grid_n; ++t)
                    rep.value_grid[s][t] = curve::l_theta(chart, tight.at(s, t), theta).l_theta;
        }
    }
    rep.w2_upper = w2;

    // A 1-family is a column restriction of the 2-family, so the estimates
    // must nest; surface a diagnostic rather than silently accepting.
    if (!(rep.lower_bound < rep.w1_upper) || rep.w1_upper > rep.w2_upper + 1e-9) {
        rep.ordering_ok = false;
        diag << "ordering violated: lower=" << rep.lower_bound << " w1=" << rep.w1_upper
             << " w2=" << rep.w2_upper << "; ";
    }

    try {
        auto found = capillary::find_capillary_geodesics(chart, theta, 32);
        for (const auto& g : found.geodesics)
            rep.candidate_critical_values.push_back(g.measure.l_theta);
        std::sort(rep.candidate_critical_values.begin(), rep.candidate_critical_values.end());
        if (found.s1_family) diag << "rotationally degenerate family of critical chords; ";
    } catch (const NoneFound& e) {
        diag << "no capillary geodesic located: " << e.what() << "; ";
    }
    rep.diagnostics = diag.str();
    return rep;
}

}  // namespace capgeo::minmax
