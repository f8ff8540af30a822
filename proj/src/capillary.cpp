#include "capgeo/capillary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "capgeo/errors.hpp"
#include "capgeo/flow.hpp"
#include "capgeo/minmax.hpp"
#include "capgeo/parallel.hpp"

namespace capgeo::capillary {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

double default_cap(const MetricChart& chart) { return 2.0 * chart.boundary_length(); }

}  // namespace

ShotResult shoot_from_boundary(const MetricChart& chart, double p, double alpha, double max_len) {
    if (!(alpha > 0 && alpha < kPi))
        throw Error("shoot_from_boundary: alpha must lie strictly in (0, pi)");
    if (max_len <= 0) max_len = default_cap(chart);
    Vec2 origin = chart.boundary_point(p);
    Vec2 t = chart.boundary_tangent_ccw(p);
    Vec2 n = chart.boundary_inward_normal(p);
    Vec2 dir = t * std::cos(alpha) + n * std::sin(alpha);
    dir = dir / chart.metric(origin).norm(dir);

    ShotResult out;
    out.trajectory = chart.geodesic_trace(origin, dir, max_len);
    out.self_intersected = out.trajectory.hit == geom::HitType::SelfIntersection;
    if (out.trajectory.hit == geom::HitType::BoundaryHit) {
        double q = *out.trajectory.boundary_hit_param;
        out.arrival_param = q;
        Vec2 tq = chart.boundary_tangent_ccw(q);
        Vec2 v = out.trajectory.terminal_tangent;
        Vec2 pq = chart.boundary_point(q);
        double c = chart.metric(pq).dot(v, tq) / chart.metric(pq).norm(v);
        out.arrival_angle = std::acos(std::clamp(c, -1.0, 1.0));
    }
    return out;
}

double capillary_defect(const MetricChart& chart, double p, double theta, double max_len) {
    if (!(theta > 0 && theta < kPi / 2)) throw InvalidTheta("capillary_defect: theta not in (0, pi/2)");
    ShotResult shot = shoot_from_boundary(chart, p, theta, max_len);
    if (!shot.arrival_angle) {
        throw NoArrival(shot.self_intersected
                            ? "shot self-intersected before returning to the boundary"
                            : "shot exceeded the length cap");
    }
    return *shot.arrival_angle - theta;
}

namespace {

// Builds the domain pair for a chord traced from the boundary; the stationary
// side is recognized by its vanishing angle defects.
CapillaryGeodesic make_geodesic_record(const MetricChart& chart, double basepoint, double theta,
                                       const geom::Trajectory& traj) {
    geom::Polyline poly = traj.points;
    // Pin the end vertices onto the boundary exactly, staying on the lift
    // branch of the traced chain on periodic charts.
    Vec2 pin_back = chart.boundary_point(*traj.boundary_hit_param);
    Vec2 pin_front = chart.boundary_point(basepoint);
    if (chart.period() > 0) {
        double period = chart.period();
        pin_back.y += period * std::round((poly.back().y - pin_back.y) / period);
        pin_front.y += period * std::round((poly.front().y - pin_front.y) / period);
    }
    poly.back() = pin_back;
    poly.front() = pin_front;
    int n = std::clamp(static_cast<int>(std::ceil(traj.length / 0.005)), 64, 512);
    poly = geom::resample_uniform(chart, poly, n);
    // Settle the sampled trace onto the discrete geodesic: the raw samples
    // carry integrator corner noise that the residual operator amplifies.
    flow::FlowOptions fopts;
    fopts.resample_n = n;
    auto settled = flow::csf_run(chart, poly, 5e-7, 5.0, fopts);
    poly = settled.curve;

    curve::SimpleDomain a = curve::SimpleDomain::proper(chart, poly, curve::Side::ArcFromBack);
    curve::SimpleDomain b = a.flipped();
    auto fa = curve::first_variation_residual(chart, a, theta);
    auto fb = curve::first_variation_residual(chart, b, theta);
    double da = std::max(fa.angle_defect.first, fa.angle_defect.second);
    double db = std::max(fb.angle_defect.first, fb.angle_defect.second);

    CapillaryGeodesic geo;
    geo.theta = theta;
    geo.basepoint = basepoint;
    if (da <= db) {
        geo.domain = a;
        geo.dual_domain = b;
        geo.residual = fa;
    } else {
        geo.domain = b;
        geo.dual_domain = a;
        geo.residual = fb;
    }
    geo.measure = curve::l_theta(chart, geo.domain, theta);
    return geo;
}

}  // namespace

FindResult find_capillary_geodesics(const MetricChart& chart, double theta, int grid_n) {
    if (grid_n < 16) throw Error("find_capillary_geodesics: grid_n must be at least 16");
    if (!(theta > 0 && theta < kPi / 2)) throw InvalidTheta("theta not in (0, pi/2)");

    struct Sample {
        double beta;
        std::optional<double> defect;
    };
    std::vector<Sample> samples(grid_n);
    int invalid = 0;
    for (int i = 0; i < grid_n; ++i) {
        double beta = kTwoPi * i / grid_n;
        samples[i].beta = beta;
        try {
            samples[i].defect = capillary_defect(chart, beta, theta);
        } catch (const NoArrival&) {
            ++invalid;
        }
    }

    FindResult out;
    const double fv_tol = 1e-5;

    bool all_small = invalid == 0;
    for (const auto& s : samples)
        if (!s.defect || std::fabs(*s.defect) > 1e-6) all_small = false;

    auto emit = [&](double beta) {
        ShotResult shot = shoot_from_boundary(chart, beta, theta, 0.0);
        if (!shot.arrival_param) return false;
        // A chord closing onto its own basepoint is a lasso, not a simple
        // domain boundary.
        if (chart.boundary_arc_distance(*shot.arrival_param, beta) <
            1e-6 * chart.boundary_length())
            return false;
        CapillaryGeodesic geo = make_geodesic_record(chart, beta, theta, shot.trajectory);
        if (geo.residual.max_interior_H > fv_tol || geo.residual.angle_defect.first > fv_tol ||
            geo.residual.angle_defect.second > fv_tol)
            return false;
        out.geodesics.push_back(std::move(geo));
        return true;
    };

    if (all_small) {
        out.s1_family = true;
        for (const auto& s : samples) emit(s.beta);
        if (!out.geodesics.empty()) {
            out.diagnostics = "degenerate rotational family: defect vanished at every basepoint";
            return out;
        }
    } else {
        for (int i = 0; i < grid_n; ++i) {
            const auto& s0 = samples[i];
            const auto& s1 = samples[(i + 1) % grid_n];
            if (!s0.defect || !s1.defect) continue;
            if (*s0.defect == 0.0) {
                emit(s0.beta);
                continue;
            }
            if (*s0.defect * *s1.defect >= 0.0) continue;
            double lo = s0.beta, hi = s0.beta + kTwoPi / grid_n;
            double flo = *s0.defect;
            while (hi - lo > 1e-8) {
                double mid = 0.5 * (lo + hi);
                double fm;
                try {
                    fm = capillary_defect(chart, mid, theta);
                } catch (const NoArrival&) {
                    break;
                }
                if (flo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            emit(0.5 * (lo + hi));
        }
    }

    if (out.geodesics.empty()) {
        std::ostringstream d;
        d << "no capillary geodesic at theta = " << theta << ": " << invalid << "/" << grid_n
          << " shots had no arrival";
        if (invalid < grid_n) d << ", defects did not cross zero within residual thresholds";
        throw NoneFound(d.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Critical lassos.

namespace {

struct LassoProbe {
    bool valid = false;       // boundary arrival within the length bound
    double gap = 0.0;         // signed boundary-parameter gap to the basepoint
    double length = 0.0;
    double arrival_angle = 0.0;
};

LassoProbe probe(const MetricChart& chart, double beta, double alpha, double bound) {
    LassoProbe pr;
    ShotResult shot;
    try {
        shot = shoot_from_boundary(chart, beta, alpha, bound * 1.05);
    } catch (const LeftChart&) {
        return pr;  // radial shots through the tip are unresolvable, not lassos
    }
    if (!shot.arrival_param || shot.trajectory.length > bound + 1e-9) return pr;
    pr.valid = true;
    pr.gap = wrap_angle_diff(*shot.arrival_param, beta);
    pr.length = shot.trajectory.length;
    pr.arrival_angle = *shot.arrival_angle;
    return pr;
}

}  // namespace

std::vector<LassoRecord> find_critical_lassos(const MetricChart& chart, double length_bound,
                                              const LassoScanOptions& opts) {
    if (!(length_bound > 0)) throw Error("find_critical_lassos: length bound must be positive");
    std::vector<LassoRecord> found;
    if (length_bound < 1e-4) return found;  // below any resolvable closed trajectory

    const int nb = opts.basepoint_grid, na = opts.angle_grid;
    const double alpha_lo = 0.02, alpha_hi = kPi - 0.02;

    // Shots are independent; scan rows in parallel, then reduce in order.
    std::vector<std::vector<LassoProbe>> probes(nb);
    parallel_for(nb, opts.workers, [&](int bi) {
        auto& row = probes[bi];
        row.resize(na);
        double beta = kTwoPi * bi / nb;
        for (int ai = 0; ai < na; ++ai) {
            double alpha = alpha_lo + (alpha_hi - alpha_lo) * ai / (na - 1);
            row[ai] = probe(chart, beta, alpha, length_bound);
        }
    });

    auto close_enough = [&](const LassoProbe& pr) {
        return pr.valid && std::fabs(pr.gap) * chart.boundary_speed(0.0) < opts.close_tol;
    };

    for (int bi = 0; bi < nb; ++bi) {
        double beta = kTwoPi * bi / nb;
        for (int ai = 0; ai + 1 < na; ++ai) {
            double a0 = alpha_lo + (alpha_hi - alpha_lo) * ai / (na - 1);
            double a1 = alpha_lo + (alpha_hi - alpha_lo) * (ai + 1) / (na - 1);
            const LassoProbe& p0 = probes[bi][ai];
            const LassoProbe& p1 = probes[bi][ai + 1];

            double root = std::numeric_limits<double>::quiet_NaN();
            if (p0.valid && p1.valid && p0.gap * p1.gap < 0.0 &&
                std::fabs(p0.gap) + std::fabs(p1.gap) < 1.0) {
                // Regula falsi on the signed gap, run down to the bracket
                // floor so the recorded angles are refinement-limited.
                double lo = a0, hi = a1, glo = p0.gap, ghi = p1.gap;
                bool closed = false;
                double best_mid = 0.5 * (a0 + a1);
                for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
                    double mid = (lo * ghi - hi * glo) / (ghi - glo);
                    mid = std::clamp(mid, lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
                    LassoProbe pm = probe(chart, beta, mid, length_bound);
                    if (!pm.valid) break;
                    if (close_enough(pm)) {
                        closed = true;
                        best_mid = mid;
                    }
                    if (glo * pm.gap <= 0.0) {
                        hi = mid;
                        ghi = pm.gap;
                    } else {
                        lo = mid;
                        glo = pm.gap;
                    }
                }
                if (closed) root = best_mid;
            } else if (p0.valid != p1.valid) {
                // Gap shrinking toward the validity edge (grazing closures sit
                // exactly on the self-intersection threshold).
                double lo = p0.valid ? a0 : a1;
                double hi = p0.valid ? a1 : a0;  // invalid side
                LassoProbe best = p0.valid ? p0 : p1;
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (lo + hi);
                    LassoProbe pm = probe(chart, beta, mid, length_bound);
                    if (pm.valid) {
                        lo = mid;
                        best = pm;
                    } else {
                        hi = mid;
                    }
                    if (std::fabs(hi - lo) < 1e-12) break;
                }
                if (close_enough(best)) root = lo;
            }
            if (!std::isnan(root)) {
                ShotResult shot = shoot_from_boundary(chart, beta, root, length_bound * 1.05);
                if (!shot.arrival_param) continue;
                LassoRecord rec;
                rec.basepoint = beta;
                rec.launch_angle = root;
                rec.arrival_angle = *shot.arrival_angle;
                rec.length = shot.trajectory.length;
                rec.eq_residual = std::fabs(std::cos(rec.launch_angle) - std::cos(rec.arrival_angle));
                rec.critical = rec.eq_residual < opts.critical_tol;
                rec.points = shot.trajectory.points;
                bool dup = false;
                for (const auto& other : found) {
                    if (std::fabs(other.length - rec.length) < 1e-4 &&
                        (std::fabs(other.launch_angle - rec.launch_angle) < 1e-3 ||
                         std::fabs((kPi - other.launch_angle) - rec.launch_angle) < 1e-3))
                        dup = true;
                }
                if (!dup) found.push_back(std::move(rec));
            }
        }
    }
    return found;
}

StarReport star_hypothesis_check(const MetricChart& chart, double theta,
                                 std::optional<double> length_bound, int workers) {
    StarReport rep;
    rep.min_K = chart.min_gaussian_curvature();
    rep.total_kappa = chart.gauss_bonnet_audit().total_kappa;
    rep.gb_sufficient = rep.min_K >= -1e-9 && rep.total_kappa >= kPi - 1e-6;

    if (length_bound) {
        rep.bound_used = *length_bound;
    } else {
        auto widths = minmax::estimate_widths(chart, theta, 32, {}, workers);
        rep.bound_used = 2.0 * widths.w2_upper;
    }
    LassoScanOptions opts;
    opts.workers = workers;
    auto lassos = find_critical_lassos(chart, rep.bound_used, opts);
    for (const auto& l : lassos)
        if (l.critical) rep.scan_found_lasso = true;

    if (rep.gb_sufficient && !rep.scan_found_lasso)
        rep.verdict = StarVerdict::ProvenByGB;
    else if (rep.scan_found_lasso)
        rep.verdict = StarVerdict::LassoFound;
    else
        rep.verdict = StarVerdict::NumericallyClear;
    return rep;
}

}  // namespace capgeo::capillary
