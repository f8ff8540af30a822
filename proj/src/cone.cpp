#include "capgeo/cone.hpp"

#include <algorithm>
#include <cmath>

#include "capgeo/errors.hpp"
#include "capgeo/parallel.hpp"

namespace capgeo::cone {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

double SharpnessDisk::sector_angle() const { return kTwoPi * c / std::sqrt(1.0 + c * c); }
double SharpnessDisk::development_radius(double u) const { return u * std::sqrt(1.0 + c * c); }
double SharpnessDisk::lasso_length() const {
    return 2.0 * development_radius(1.0) * std::sin(k / 2.0);
}

SharpnessDisk build_sharpness_disk(double k) {
    if (!(k > 0 && k < kPi)) throw Error("sharpness disk needs k in (0, pi)");
    SharpnessDisk d;
    d.k = k;
    d.c = k / std::sqrt(4.0 * kPi * kPi - k * k);
    d.u0 = std::cos(k / 2.0) / 2.0;
    double c = d.c, u0 = d.u0;
    double root = std::sqrt(1.0 + c * c);
    d.cap_center = u0 * (1.0 + c * c);
    d.cap_radius = c * u0 * root;
    d.s = d.cap_center - d.cap_radius;
    if (!(d.s > 0 && d.s < d.u0 && d.cap_radius > 0))
        throw BlendFailure("no circle blend satisfies both tangency constraints");

    double uc = d.cap_center, R = d.cap_radius, s = d.s;
    double rho_u0 = R * std::acos(std::clamp((uc - u0) / R, -1.0, 1.0));

    geom::RevolutionProfile prof;
    prof.s = s;
    prof.has_tip = true;
    prof.r = [c, u0, uc, R](double u) {
        if (u >= u0) return c * u;
        return std::sqrt(std::max(R * R - (u - uc) * (u - uc), 0.0));
    };
    prof.dr = [c, u0, uc, R](double u) {
        if (u >= u0) return c;
        double r = std::sqrt(std::max(R * R - (u - uc) * (u - uc), 1e-300));
        return (uc - u) / r;
    };
    prof.ddr = [c, u0, uc, R](double u) {
        (void)c;
        (void)uc;
        if (u >= u0) return 0.0;
        double r2 = std::max(R * R - (u - uc) * (u - uc), 1e-300);
        return -R * R / (r2 * std::sqrt(r2));
    };
    prof.meridian_arclength = [s, u0, uc, R, root, rho_u0](double u) {
        if (u <= s) return 0.0;
        if (u <= u0) return R * std::acos(std::clamp((uc - u) / R, -1.0, 1.0));
        return rho_u0 + (u - u0) * root;
    };
    prof.breakpoints = {u0};
    d.chart = geom::revolution_disk(std::move(prof));
    return d;
}

DevelopedShot unroll_geodesic_oracle(const SharpnessDisk& disk, double boundary_param,
                                     double alpha) {
    if (!(alpha > 0 && alpha < kPi)) throw Error("oracle: alpha must lie in (0, pi)");
    const double k = disk.k;
    const double ell1 = disk.development_radius(1.0);
    const double ell0 = disk.development_radius(disk.u0);
    const double t0 = boundary_param;
    const double phi0 = t0 * k / kTwoPi;

    // Straight segment in the developed plane.
    Vec2 start{ell1 * std::cos(phi0), ell1 * std::sin(phi0)};
    Vec2 e_ell{std::cos(phi0), std::sin(phi0)};
    Vec2 e_phi{-std::sin(phi0), std::cos(phi0)};
    Vec2 dir = e_phi * std::cos(alpha) - e_ell * std::sin(alpha);

    double tau_exit = 2.0 * ell1 * std::sin(alpha);  // re-entry into the rim
    double tau_foot = -start.dot(dir);               // parameter of closest approach
    double d_min = (start + dir * tau_foot).norm();

    DevelopedShot out;
    out.min_development_radius = d_min;
    if (d_min < ell0 - 1e-12)
        throw LeavesConeRegion("developed segment dips below the blend radius");

    // Self-intersection on the cone: two parameters whose polar angles differ
    // by the sector angle k land on the same surface point. The angle swept
    // is symmetric about the foot, so a crossing exists iff the total
    // subtended angle exceeds k.
    Vec2 exit_p = start + dir * tau_exit;
    double total_angle = std::atan2(start.cross(exit_p), start.dot(exit_p));
    out.development_angle = total_angle;

    double tau_end = tau_exit;
    if (std::fabs(total_angle) > k + 1e-13) {
        out.self_intersects = true;
        double off = d_min * std::tan(k / 2.0);
        tau_end = tau_foot + off;  // meets the earlier branch at tau_foot - off
    }

    // Sample and re-roll: phi tracked continuously, then t = t0 + dphi 2pi/k.
    int n = std::max(16, static_cast<int>(std::ceil(tau_end / 1e-3)));
    geom::Trajectory traj;
    traj.points.reserve(n + 1);
    traj.arclength.reserve(n + 1);
    double prev_phi = phi0;
    double lifted_phi = phi0;
    for (int i = 0; i <= n; ++i) {
        double tau = tau_end * i / n;
        Vec2 p = start + dir * tau;
        double rho = p.norm();
        double phi = std::atan2(p.y, p.x);
        lifted_phi += wrap_angle_diff(phi, prev_phi);
        prev_phi = phi;
        double u = rho / std::sqrt(1.0 + disk.c * disk.c);
        double t = t0 + (lifted_phi - phi0) * kTwoPi / k;
        traj.points.push_back({u, t});
        traj.arclength.push_back(tau);
    }
    traj.length = tau_end;
    out.length = tau_end;

    // Tangents in chart coordinates: d(u,t)/dtau from the development.
    auto chart_tangent = [&](double tau) -> Vec2 {
        Vec2 p = start + dir * tau;
        double rho = p.norm();
        double drho = p.dot(dir) / rho;
        double dphi = p.cross(dir) / (rho * rho);
        return {drho / std::sqrt(1.0 + disk.c * disk.c), dphi * kTwoPi / k};
    };
    traj.initial_tangent = chart_tangent(0.0);
    traj.terminal_tangent = chart_tangent(tau_end);

    if (out.self_intersects) {
        traj.hit = geom::HitType::SelfIntersection;
        traj.self_intersection_point = traj.points.back();
        traj.self_intersection_arclength = tau_end;
    } else {
        traj.hit = geom::HitType::BoundaryHit;
        double t_arrival = traj.points.back().y;
        traj.boundary_hit_param = wrap_angle_2pi(t_arrival);
        out.arrival_param = traj.boundary_hit_param;
        out.arrival_angle = alpha;  // reflection symmetry of the development
    }
    out.trajectory = std::move(traj);
    return out;
}

SharpnessReport verify_sharpness(const SharpnessDisk& disk, double epsilon, int basepoints,
                                 int workers) {
    SharpnessReport rep;
    rep.theta = disk.k / 2.0 + epsilon;
    if (!(rep.theta > 0 && rep.theta < kPi / 2))
        throw InvalidTheta("verify_sharpness: k/2 + epsilon must lie in (0, pi/2)");
    rep.oracle_lasso_length = disk.lasso_length();

    const geom::MetricChart& chart = *disk.chart;

    // The critical lasso via ODE shooting: walk the launch angle up to the
    // closure edge at k/2 (grazing its own start point).
    {
        double lo = disk.k / 2.0 - 0.02, hi = disk.k / 2.0 + 0.02;
        capillary::ShotResult best =
            capillary::shoot_from_boundary(chart, 0.0, lo, 2.5 * rep.oracle_lasso_length);
        double best_alpha = lo;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            auto shot = capillary::shoot_from_boundary(chart, 0.0, mid,
                                                       2.5 * rep.oracle_lasso_length);
            bool closed_side = shot.arrival_param.has_value();
            if (closed_side) {
                lo = mid;
                best = shot;
                best_alpha = mid;
            } else {
                hi = mid;
            }
            if (hi - lo < 1e-13) break;
        }
        if (!best.arrival_param)
            throw NoArrival("verify_sharpness: lasso shooting never closed");
        rep.lasso.basepoint = 0.0;
        rep.lasso.launch_angle = best_alpha;
        rep.lasso.arrival_angle = *best.arrival_angle;
        rep.lasso.length = best.trajectory.length;
        rep.lasso.eq_residual =
            std::fabs(std::cos(rep.lasso.launch_angle) - std::cos(rep.lasso.arrival_angle));
        rep.lasso.critical = rep.lasso.eq_residual < 1e-5;
        rep.lasso.points = best.trajectory.points;
    }

    rep.shots = basepoints;
    std::vector<double> marks(basepoints, 0.0);
    std::vector<char> self_int(basepoints, 0);
    parallel_for(basepoints, workers, [&](int i) {
        double beta = kTwoPi * i / basepoints;
        auto shot = capillary::shoot_from_boundary(chart, beta, rep.theta,
                                                   2.5 * chart.boundary_length());
        self_int[i] = shot.self_intersected ? 1 : 0;
        // Rotation-invariant observable: self-intersection arclength when it
        // occurs, arrival angle otherwise.
        marks[i] = shot.self_intersected ? shot.trajectory.self_intersection_arclength
                                         : shot.arrival_angle.value_or(-1.0);
    });
    rep.all_shots_self_intersect = true;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < basepoints; ++i) {
        if (!self_int[i]) rep.all_shots_self_intersect = false;
        lo = std::min(lo, marks[i]);
        hi = std::max(hi, marks[i]);
    }
    rep.symmetry_spread = hi - lo;
    return rep;
}

}  // namespace capgeo::cone
