#include "capgeo/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "capgeo/errors.hpp"

namespace capgeo::flow {

namespace {

// Thomas algorithm for a tridiagonal system; diagonals are overwritten.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
    size_t n = diag.size();
    for (size_t i = 1; i < n; ++i) {
        double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

FlowState csf_step(const MetricChart& chart, const FlowState& st, double dt) {
    const Polyline& x = st.curve;
    size_t n = x.size();
    if (n < 3) throw EmptyCurve("csf_step: need at least three vertices");
    if (!(dt > 0)) throw StepTooLarge("csf_step: dt must be positive");

    auto s = geom::cumulative_g_arclength(chart, x);
    double old_len = s.back();
    double min_gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < n; ++i) min_gap = std::min(min_gap, s[i + 1] - s[i]);

    // (I - dt D^2) x_new = x + dt Gamma(T, T), Dirichlet rows at both ends.
    // The second difference is implicit; the metric term is explicit with
    // coefficients frozen at the old curve, which is only valid while its
    // displacement stays below the vertex spacing.
    std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0);
    std::vector<double> rx(n), ry(n);
    rx[0] = x[0].x;
    ry[0] = x[0].y;
    rx[n - 1] = x[n - 1].x;
    ry[n - 1] = x[n - 1].y;
    for (size_t i = 1; i + 1 < n; ++i) {
        double a = s[i] - s[i - 1];
        double b = s[i + 1] - s[i];
        double ca = 2.0 / (a * (a + b));
        double cb = 2.0 / (b * (a + b));
        lower[i] = -dt * ca;
        diag[i] = 1.0 + dt * (ca + cb);
        upper[i] = -dt * cb;
        Vec2 tangent = (x[i + 1] - x[i - 1]) / (a + b);
        Vec2 gamma = chart.christoffel(x[i]).quad(tangent);
        if (dt * chart.metric(x[i]).norm(gamma) > 0.5 * min_gap)
            throw StepTooLarge("csf_step: explicit metric term would displace a vertex "
                               "beyond half the vertex spacing");
        rx[i] = x[i].x + dt * gamma.x;
        ry[i] = x[i].y + dt * gamma.y;
    }
    {
        auto l2 = lower, d2 = diag, u2 = upper;
        solve_tridiagonal(l2, d2, u2, rx);
        solve_tridiagonal(lower, diag, upper, ry);
    }

    Polyline moved(n);
    for (size_t i = 0; i < n; ++i) moved[i] = {rx[i], ry[i]};
    moved.front() = x.front();
    moved.back() = x.back();

    // Tangential redistribution once spacing drifts from quasi-uniform;
    // interpolated points lie on the moved polyline, so this never lengthens
    // the curve. Leaving an already-uniform curve alone lets the iteration
    // settle onto the exact discrete fixed point.
    Polyline next;
    {
        auto sm = geom::cumulative_g_arclength(chart, moved);
        double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
        for (size_t i = 0; i + 1 < sm.size(); ++i) {
            mn = std::min(mn, sm[i + 1] - sm[i]);
            mx = std::max(mx, sm[i + 1] - sm[i]);
        }
        if (!(mn > 0) || mx > 2.0 * mn) {
            next = geom::resample_uniform(chart, moved, static_cast<int>(n) - 1);
            next.front() = x.front();
            next.back() = x.back();
        } else {
            next = std::move(moved);
        }
    }

    double new_len = geom::g_length(chart, next);
    if (new_len > old_len + 1e-9)
        throw StepTooLarge("csf_step: length increased by " + std::to_string(new_len - old_len));
    if (geom::polyline_self_intersects(chart, next, 1e-10))
        throw EmbeddednessLost("csf_step: curve crossed itself");

    FlowState out;
    out.curve = std::move(next);
    out.time = st.time + dt;
    out.length_history = st.length_history;
    if (out.length_history.empty()) out.length_history.push_back(old_len);
    out.length_history.push_back(new_len);
    out.step_count = st.step_count + 1;
    out.residual = geom::max_geodesic_curvature(chart, out.curve);
    out.converged = false;
    return out;
}

FlowState csf_run(const MetricChart& chart, const Polyline& curve, double tol, double max_time,
                  const FlowOptions& opts) {
    if (curve.size() < 2) throw EmptyCurve("csf_run: need a polyline");
    if (geom::polyline_self_intersects(chart, curve, 1e-10))
        throw EmbeddednessLost("csf_run: initial curve is not embedded");

    double len0 = geom::g_length(chart, curve);
    if (max_time <= 0) max_time = 50.0 * len0 * len0;

    int n = opts.resample_n > 0
                ? opts.resample_n
                : std::clamp(static_cast<int>(std::ceil(len0 / 0.01)), 64, 512);

    FlowState st;
    st.curve = geom::resample_uniform(chart, curve, n);
    st.curve.front() = curve.front();
    st.curve.back() = curve.back();
    st.length_history.push_back(geom::g_length(chart, st.curve));
    st.residual = st.curve.size() >= 3 ? geom::max_geodesic_curvature(chart, st.curve)
                                       : 0.0;
    if (st.residual < tol) {
        st.converged = true;
        return st;
    }

    double h = st.length_history.front() / n;
    double dt = opts.dt_factor * h;
    const int max_steps = 2'000'000;
    double stall_reference = st.length_history.front();
    int stall_window = 0;
    while (st.time < max_time && st.step_count < max_steps) {
        double step_dt = std::min(dt, max_time - st.time);
        FlowState next;
        bool stepped = false;
        for (int attempt = 0; attempt < 10; ++attempt) {
            try {
                next = csf_step(chart, st, step_dt);
                stepped = true;
                break;
            } catch (const StepTooLarge&) {
                step_dt *= 0.5;
                if (step_dt < 1e-14) throw;
            }
        }
        if (!stepped) throw StepTooLarge("csf_run: step size underflow");
        st = std::move(next);
        if (opts.trace)
            opts.trace->push_back({st.time, st.length_history.back(), st.residual});
        if (st.residual < tol) {
            st.converged = true;
            return st;
        }
        // On curved charts the residual floors at the discretization scale
        // while the length is long settled; stop grinding once the length is
        // stationary to machine precision over a full window.
        if (++stall_window >= 500) {
            double drop = stall_reference - st.length_history.back();
            if (drop < 1e-13 * std::max(1.0, stall_reference)) break;
            stall_reference = st.length_history.back();
            stall_window = 0;
        }
    }
    st.converged = st.residual < tol;
    return st;  // budget exhausted or stalled: best state, flagged via converged
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
    std::string out = "time,length,max_curvature\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.time, r.length, r.max_curvature);
        out += buf;
    }
    os << out;
}

}  // namespace capgeo::flow
