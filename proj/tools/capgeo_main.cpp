#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "capgeo/capillary.hpp"
#include "capgeo/cone.hpp"
#include "capgeo/domain.hpp"
#include "capgeo/errors.hpp"
#include "capgeo/flow.hpp"
#include "capgeo/metricfile.hpp"
#include "capgeo/minmax.hpp"
#include "capgeo/svg.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace capgeo;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

struct CommonOpts {
    std::string metric_path;
    std::string out_dir = "out";
    double theta = kPi / 3.0;
    int grid = 64;
    double tol = 1e-6;
    long seed = 1;
    int workers = 1;
    bool svg = false;
};

std::string theta_string(double theta) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", theta);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
}

void write_summary(const CommonOpts& opts, const std::string& name, json& summary) {
    summary["seed"] = opts.seed;
    fs::create_directories(opts.out_dir);
    write_text(fs::path(opts.out_dir) / (name + ".json"), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
}

MetricDefinition require_metric(const CommonOpts& opts) {
    if (opts.metric_path.empty()) throw ConfigError("--metric is required");
    return load_metric_file(opts.metric_path);
}

int run_audit(const CommonOpts& opts) {
    auto def = require_metric(opts);
    auto report = def.chart->gauss_bonnet_audit();
    double min_kappa = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 256; ++i)
        min_kappa = std::min(min_kappa,
                             def.chart->boundary_geodesic_curvature(2 * kPi * i / 256));
    json summary;
    summary["command"] = "audit";
    summary["check"] = "gauss-bonnet-identity";
    summary["metric"] = opts.metric_path;
    summary["total_K"] = report.total_K;
    summary["total_kappa"] = report.total_kappa;
    summary["residual"] = report.residual;
    summary["tip_mass"] = report.tip_mass;
    summary["min_boundary_kappa"] = min_kappa;
    summary["boundary_length"] = def.chart->boundary_length();
    write_summary(opts, "audit", summary);
    return 0;
}

int run_flow(const CommonOpts& opts, const std::string& curve_path, double max_time) {
    auto def = require_metric(opts);
    std::ifstream in(curve_path);
    if (!in) throw ConfigError("cannot open curve CSV: " + curve_path);
    auto poly = curve::read_polyline_csv(in);

    std::vector<flow::TraceRow> rows;
    flow::FlowOptions fopts;
    fopts.trace = &rows;
    auto st = flow::csf_run(*def.chart, poly, opts.tol, max_time, fopts);

    fs::create_directories(opts.out_dir);
    {
        std::ofstream os(fs::path(opts.out_dir) / "flow_final.csv", std::ios::binary);
        curve::write_polyline_csv(os, st.curve, curve::csv_header_for(*def.chart));
    }
    {
        std::ofstream os(fs::path(opts.out_dir) / "flow_trace.csv", std::ios::binary);
        flow::write_trace_csv(os, rows);
    }
    json summary;
    summary["command"] = "flow";
    summary["check"] = "fixed-endpoint-shortening";
    summary["metric"] = opts.metric_path;
    summary["converged"] = st.converged;
    summary["steps"] = st.step_count;
    summary["time"] = st.time;
    summary["initial_length"] = st.length_history.front();
    summary["final_length"] = st.length_history.back();
    summary["residual"] = st.residual;
    bool monotone = true;
    for (size_t i = 0; i + 1 < st.length_history.size(); ++i)
        if (st.length_history[i + 1] > st.length_history[i] + 1e-9) monotone = false;
    summary["length_monotone"] = monotone;
    write_summary(opts, "flow", summary);
    return st.converged ? 0 : 3;
}

int run_shoot(const CommonOpts& opts, double basepoint, double alpha, double max_len) {
    auto def = require_metric(opts);
    auto shot = capillary::shoot_from_boundary(*def.chart, basepoint, alpha, max_len);
    fs::create_directories(opts.out_dir);
    {
        std::ofstream os(fs::path(opts.out_dir) / "shot.csv", std::ios::binary);
        curve::write_polyline_csv(os, shot.trajectory.points, curve::csv_header_for(*def.chart));
    }
    json summary;
    summary["command"] = "shoot";
    summary["check"] = "geodesic-trace";
    summary["metric"] = opts.metric_path;
    summary["basepoint"] = basepoint;
    summary["alpha"] = alpha;
    summary["length"] = shot.trajectory.length;
    summary["hit"] = shot.trajectory.hit == geom::HitType::BoundaryHit ? "boundary"
                     : shot.trajectory.hit == geom::HitType::SelfIntersection ? "self-intersection"
                                                                              : "length-exceeded";
    if (shot.arrival_param) summary["arrival_param"] = *shot.arrival_param;
    if (shot.arrival_angle) summary["arrival_angle"] = *shot.arrival_angle;
    summary["self_intersected"] = shot.self_intersected;
    write_summary(opts, "shoot", summary);
    return 0;
}

int run_find(const CommonOpts& opts) {
    auto def = require_metric(opts);
    json summary;
    summary["command"] = "find";
    summary["check"] = "first-variation-stationarity";
    summary["metric"] = opts.metric_path;
    summary["theta"] = theta_string(opts.theta);
    try {
        auto result = capillary::find_capillary_geodesics(*def.chart, opts.theta, opts.grid);
        summary["s1_family"] = result.s1_family;
        summary["found"] = result.geodesics.size();
        json items = json::array();
        fs::create_directories(opts.out_dir);
        int idx = 0;
        for (const auto& g : result.geodesics) {
            json item;
            item["basepoint"] = g.basepoint;
            item["interior_length"] = g.measure.interior_len;
            item["l_theta"] = g.measure.l_theta;
            item["l_theta_dual"] = curve::l_theta(*def.chart, g.dual_domain, opts.theta).l_theta;
            item["max_interior_H"] = g.residual.max_interior_H;
            item["angle_defects"] = {g.residual.angle_defect.first,
                                     g.residual.angle_defect.second};
            // Spectrum for the first few hits only; the rest repeat by symmetry.
            if (idx < 4) {
                auto spectrum = capillary::morse_index(*def.chart, g);
                item["index"] = spectrum.index;
                item["nullity"] = spectrum.nullity;
                json lows = json::array();
                for (size_t k = 0; k < spectrum.eigenvalues.size() && k < 6; ++k)
                    lows.push_back(spectrum.eigenvalues[k]);
                item["low_eigenvalues"] = std::move(lows);
                std::string csv = "# low eigenvalues:";
                char num[40];
                for (size_t k = 0; k < spectrum.eigenvalues.size() && k < 6; ++k) {
                    std::snprintf(num, sizeof num, " %.17g", spectrum.eigenvalues[k]);
                    csv += num;
                }
                csv += "\narclength,lambda1,lambda2,lambda3\n";
                char buf[160];
                for (size_t i = 0; i < spectrum.nodes.size(); ++i) {
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", spectrum.nodes[i],
                                  spectrum.eigenfunctions.size() > 0 ? spectrum.eigenfunctions[0][i] : 0.0,
                                  spectrum.eigenfunctions.size() > 1 ? spectrum.eigenfunctions[1][i] : 0.0,
                                  spectrum.eigenfunctions.size() > 2 ? spectrum.eigenfunctions[2][i] : 0.0);
                    csv += buf;
                }
                write_text(fs::path(opts.out_dir) / ("spectrum_" + std::to_string(idx) + ".csv"),
                           csv);
            }
            {
                std::ofstream os(fs::path(opts.out_dir) /
                                     ("geodesic_" + std::to_string(idx) + ".csv"),
                                 std::ios::binary);
                curve::write_domain_csv(os, g.domain, curve::csv_header_for(*def.chart));
            }
            items.push_back(std::move(item));
            ++idx;
        }
        summary["geodesics"] = std::move(items);
    } catch (const NoneFound& e) {
        summary["found"] = 0;
        summary["none_found"] = e.what();
    }
    write_summary(opts, "find", summary);
    return 0;
}

int run_lassos(const CommonOpts& opts, double bound) {
    auto def = require_metric(opts);
    capillary::LassoScanOptions sopts;
    sopts.workers = opts.workers;
    auto lassos = capillary::find_critical_lassos(*def.chart, bound, sopts);
    auto star = capillary::star_hypothesis_check(*def.chart, opts.theta, bound, opts.workers);

    json summary;
    summary["command"] = "lassos";
    summary["check"] = "lasso-criticality-scan";
    summary["metric"] = opts.metric_path;
    summary["theta"] = theta_string(opts.theta);
    summary["length_bound"] = bound;
    json items = json::array();
    std::string csv = "basepoint,launch_angle,arrival_angle,length,eq_residual,critical\n";
    char buf[200];
    for (const auto& l : lassos) {
        json item;
        item["basepoint"] = l.basepoint;
        item["launch_angle"] = l.launch_angle;
        item["arrival_angle"] = l.arrival_angle;
        item["length"] = l.length;
        item["eq_residual"] = l.eq_residual;
        item["critical"] = l.critical;
        items.push_back(std::move(item));
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", l.basepoint,
                      l.launch_angle, l.arrival_angle, l.length, l.eq_residual,
                      l.critical ? 1 : 0);
        csv += buf;
    }
    summary["lassos"] = std::move(items);
    summary["gb_sufficient"] = star.gb_sufficient;
    summary["scan_found_lasso"] = star.scan_found_lasso;
    summary["verdict"] = star.verdict == capillary::StarVerdict::ProvenByGB ? "ProvenByGB"
                         : star.verdict == capillary::StarVerdict::LassoFound ? "LassoFound"
                                                                              : "NumericallyClear";
    summary["min_K"] = star.min_K;
    summary["total_kappa"] = star.total_kappa;
    fs::create_directories(opts.out_dir);
    write_text(fs::path(opts.out_dir) / "lassos.csv", csv);
    write_summary(opts, "lassos", summary);
    return 0;
}

int run_width(const CommonOpts& opts) {
    auto def = require_metric(opts);
    auto rep = minmax::estimate_widths(*def.chart, opts.theta, opts.grid, {}, opts.workers);
    json summary;
    summary["command"] = "width";
    summary["check"] = "min-max-width-bounds";
    summary["metric"] = opts.metric_path;
    summary["theta"] = theta_string(opts.theta);
    summary["lower_bound"] = rep.lower_bound;
    summary["w1_upper"] = rep.w1_upper;
    summary["w2_upper"] = rep.w2_upper;
    summary["candidate_critical_values"] = rep.candidate_critical_values;
    summary["ordering_ok"] = rep.ordering_ok;
    summary["diagnostics"] = rep.diagnostics;
    if (opts.svg && !rep.value_grid.empty()) {
        fs::create_directories(opts.out_dir);
        write_text(fs::path(opts.out_dir) / "width_heatmap.svg",
                   heatmap_svg(rep.value_grid, "sup L^theta over (s,t)"));
    }
    write_summary(opts, "width", summary);
    return rep.ordering_ok ? 0 : 3;
}

int run_sharpness(const CommonOpts& opts, double k, double eps, int shots) {
    auto disk = cone::build_sharpness_disk(k);
    auto rep = cone::verify_sharpness(disk, eps, shots, opts.workers);
    json summary;
    summary["command"] = "sharpness";
    summary["check"] = "rounded-cone-sharpness";
    summary["k"] = k;
    summary["epsilon"] = eps;
    summary["theta"] = theta_string(rep.theta);
    summary["lasso_angle"] = rep.lasso.launch_angle;
    summary["lasso_length"] = rep.lasso.length;
    summary["oracle_lasso_length"] = rep.oracle_lasso_length;
    summary["lasso_eq_residual"] = rep.lasso.eq_residual;
    summary["all_shots_self_intersect"] = rep.all_shots_self_intersect;
    summary["shots"] = rep.shots;
    summary["symmetry_spread"] = rep.symmetry_spread;

    if (opts.svg) {
        fs::create_directories(opts.out_dir);
        // Developed sector with the lasso chord and one self-intersecting shot.
        double ell1 = disk.development_radius(1.0);
        SvgCanvas canvas(-1.2 * ell1, -1.2 * ell1, 1.2 * ell1, 1.2 * ell1);
        std::vector<Vec2> arc;
        for (int i = 0; i <= 128; ++i) {
            double phi = k * i / 128.0;
            arc.push_back({ell1 * std::cos(phi), ell1 * std::sin(phi)});
        }
        canvas.polyline(arc, "#444444");
        canvas.polyline({{0, 0}, {ell1, 0}}, "#999999", 1.0);
        canvas.polyline({{0, 0}, {ell1 * std::cos(k), ell1 * std::sin(k)}}, "#999999", 1.0);
        canvas.polyline({{ell1, 0}, {ell1 * std::cos(k), ell1 * std::sin(k)}}, "#d62728", 2.0);
        double alpha = rep.theta;
        Vec2 start{ell1, 0.0};
        Vec2 d2{-std::sin(alpha), std::cos(alpha)};
        canvas.polyline({start, start + d2 * (2 * ell1 * std::sin(alpha))}, "#1f77b4", 2.0);
        canvas.text({-1.1 * ell1, -1.1 * ell1}, "developed sector, lasso (red), shot (blue)");
        write_text(fs::path(opts.out_dir) / "sharpness_development.svg", canvas.finish());
    }
    write_summary(opts, "sharpness", summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capillary geodesic toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string curve_path;
    double max_time = -1.0, basepoint = 0.0, alpha = kPi / 2.0, max_len = 0.0;
    double bound = 10.0, k = kPi / 2.0, eps = 0.05;
    int shots = 64;

    auto add_common = [&](CLI::App* sub, bool needs_metric) {
        if (needs_metric) sub->add_option("--metric", opts.metric_path, "metric definition file");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", opts.seed, "seed recorded in summaries");
        sub->add_option("--workers", opts.workers, "worker threads");
        sub->add_option("--tol", opts.tol, "numerical tolerance");
        sub->add_flag("--svg", opts.svg, "emit SVG figures");
    };

    auto* audit = app.add_subcommand("audit", "curvature audit and convexity scan");
    add_common(audit, true);

    auto* flow_cmd = app.add_subcommand("flow", "shorten a curve with fixed endpoints");
    add_common(flow_cmd, true);
    flow_cmd->add_option("--curve", curve_path, "input curve CSV")->required();
    flow_cmd->add_option("--max-time", max_time, "flow time budget");

    auto* shoot = app.add_subcommand("shoot", "trace one geodesic from the boundary");
    add_common(shoot, true);
    shoot->add_option("--basepoint", basepoint, "boundary parameter (radians)");
    shoot->add_option("--alpha", alpha, "interior launch angle (radians)");
    shoot->add_option("--max-len", max_len, "length cap");

    auto* find = app.add_subcommand("find", "locate capillary geodesics");
    add_common(find, true);
    find->add_option("--theta", opts.theta, "contact angle (radians)")->required();
    find->add_option("--grid", opts.grid, "basepoint grid size");

    auto* lassos = app.add_subcommand("lassos", "scan for critical geodesic lassos");
    add_common(lassos, true);
    lassos->add_option("--theta", opts.theta, "contact angle (radians)");
    lassos->add_option("--bound", bound, "length bound");

    auto* width = app.add_subcommand("width", "estimate min-max widths");
    add_common(width, true);
    width->add_option("--theta", opts.theta, "contact angle (radians)")->required();
    width->add_option("--grid", opts.grid, "slices per axis");

    auto* sharp = app.add_subcommand("sharpness", "build and test the rounded-cone disk");
    add_common(sharp, false);
    sharp->add_option("--k", k, "boundary total turning (radians)")->required();
    sharp->add_option("--eps", eps, "contact-angle offset");
    sharp->add_option("--shots", shots, "basepoints for the symmetry scan");

    CLI11_PARSE(app, argc, argv);

    try {
        if (audit->parsed()) return run_audit(opts);
        if (flow_cmd->parsed()) return run_flow(opts, curve_path, max_time);
        if (shoot->parsed()) return run_shoot(opts, basepoint, alpha, max_len);
        if (find->parsed()) return run_find(opts);
        if (lassos->parsed()) return run_lassos(opts, bound);
        if (width->parsed()) return run_width(opts);
        if (sharp->parsed()) return run_sharpness(opts, k, eps, shots);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidTheta& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidChart& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidDomain& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const NotOnBoundary& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const NoEndpoints& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const NoArrival& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
