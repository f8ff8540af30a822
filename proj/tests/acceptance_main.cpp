// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "capgeo/capillary.hpp"
#include "capgeo/cone.hpp"
#include "capgeo/domain.hpp"
#include "capgeo/errors.hpp"
#include "capgeo/flow.hpp"
#include "capgeo/minmax.hpp"
#include "capgeo/polyline.hpp"
#include "oracles.hpp"

using namespace capgeo;
using oracles::kPi;
using oracles::kTwoPi;

namespace {

struct Criterion {
    std::string name;
    bool passed = true;
    std::vector<std::string> notes;
    double seconds = 0.0;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            notes.push_back(what);
        }
    }
};

std::vector<Criterion> results;

void run_criterion(const std::string& name, double time_budget,
                   const std::function<void(Criterion&)>& body) {
    Criterion c;
    c.name = name;
    auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.passed = false;
        c.notes.push_back(std::string("exception: ") + e.what());
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_budget > 0 && c.seconds > time_budget) {
        c.passed = false;
        c.notes.push_back("runtime " + std::to_string(c.seconds) + " s over budget " +
                          std::to_string(time_budget) + " s");
    }
    std::printf("[%s] %s (%.1f s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.seconds);
    for (const auto& n : c.notes) std::printf("       - %s\n", n.c_str());
    std::fflush(stdout);
    results.push_back(std::move(c));
}

geom::ChartPtr flat() {
    static geom::ChartPtr chart = geom::flat_unit_disk();
    return chart;
}

geom::ChartPtr conformal_test_disk() {
    // Rotationally asymmetric, strictly convex test metric.
    const double a = 0.08;
    return geom::conformal_disk(
        [a](Vec2 p) { return a * p.x * (1.0 - p.norm2()); },
        [a](Vec2 p) {
            return Vec2{a * (1.0 - 3.0 * p.x * p.x - p.y * p.y), -2.0 * a * p.x * p.y};
        },
        [a](Vec2 p) { return -8.0 * a * p.x; });
}

geom::Polyline random_embedded_curve(oracles::Rng& rng) {
    for (;;) {
        double b0 = rng.uniform(0.0, kTwoPi);
        double gap = rng.uniform(0.8, kPi);
        double b1 = b0 + gap;
        const int n = 160;
        geom::Polyline poly = oracles::flat_chord(b0, b1, n);
        Vec2 chord = poly.back() - poly.front();
        Vec2 nrm = chord.perp().normalized();
        int modes = rng.uniform_int(1, 3);
        for (int m = 1; m <= modes; ++m) {
            double amp = rng.uniform(-0.18, 0.18) / m;
            for (int j = 1; j < n; ++j) {
                double w = std::sin(kPi * j / static_cast<double>(n) * m);
                poly[j] += nrm * (amp * w * std::sin(kPi * j / static_cast<double>(n)));
            }
        }
        bool inside = true;
        for (size_t j = 1; j + 1 < poly.size(); ++j)
            if (poly[j].norm() >= 0.999) inside = false;
        if (!inside) continue;
        if (geom::polyline_self_intersects(*flat(), poly, 1e-10)) continue;
        return poly;
    }
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    std::filesystem::path work = CAPGEO_WORK_DIR;
    std::filesystem::create_directories(work);

    run_criterion("1 curvature audit: flat, conformal, rounded cones", 20.0, [](Criterion& c) {
        auto check_chart = [&](const geom::MetricChart& chart, const std::string& label) {
            auto t0 = std::chrono::steady_clock::now();
            auto rep = chart.gauss_bonnet_audit();
            double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
            c.require(rep.residual < 1e-3,
                      label + ": residual " + std::to_string(rep.residual));
            c.require(dt < 5.0, label + ": audit took " + std::to_string(dt) + " s");
        };
        check_chart(*flat(), "flat");
        check_chart(*conformal_test_disk(), "conformal");
        for (double k : {kPi / 3, kPi / 2, 2.5}) {
            auto disk = cone::build_sharpness_disk(k);
            check_chart(*disk.chart, "cone k=" + std::to_string(k));
        }
    });

    run_criterion("2 fixed-endpoint flow drives 20 random curves to chords", 60.0,
                  [](Criterion& c) {
        oracles::Rng rng(20260811);
        for (int trial = 0; trial < 20; ++trial) {
            auto curve = random_embedded_curve(rng);
            auto st = flow::csf_run(*flat(), curve, 1e-6);
            c.require(st.converged, "trial " + std::to_string(trial) + ": did not converge");
            geom::Polyline chord = {curve.front(), curve.back()};
            double hd = geom::hausdorff_distance(*flat(), st.curve, chord);
            c.require(hd < 1e-4,
                      "trial " + std::to_string(trial) + ": hausdorff " + std::to_string(hd));
            for (size_t i = 0; i + 1 < st.length_history.size(); ++i)
                if (st.length_history[i + 1] > st.length_history[i] + 1e-9) {
                    c.require(false, "trial " + std::to_string(trial) + ": length increased");
                    break;
                }
            c.require(st.curve.front().x == curve.front().x &&
                          st.curve.front().y == curve.front().y &&
                          st.curve.back().x == curve.back().x &&
                          st.curve.back().y == curve.back().y,
                      "trial " + std::to_string(trial) + ": endpoints moved");
        }
    });

    run_criterion("3 capillary identity on the flat disk", 120.0, [](Criterion& c) {
        for (double theta : {kPi / 6, kPi / 4, kPi / 3}) {
            for (int i = 0; i < 32; ++i) {
                double beta = kTwoPi * i / 32;
                double defect = capillary::capillary_defect(*flat(), beta, theta);
                if (std::fabs(defect) >= 1e-6) {
                    c.require(false, "defect " + std::to_string(defect) + " at theta " +
                                         std::to_string(theta));
                    break;
                }
            }
            auto found = capillary::find_capillary_geodesics(*flat(), theta, 32);
            c.require(found.s1_family, "rotational family not reported");
            for (const auto& g : found.geodesics) {
                c.require(std::fabs(g.measure.interior_len - 2 * std::sin(theta)) < 1e-5,
                          "interior length " + std::to_string(g.measure.interior_len));
                auto [t1, t2] = curve::contact_angles(*flat(), g.domain);
                c.require(std::fabs(t1 - theta) < 1e-6 && std::fabs(t2 - theta) < 1e-6,
                          "contact angles " + std::to_string(t1) + ", " + std::to_string(t2));
            }
        }
    });

    run_criterion("4 stability spectrum of the capillary chord", 120.0, [](Criterion& c) {
        for (double theta : {kPi / 6, kPi / 4, kPi / 3}) {
            auto found = capillary::find_capillary_geodesics(*flat(), theta, 16);
            const auto& geo = found.geodesics.front();
            auto spectrum = capillary::morse_index(*flat(), geo);
            c.require(spectrum.index == 1, "index " + std::to_string(spectrum.index));
            c.require(spectrum.nullity == 1, "nullity " + std::to_string(spectrum.nullity));

            double L = 2 * std::sin(theta);
            double q_lin =
                capillary::stability_form(*flat(), geo, [L](double s) { return s - L / 2; });
            c.require(std::fabs(q_lin) < 1e-6,
                      "linear profile Q = " + std::to_string(q_lin));

            auto spectrum2 = capillary::morse_index(*flat(), geo, 960);
            for (int i = 0; i < 3; ++i)
                c.require(std::fabs(spectrum.eigenvalues[i] - spectrum2.eigenvalues[i]) < 1e-4,
                          "eigenvalue " + std::to_string(i) + " moved under doubling");
        }
    });

    run_criterion("5 width bounds on the flat disk at theta = pi/3", 300.0, [](Criterion& c) {
        double theta = kPi / 3;
        auto rep = minmax::estimate_widths(*flat(), theta, 64, {}, 4);
        c.require(std::fabs(rep.lower_bound - kPi) < 1e-12,
                  "lower bound " + std::to_string(rep.lower_bound));
        double target = std::sqrt(3.0) + 2 * kPi / 3;
        c.require(std::fabs(rep.w1_upper - target) < 1e-3,
                  "w1 " + std::to_string(rep.w1_upper) + " vs " + std::to_string(target));
        c.require(rep.lower_bound < rep.w1_upper, "lower bound not below w1");
        c.require(rep.w1_upper <= rep.w2_upper + 1e-9, "w1 above w2");
        c.require(rep.w2_upper <= rep.w1_upper + 1e-3, "w2 not within 1e-3 of w1");

        auto sw = minmax::build_line_sweepout(*flat(), 2, 64, {}, 4);
        auto tight = minmax::tighten_sweepout(*flat(), sw, -1.0, theta, 4);
        for (int t = 1; t < 64; ++t) {
            if (minmax::endpoint_degree(tight, t) != 1) {
                c.require(false, "degree not 1 at row " + std::to_string(t));
                break;
            }
        }
    });

    run_criterion("6 rounded-cone sharpness at k = pi/2", 120.0, [](Criterion& c) {
        auto disk = cone::build_sharpness_disk(kPi / 2);
        auto rep = cone::verify_sharpness(disk, 0.05, 64, 4);
        c.require(std::fabs(rep.lasso.launch_angle - kPi / 4) < 1e-3,
                  "lasso angle " + std::to_string(rep.lasso.launch_angle));
        c.require(std::fabs(rep.lasso.length - 1.4605934866804429) < 1e-3,
                  "lasso length " + std::to_string(rep.lasso.length));
        c.require(std::fabs(rep.lasso.length - rep.oracle_lasso_length) < 1e-3,
                  "lasso length differs from the development oracle");
        c.require(rep.all_shots_self_intersect, "a shot at k/2 + 0.05 failed to self-intersect");
        bool none_found = false;
        try {
            capillary::find_capillary_geodesics(*disk.chart, kPi / 4 + 0.05, 16);
        } catch (const NoneFound&) {
            none_found = true;
        }
        c.require(none_found, "capillary geodesic search should come back empty");
        auto audit = disk.chart->gauss_bonnet_audit();
        c.require(std::fabs(audit.total_kappa - kPi / 2) < 1e-3,
                  "boundary turning " + std::to_string(audit.total_kappa));
    });

    run_criterion("7 lasso-hypothesis verdicts at bound 10", 180.0, [](Criterion& c) {
        auto flat_rep = capillary::star_hypothesis_check(*flat(), kPi / 3, 10.0, 4);
        c.require(flat_rep.gb_sufficient, "flat: curvature condition not detected");
        c.require(!flat_rep.scan_found_lasso, "flat: scan found a lasso");
        c.require(flat_rep.verdict == capillary::StarVerdict::ProvenByGB, "flat: wrong verdict");

        auto disk = cone::build_sharpness_disk(kPi / 2);
        auto cone_rep = capillary::star_hypothesis_check(*disk.chart, kPi / 4 + 0.05, 10.0, 4);
        c.require(!cone_rep.gb_sufficient, "cone: curvature condition claimed");
        c.require(cone_rep.scan_found_lasso, "cone: scan missed the lasso");
        c.require(cone_rep.verdict == capillary::StarVerdict::LassoFound, "cone: wrong verdict");
    });

    run_criterion("8 development oracle vs ODE on 100 random shots", 120.0, [](Criterion& c) {
        auto disk = cone::build_sharpness_disk(kPi / 2);
        oracles::Rng rng(404);
        int tested = 0;
        double worst = 0.0;
        while (tested < 100) {
            double p = rng.uniform(0.0, kTwoPi);
            double alpha = rng.uniform(0.15, kPi - 0.15);
            cone::DevelopedShot dev;
            try {
                dev = cone::unroll_geodesic_oracle(disk, p, alpha);
            } catch (const LeavesConeRegion&) {
                continue;
            }
            if (dev.self_intersects) continue;
            auto ode = capillary::shoot_from_boundary(*disk.chart, p, alpha, 5.0);
            if (!ode.arrival_param) {
                c.require(false, "ODE shot did not arrive where the oracle did");
                break;
            }
            double hd = geom::hausdorff_distance(*disk.chart, dev.trajectory.points,
                                                 ode.trajectory.points);
            worst = std::max(worst, hd);
            ++tested;
        }
        c.require(worst < 1e-5, "worst hausdorff " + std::to_string(worst));
    });

    run_criterion("9 fixed-seed reruns are byte-identical", 120.0, [&](Criterion& c) {
        std::filesystem::path metric = work / "flat.toml";
        std::ofstream(metric) << "kind = flat\n";
        auto run = [&](const std::string& out) {
            std::string cmd = std::string(CAPGEO_CLI_PATH) + " find --metric " + metric.string() +
                              " --theta 1.0471975511965976 --grid 16 --seed 7 --out " +
                              (work / out).string() + " > /dev/null 2>&1";
            return WEXITSTATUS(std::system(cmd.c_str()));
        };
        c.require(run("d1") == 0 && run("d2") == 0, "CLI run failed");
        std::string a = slurp(work / "d1" / "find.json");
        std::string b = slurp(work / "d2" / "find.json");
        c.require(!a.empty() && a == b, "summaries differ between reruns");
        c.require(slurp(work / "d1" / "geodesic_0.csv") == slurp(work / "d2" / "geodesic_0.csv"),
                  "curve catalogs differ between reruns");
    });

    int failures = 0;
    for (const auto& c : results)
        if (!c.passed) ++failures;
    std::printf("%zu criteria, %d failed\n", results.size(), failures);
    return failures == 0 ? 0 : 1;
}
