#include <doctest.h>

#include <cmath>

#include "capgeo/capillary.hpp"
#include "capgeo/cone.hpp"
#include "capgeo/errors.hpp"
#include "capgeo/polyline.hpp"
#include "oracles.hpp"

using namespace capgeo;
using namespace capgeo::cone;
using oracles::kPi;
using oracles::kTwoPi;

TEST_CASE("sharpness disk closed forms") {
    auto d = build_sharpness_disk(kPi / 2);
    CHECK(d.c == doctest::Approx(0.25819888974716115).epsilon(1e-14));
    CHECK(d.u0 == doctest::Approx(std::cos(kPi / 4) / 2).epsilon(1e-14));
    // Sector-angle identity, pure algebra.
    CHECK(d.sector_angle() == doctest::Approx(kPi / 2).epsilon(1e-10));
    CHECK(d.lasso_length() == doctest::Approx(1.4605934866804429).epsilon(1e-12));

    // Boundary turning equals k for every k, via the audit.
    for (double k : {kPi / 3, 2.9}) {
        auto dk = build_sharpness_disk(k);
        auto rep = dk.chart->gauss_bonnet_audit();
        CHECK(rep.total_kappa == doctest::Approx(k).epsilon(1e-3));
        CHECK(rep.residual < 1e-3);
    }
}

TEST_CASE("profile conditions on samples") {
    auto d = build_sharpness_disk(kPi / 3);
    const auto& rev = geom::as_revolution(*d.chart);
    const int n = 1000;
    double min_dr = std::numeric_limits<double>::infinity();
    double max_ddr = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        double u = d.s + (1.0 - d.s) * i / (n + 1);
        min_dr = std::min(min_dr, rev.dr_at(u));
        double r = rev.r_at(u);
        CHECK(r >= 0.0);
        // r'' from the closed pieces: cap gives -R^2/r^3, cone 0
        double ddr = u >= d.u0 ? 0.0 : -d.cap_radius * d.cap_radius / (r * r * r);
        max_ddr = std::max(max_ddr, ddr);
    }
    CHECK(min_dr > 0.0);
    CHECK(max_ddr <= 1e-9);
    // Exact cone outside the blend point.
    CHECK(rev.r_at(0.9) == doctest::Approx(d.c * 0.9).epsilon(1e-15));
    CHECK(0.0 < d.s);
    CHECK(d.s < d.u0);
}

TEST_CASE("development oracle: closed lasso at alpha = k/2") {
    auto d = build_sharpness_disk(kPi / 2);
    auto shot = unroll_geodesic_oracle(d, 1.0, d.k / 2);
    CHECK(!shot.self_intersects);
    REQUIRE(shot.arrival_param);
    // Returns to its basepoint through the sector-edge identification.
    CHECK(std::fabs(wrap_angle_diff(*shot.arrival_param, 1.0)) < 1e-9);
    CHECK(shot.length == doctest::Approx(d.lasso_length()).epsilon(1e-12));
    CHECK(*shot.arrival_angle == doctest::Approx(d.k / 2));
    CHECK(shot.min_development_radius ==
          doctest::Approx(d.development_radius(1.0) * std::cos(d.k / 2)).epsilon(1e-12));
}

TEST_CASE("development oracle: self-intersection just above k/2") {
    auto d = build_sharpness_disk(kPi / 2);
    auto shot = unroll_geodesic_oracle(d, 0.0, d.k / 2 + 0.05);
    CHECK(shot.self_intersects);
    CHECK(shot.trajectory.hit == geom::HitType::SelfIntersection);
    // And the ODE tracer agrees.
    auto ode = capillary::shoot_from_boundary(*d.chart, 0.0, d.k / 2 + 0.05, 5.0);
    CHECK(ode.self_intersected);
}

TEST_CASE("development oracle declines the cap region") {
    auto d = build_sharpness_disk(kPi / 2);
    // A radial shot develops through the apex.
    CHECK_THROWS_AS(unroll_geodesic_oracle(d, 0.0, kPi / 2), LeavesConeRegion);
}

TEST_CASE("symmetric bounce at a cone-safe angle") {
    auto d = build_sharpness_disk(kPi / 2);
    double alpha = 0.6;  // below k/2, so the development stays embedded
    auto shot = unroll_geodesic_oracle(d, 2.0, alpha);
    REQUIRE(shot.arrival_param);
    CHECK(*shot.arrival_angle == doctest::Approx(alpha));
    CHECK(shot.min_development_radius ==
          doctest::Approx(d.development_radius(1.0) * std::cos(alpha)).epsilon(1e-12));
    auto ode = capillary::shoot_from_boundary(*d.chart, 2.0, alpha, 5.0);
    REQUIRE(ode.arrival_angle);
    CHECK(*ode.arrival_angle == doctest::Approx(alpha).epsilon(1e-7));
}

TEST_CASE("oracle and ODE agree on random cone-region shots") {
    auto d = build_sharpness_disk(kPi / 2);
    oracles::Rng rng(42);
    int tested = 0;
    double worst = 0.0;
    while (tested < 100) {
        double p = rng.uniform(0.0, kTwoPi);
        double alpha = rng.uniform(0.15, kPi - 0.15);
        // keep the developed chord inside the cone region and short of
        // self-intersection
        if (d.development_radius(1.0) * std::fabs(std::cos(alpha)) <
            d.development_radius(d.u0) * 1.05)
            continue;
        DevelopedShot dev;
        try {
            dev = unroll_geodesic_oracle(d, p, alpha);
        } catch (const LeavesConeRegion&) {
            continue;
        }
        if (dev.self_intersects) continue;
        auto ode = capillary::shoot_from_boundary(*d.chart, p, alpha, 5.0);
        REQUIRE(ode.arrival_param);
        double hd = geom::hausdorff_distance(*d.chart, dev.trajectory.points,
                                             ode.trajectory.points);
        worst = std::max(worst, hd);
        ++tested;
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("verify_sharpness reproduces the nonexistence regime") {
    auto d = build_sharpness_disk(kPi / 2);
    auto rep = verify_sharpness(d, 0.05, 16);
    CHECK(rep.all_shots_self_intersect);
    CHECK(rep.lasso.launch_angle == doctest::Approx(kPi / 4).epsilon(1e-3));
    CHECK(rep.lasso.length == doctest::Approx(rep.oracle_lasso_length).epsilon(1e-3));
    CHECK(rep.lasso.critical);
    CHECK(rep.symmetry_spread < 1e-6);

    auto rep2 = verify_sharpness(d, -0.3, 16);
    CHECK(!rep2.all_shots_self_intersect);
}

TEST_CASE("self-intersection persists over a range of angle offsets") {
    // The offset is only known to be "small"; the observed range is scanned
    // rather than inferred.
    auto d = build_sharpness_disk(kPi / 2);
    for (double eps : {0.01, 0.05, 0.1}) {
        auto rep = verify_sharpness(d, eps, 8);
        CHECK(rep.all_shots_self_intersect);
    }
}

TEST_CASE("oracle rejects invalid construction inputs") {
    CHECK_THROWS(build_sharpness_disk(0.0));
    CHECK_THROWS(build_sharpness_disk(kPi));
}
