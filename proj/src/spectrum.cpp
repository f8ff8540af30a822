#include <Eigen/Dense>
#include <cmath>

#include "capgeo/capillary.hpp"
#include "capgeo/errors.hpp"

namespace capgeo::capillary {

namespace {

struct Discretization {
    std::vector<double> s;  // node arclengths
    Eigen::MatrixXd A;      // stiffness - curvature mass - Robin corners
    Eigen::MatrixXd M;      // mass
    double length = 0.0;
};

Discretization assemble(const geom::MetricChart& chart, const CapillaryGeodesic& geo,
                        int nodes) {
    if (nodes < 8) throw Error("stability discretization needs at least 8 nodes");
    const double fv_tol = 1e-5;
    if (geo.residual.max_interior_H > fv_tol || geo.residual.angle_defect.first > fv_tol ||
        geo.residual.angle_defect.second > fv_tol)
        throw ResidualTooLarge("stability operator: input is not a capillary geodesic");

    geom::Polyline poly =
        geom::resample_uniform(chart, geo.domain.relative_boundary(), nodes - 1);
    auto s = geom::cumulative_g_arclength(chart, poly);
    int n = static_cast<int>(poly.size());

    std::vector<double> curv(n);
    for (int i = 0; i < n; ++i) curv[i] = chart.gaussian_curvature(poly[i]);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e + 1 < n; ++e) {
        double h = s[e + 1] - s[e];
        double kmid = 0.5 * (curv[e] + curv[e + 1]);
        double stiff = 1.0 / h;
        double m00 = h / 3.0, m01 = h / 6.0;
        A(e, e) += stiff - kmid * m00;
        A(e + 1, e + 1) += stiff - kmid * m00;
        A(e, e + 1) += -stiff - kmid * m01;
        A(e + 1, e) += -stiff - kmid * m01;
        // Consistent mass plus the h^2/12 stiffness shift, which cancels the
        // leading P1 eigenvalue dispersion.
        double shift = h * h / 12.0;
        M(e, e) += m00 + shift * stiff;
        M(e + 1, e + 1) += m00 + shift * stiff;
        M(e, e + 1) += m01 - shift * stiff;
        M(e + 1, e) += m01 - shift * stiff;
    }

    double sin_theta = std::sin(geo.theta);
    double kappa1 = chart.boundary_geodesic_curvature_at(poly.front());
    double kappa2 = chart.boundary_geodesic_curvature_at(poly.back());
    A(0, 0) -= kappa1 / sin_theta;
    A(n - 1, n - 1) -= kappa2 / sin_theta;

    Discretization d;
    d.s = std::move(s);
    d.A = std::move(A);
    d.M = std::move(M);
    d.length = d.s.back();
    return d;
}

}  // namespace

SpectrumReport morse_index(const geom::MetricChart& chart, const CapillaryGeodesic& geo,
                           int nodes) {
    Discretization d = assemble(chart, geo, nodes);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(d.A, d.M);
    if (solver.info() != Eigen::Success)
        throw Error("stability operator: eigensolver did not converge");

    SpectrumReport rep;
    rep.zero_tol = 1e-4 / (d.length * d.length);
    rep.nodes = d.s;
    const auto& vals = solver.eigenvalues();
    rep.eigenvalues.assign(vals.data(), vals.data() + vals.size());
    for (double l : rep.eigenvalues) {
        if (l < -rep.zero_tol) ++rep.index;
        else if (l <= rep.zero_tol) ++rep.nullity;
    }
    int keep = std::min<int>(3, static_cast<int>(vals.size()));
    for (int k = 0; k < keep; ++k) {
        auto col = solver.eigenvectors().col(k);
        rep.eigenfunctions.emplace_back(col.data(), col.data() + col.size());
    }
    return rep;
}

double stability_form(const geom::MetricChart& chart, const CapillaryGeodesic& geo,
                      const std::function<double(double)>& f, int nodes) {
    Discretization d = assemble(chart, geo, nodes);
    Eigen::VectorXd v(d.s.size());
    for (size_t i = 0; i < d.s.size(); ++i) v[static_cast<int>(i)] = f(d.s[i]);
    return v.dot(d.A * v);
}

}  // namespace capgeo::capillary
