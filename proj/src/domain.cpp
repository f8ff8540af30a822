#include "capgeo/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "capgeo/errors.hpp"

namespace capgeo::curve {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

void append_17g(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

SimpleDomain SimpleDomain::empty_domain() { return {}; }

SimpleDomain SimpleDomain::full_domain() {
    SimpleDomain d;
    d.state_ = DomainState::Full;
    return d;
}

SimpleDomain SimpleDomain::proper(const MetricChart& chart, Polyline poly, Side side) {
    if (poly.size() < 2) throw InvalidDomain("proper domain needs at least two vertices");
    double front_coord = chart.interior_coordinate(poly.front());
    double back_coord = chart.interior_coordinate(poly.back());
    if (std::fabs(front_coord) > 1e-7 || std::fabs(back_coord) > 1e-7)
        throw InvalidDomain("relative boundary endpoints must lie on the disk boundary");
    for (size_t i = 1; i + 1 < poly.size(); ++i)
        if (!(chart.interior_coordinate(poly[i]) > 0))
            throw InvalidDomain("interior vertex " + std::to_string(i) +
                                " is not strictly inside the disk");

    // Resample only when spacing is genuinely uneven, so CSV round-trips of
    // an already-uniform curve are stable.
    auto s = geom::cumulative_g_arclength(chart, poly);
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (size_t i = 0; i + 1 < s.size(); ++i) {
        mn = std::min(mn, s[i + 1] - s[i]);
        mx = std::max(mx, s[i + 1] - s[i]);
    }
    if (!(mn > 0)) throw InvalidDomain("degenerate (zero-length) segment");
    if (mx > 3.0 * mn || poly.size() < 16) {
        int n = std::clamp(static_cast<int>(std::ceil(s.back() / 0.01)), 48, 1024);
        poly = geom::resample_uniform(chart, poly, n);
    }

    if (geom::polyline_self_intersects(chart, poly, 1e-10))
        throw InvalidDomain("relative boundary is not embedded");

    SimpleDomain d;
    d.state_ = DomainState::Proper;
    d.side_ = side;
    d.beta_front_ = chart.boundary_param(poly.front(), 1e-6);
    d.beta_back_ = chart.boundary_param(poly.back(), 1e-6);
    d.poly_ = std::move(poly);
    return d;
}

const Polyline& SimpleDomain::relative_boundary() const {
    if (!is_proper()) throw NoEndpoints("sentinel domain has no relative boundary");
    return poly_;
}

Side SimpleDomain::side() const {
    if (!is_proper()) throw NoEndpoints("sentinel domain has no side");
    return side_;
}

SimpleDomain SimpleDomain::flipped() const {
    if (!is_proper()) {
        return state_ == DomainState::Empty ? full_domain() : empty_domain();
    }
    SimpleDomain d = *this;
    d.side_ = side_ == Side::ArcFromFront ? Side::ArcFromBack : Side::ArcFromFront;
    return d;
}

std::pair<double, double> SimpleDomain::endpoint_pair() const {
    if (!is_proper()) throw NoEndpoints("endpoint pair of a sentinel domain");
    if (side_ == Side::ArcFromFront) return {beta_front_, beta_back_};
    return {beta_back_, beta_front_};
}

double SimpleDomain::front_param() const {
    if (!is_proper()) throw NoEndpoints("sentinel domain");
    return beta_front_;
}

double SimpleDomain::back_param() const {
    if (!is_proper()) throw NoEndpoints("sentinel domain");
    return beta_back_;
}

std::pair<double, double> endpoint_pair(const SimpleDomain& dom) { return dom.endpoint_pair(); }

CapillaryMeasure l_theta(const MetricChart& chart, const SimpleDomain& dom, double theta) {
    if (!(theta > 0.0 && theta < kPi / 2))
        throw InvalidTheta("theta must lie in (0, pi/2)");
    CapillaryMeasure m;
    switch (dom.state()) {
        case DomainState::Empty:
            return m;
        case DomainState::Full:
            m.boundary_len = chart.boundary_length();
            m.l_theta = std::cos(theta) * m.boundary_len;
            return m;
        case DomainState::Proper:
            break;
    }
    m.interior_len = geom::g_length(chart, dom.relative_boundary());
    auto [q1, q2] = dom.endpoint_pair();
    m.boundary_len = chart.boundary_arc_ccw(q1, q2);
    m.l_theta = m.interior_len + std::cos(theta) * m.boundary_len;
    return m;
}

namespace {

// Outward curve tangent eta and wetted-arc-leaving boundary tangent nu_bar
// at the endpoint, g-normalized. which = 0 for front, 1 for back.
std::pair<Vec2, Vec2> endpoint_frame(const MetricChart& chart, const SimpleDomain& dom,
                                     int which) {
    const Polyline& poly = dom.relative_boundary();
    Vec2 p, inner;
    double beta;
    if (which == 0) {
        p = poly.front();
        inner = poly[1];
        beta = dom.front_param();
    } else {
        p = poly.back();
        inner = poly[poly.size() - 2];
        beta = dom.back_param();
    }
    Vec2 d = p - inner;
    if (d.norm() < 1e-9) throw DegenerateTangent("terminal segment is too short");
    // Chord direction corrected by the midpoint geodesic-equation term: the
    // raw chord misses the endpoint tangent at first order in the spacing on
    // curved charts.
    Vec2 mid = (p + inner) * 0.5;
    double h = chart.metric(mid).norm(d);
    Vec2 t_in = -d / h;
    t_in = (-d / h) + chart.christoffel(mid).quad(t_in) * (h / 2.0);
    Vec2 eta = -t_in / chart.metric(p).norm(t_in);

    // The wetted arc runs ccw from q1 to q2; nu_bar leaves it. At the arc's
    // start that is the clockwise direction, at its end the ccw direction.
    bool at_arc_start = (which == 0) == (dom.side() == Side::ArcFromFront);
    Vec2 t = chart.boundary_tangent_ccw(beta);
    Vec2 nu = at_arc_start ? -t : t;
    return {eta, nu};
}

}  // namespace

std::pair<double, double> contact_angles(const MetricChart& chart, const SimpleDomain& dom) {
    if (!dom.is_proper()) throw NoEndpoints("contact angles of a sentinel domain");
    std::array<double, 2> out{};
    for (int which = 0; which < 2; ++which) {
        auto [eta, nu] = endpoint_frame(chart, dom, which);
        Vec2 p = which == 0 ? dom.relative_boundary().front() : dom.relative_boundary().back();
        double c = std::clamp(chart.metric(p).dot(eta, nu), -1.0, 1.0);
        out[which] = std::acos(-c);
    }
    return {out[0], out[1]};
}

FirstVariation first_variation_residual(const MetricChart& chart, const SimpleDomain& dom,
                                        double theta) {
    if (!dom.is_proper()) throw NoEndpoints("first variation of a sentinel domain");
    FirstVariation fv;
    fv.max_interior_H = geom::max_geodesic_curvature(chart, dom.relative_boundary());
    for (int which = 0; which < 2; ++which) {
        auto [eta, nu] = endpoint_frame(chart, dom, which);
        Vec2 p = which == 0 ? dom.relative_boundary().front() : dom.relative_boundary().back();
        double defect = std::fabs(chart.metric(p).dot(eta, nu) + std::cos(theta));
        (which == 0 ? fv.angle_defect.first : fv.angle_defect.second) = defect;
    }
    return fv;
}

// ---------------------------------------------------------------------------
// F-distance surrogate.

namespace {

constexpr int kPosFeatures = 16;
constexpr int kDirFeatures = 4;

double pos_feature(int m, Vec2 p) {
    double a = p.x, b = p.y;
    switch (m) {
        case 0: return 1.0;
        case 1: return a;
        case 2: return b;
        case 3: return a * b;
        case 4: return a * a - b * b;
        case 5: return a * a + b * b;
        case 6: return a * (a * a + b * b);
        case 7: return b * (a * a + b * b);
        case 8: return a * a * a - 3 * a * b * b;
        case 9: return 3 * a * a * b - b * b * b;
        case 10: return std::cos(kPi * a);
        case 11: return std::sin(kPi * a);
        case 12: return std::cos(kPi * b);
        case 13: return std::sin(kPi * b);
        case 14: return std::cos(kPi * (a + b));
        case 15: return std::sin(kPi * (a - b));
    }
    return 0.0;
}

double dir_feature(int k, double psi) {
    switch (k) {
        case 0: return 1.0;
        case 1: return std::cos(2 * psi);
        case 2: return std::sin(2 * psi);
        case 3: return std::cos(4 * psi);
    }
    return 0.0;
}

// Lipschitz normalization: each product feature is divided by an upper
// bound of max(|f|, Lip_pos(f), Lip_dir(f)) over the disk, estimated once
// on a fixed grid.
const std::array<double, kPosFeatures * kDirFeatures>& feature_norms() {
    static const auto norms = [] {
        std::array<double, kPosFeatures * kDirFeatures> out{};
        std::array<double, kPosFeatures> maxval{}, maxgrad{};
        const int n = 160;
        const double h = 1e-5;
        for (int m = 0; m < kPosFeatures; ++m) {
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= n; ++j) {
                    Vec2 p{-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n};
                    if (p.norm() > 1.0) continue;
                    double v = pos_feature(m, p);
                    double gx = (pos_feature(m, {p.x + h, p.y}) - pos_feature(m, {p.x - h, p.y})) /
                                (2 * h);
                    double gy = (pos_feature(m, {p.x, p.y + h}) - pos_feature(m, {p.x, p.y - h})) /
                                (2 * h);
                    maxval[m] = std::max(maxval[m], std::fabs(v));
                    maxgrad[m] = std::max(maxgrad[m], std::hypot(gx, gy));
                }
        }
        const std::array<double, kDirFeatures> dmax{1.0, 1.0, 1.0, 1.0};
        const std::array<double, kDirFeatures> dlip{0.0, 2.0, 2.0, 4.0};
        for (int m = 0; m < kPosFeatures; ++m)
            for (int k = 0; k < kDirFeatures; ++k) {
                double bound = std::max({maxval[m] * dmax[k], maxgrad[m] * dmax[k],
                                         maxval[m] * dlip[k], 1e-12});
                out[m * kDirFeatures + k] = bound;
            }
        return out;
    }();
    return norms;
}

struct VarifoldPiece {
    Vec2 pos;     // disk-projection coordinates
    double psi;   // direction angle (mod pi irrelevant: features are doubled)
    double mass;  // metric length, already weighted
};

void collect_pieces(const MetricChart& chart, const SimpleDomain& dom, FMode mode, double theta,
                    std::vector<VarifoldPiece>& out) {
    if (dom.is_proper()) {
        const Polyline& poly = dom.relative_boundary();
        for (size_t i = 0; i + 1 < poly.size(); ++i) {
            Vec2 a = chart.disk_projection(poly[i]);
            Vec2 b = chart.disk_projection(poly[i + 1]);
            Vec2 mid = (a + b) * 0.5;
            Vec2 d = b - a;
            double mass = geom::g_length(chart, {poly[i], poly[i + 1]});
            out.push_back({mid, std::atan2(d.y, d.x), mass});
        }
    }
    if (mode == FMode::Capillary) {
        if (!(theta > 0 && theta < kPi / 2))
            throw InvalidTheta("capillary f-distance needs theta in (0, pi/2)");
        double q1 = 0.0, extent = 0.0;
        if (dom.state() == DomainState::Full) {
            q1 = 0.0;
            extent = kTwoPi;
        } else if (dom.is_proper()) {
            auto [a, b] = dom.endpoint_pair();
            q1 = a;
            extent = b - a;
            if (extent < 0) extent += kTwoPi;
        } else {
            return;  // empty: no boundary varifold
        }
        int n = std::max(8, static_cast<int>(std::ceil(256 * extent / kTwoPi)));
        for (int i = 0; i < n; ++i) {
            double b0 = q1 + extent * i / n;
            double b1 = q1 + extent * (i + 1) / n;
            double bm = 0.5 * (b0 + b1);
            Vec2 pos = chart.disk_projection(chart.boundary_point(bm));
            double mass = chart.boundary_arc_ccw(b0, b1) * std::cos(theta);
            // direction of the rim in projection coordinates
            Vec2 t0 = chart.disk_projection(chart.boundary_point(bm + 1e-5)) -
                      chart.disk_projection(chart.boundary_point(bm - 1e-5));
            out.push_back({pos, std::atan2(t0.y, t0.x), mass});
        }
    }
}

}  // namespace

double f_distance(const MetricChart& chart, const SimpleDomain& a, const SimpleDomain& b,
                  FMode mode, double theta) {
    std::vector<VarifoldPiece> pa, pb;
    collect_pieces(chart, a, mode, theta, pa);
    collect_pieces(chart, b, mode, theta, pb);
    const auto& norms = feature_norms();
    double best = 0.0;
    for (int m = 0; m < kPosFeatures; ++m)
        for (int k = 0; k < kDirFeatures; ++k) {
            double ia = 0.0, ib = 0.0;
            for (const auto& piece : pa)
                ia += pos_feature(m, piece.pos) * dir_feature(k, piece.psi) * piece.mass;
            for (const auto& piece : pb)
                ib += pos_feature(m, piece.pos) * dir_feature(k, piece.psi) * piece.mass;
            best = std::max(best, std::fabs(ia - ib) / norms[m * kDirFeatures + k]);
        }
    return best;
}

double hausdorff(const MetricChart& chart, const Polyline& a, const Polyline& b) {
    return geom::hausdorff_distance(chart, a, b);
}

Polyline closed_boundary(const MetricChart& chart, const SimpleDomain& dom, int arc_samples) {
    if (!dom.is_proper()) throw NoEndpoints("closed boundary of a sentinel domain");
    Polyline loop = dom.relative_boundary();
    // Close through the wetted arc, traversed from the back endpoint to the
    // front endpoint. On charts with a periodic coordinate the arc parameters
    // continue the polyline's lift, so no segment spans a full period.
    double from = dom.back_param();
    double to = dom.front_param();
    bool ccw = dom.side() == Side::ArcFromBack;  // wetted arc = ccw back -> front
    double extent = to - from;
    if (ccw) {
        if (extent < 0) extent += kTwoPi;
    } else {
        if (extent > 0) extent -= kTwoPi;
    }
    if (chart.period() > 0) {
        double lift = loop.back().y;
        from += chart.period() * std::round((lift - from) / chart.period());
    }
    int n = std::max(4, static_cast<int>(std::ceil(std::fabs(extent) / kTwoPi * arc_samples)));
    for (int i = 1; i <= n; ++i) loop.push_back(chart.boundary_point(from + extent * i / n));
    return loop;
}

bool domain_contains(const MetricChart& chart, const SimpleDomain& dom, Vec2 p) {
    switch (dom.state()) {
        case DomainState::Empty: return false;
        case DomainState::Full: return chart.interior_coordinate(p) >= 0;
        case DomainState::Proper: break;
    }
    // Even-odd rule in disk-projection coordinates.
    Polyline loop = closed_boundary(chart, dom);
    Vec2 q = chart.disk_projection(p);
    bool inside = false;
    size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = chart.disk_projection(loop[i]);
        Vec2 b = chart.disk_projection(loop[(i + 1) % n]);
        if ((a.y > q.y) != (b.y > q.y)) {
            double xc = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (xc > q.x) inside = !inside;
        }
    }
    return inside;
}

// ---------------------------------------------------------------------------
// CSV serialization.

void write_polyline_csv(std::ostream& os, const Polyline& poly, const char* header) {
    std::string out = std::string(header) + "\n";
    for (Vec2 p : poly) {
        append_17g(out, p.x);
        out += ',';
        append_17g(out, p.y);
        out += '\n';
    }
    os << out;
}

Polyline read_polyline_csv(std::istream& is) {
    Polyline poly;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        try {
            double x = std::stod(line.substr(0, comma));
            double y = std::stod(line.substr(comma + 1));
            poly.push_back({x, y});
        } catch (const std::exception&) {
            continue;  // header or malformed row
        }
    }
    if (poly.empty()) throw EmptyCurve("polyline CSV contained no points");
    return poly;
}

void write_domain_csv(std::ostream& os, const SimpleDomain& dom, const char* header) {
    switch (dom.state()) {
        case DomainState::Empty: os << "# state,empty\n"; return;
        case DomainState::Full: os << "# state,full\n"; return;
        case DomainState::Proper: break;
    }
    os << "# state,proper\n";
    os << "# side," << (dom.side() == Side::ArcFromFront ? "arc_from_front" : "arc_from_back")
       << "\n";
    write_polyline_csv(os, dom.relative_boundary(), header);
}

SimpleDomain read_domain_csv(const MetricChart& chart, std::istream& is) {
    std::string line;
    std::string state, side;
    Polyline poly;
    while (std::getline(is, line)) {
        if (line.rfind("# state,", 0) == 0) {
            state = line.substr(8);
            continue;
        }
        if (line.rfind("# side,", 0) == 0) {
            side = line.substr(7);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        try {
            double x = std::stod(line.substr(0, comma));
            double y = std::stod(line.substr(comma + 1));
            poly.push_back({x, y});
        } catch (const std::exception&) {
            continue;
        }
    }
    if (state == "empty") return SimpleDomain::empty_domain();
    if (state == "full") return SimpleDomain::full_domain();
    if (state != "proper") throw InvalidDomain("domain CSV: missing or unknown state header");
    Side s = side == "arc_from_back" ? Side::ArcFromBack : Side::ArcFromFront;
    return SimpleDomain::proper(chart, std::move(poly), s);
}

}  // namespace capgeo::curve
