#include "capgeo/polyline.hpp"

#include <algorithm>
#include <cmath>

#include "capgeo/errors.hpp"

namespace capgeo::geom {

namespace {

double seg_g_length(const MetricChart& chart, Vec2 a, Vec2 b) {
    Vec2 d = b - a;
    // Trapezoidal metric weight over the segment.
    double la = chart.metric(a).norm(d);
    double lb = chart.metric(b).norm(d);
    return 0.5 * (la + lb);
}

}  // namespace

double g_length(const MetricChart& chart, const Polyline& poly) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < poly.size(); ++i)
        total += seg_g_length(chart, poly[i], poly[i + 1]);
    return total;
}

std::vector<double> cumulative_g_arclength(const MetricChart& chart, const Polyline& poly) {
    std::vector<double> s(poly.size(), 0.0);
    for (size_t i = 0; i + 1 < poly.size(); ++i)
        s[i + 1] = s[i] + seg_g_length(chart, poly[i], poly[i + 1]);
    return s;
}

Polyline resample_uniform(const MetricChart& chart, const Polyline& poly, int n) {
    if (poly.size() < 2 || n < 1) throw EmptyCurve("resample: need a polyline and n >= 1");
    auto s = cumulative_g_arclength(chart, poly);
    double total = s.back();
    Polyline out;
    out.reserve(static_cast<size_t>(n) + 1);
    out.push_back(poly.front());
    size_t k = 0;
    for (int i = 1; i < n; ++i) {
        double target = total * i / n;
        while (k + 1 < s.size() && s[k + 1] < target) ++k;
        double span = s[k + 1] - s[k];
        double w = span > 0 ? (target - s[k]) / span : 0.0;
        out.push_back(poly[k] + (poly[k + 1] - poly[k]) * w);
    }
    out.push_back(poly.back());
    return out;
}

Vec2 curvature_vector(const MetricChart& chart, const Polyline& poly, size_t i) {
    Vec2 pm = poly[i - 1], p = poly[i], pp = poly[i + 1];
    double a = seg_g_length(chart, pm, p);
    double b = seg_g_length(chart, p, pp);
    if (a <= 0 || b <= 0) throw DegenerateTangent("curvature_vector: zero-length segment");
    Vec2 second = ((pp - p) / b - (p - pm) / a) * (2.0 / (a + b));
    Vec2 tangent = (pp - pm) / (a + b);
    return second + chart.christoffel(p).quad(tangent);
}

double max_geodesic_curvature(const MetricChart& chart, const Polyline& poly) {
    double m = 0.0;
    for (size_t i = 1; i + 1 < poly.size(); ++i) {
        Vec2 h = curvature_vector(chart, poly, i);
        m = std::max(m, chart.metric(poly[i]).norm(h));
    }
    return m;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, Vec2* point) {
    Vec2 r = b - a, s = d - c;
    double denom = r.cross(s);
    Vec2 ca = c - a;
    if (denom == 0.0) return false;  // parallel or collinear: no proper crossing
    double t = ca.cross(s) / denom;
    double u = ca.cross(r) / denom;
    if (t <= 0.0 || t >= 1.0 || u <= 0.0 || u >= 1.0) return false;
    if (point) *point = a + r * t;
    return true;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 d = b - a;
    double len2 = d.norm2();
    if (len2 == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    return (p - (a + d * t)).norm();
}

double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_cross(a, b, c, d, nullptr)) return 0.0;
    return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                    std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

SegmentGrid::SegmentGrid(double cell, double period) : cell_(cell), period_(period) {
    if (cell_ <= 0) cell_ = 1e-3;
}

namespace {

int64_t cell_key(int ix, int iy) {
    return (static_cast<int64_t>(ix) << 32) ^ (static_cast<int64_t>(iy) & 0xffffffffLL);
}

}  // namespace

void SegmentGrid::cells_for(Vec2 a, Vec2 b, std::vector<int64_t>& out) const {
    out.clear();
    double x0 = std::min(a.x, b.x), x1 = std::max(a.x, b.x);
    double y0 = std::min(a.y, b.y), y1 = std::max(a.y, b.y);
    if (period_ > 0) {
        double base = std::floor(y0 / period_) * period_;
        y0 -= base;
        y1 -= base;
    }
    int ix0 = static_cast<int>(std::floor(x0 / cell_)), ix1 = static_cast<int>(std::floor(x1 / cell_));
    int iy0 = static_cast<int>(std::floor(y0 / cell_)), iy1 = static_cast<int>(std::floor(y1 / cell_));
    int wrap_cells = period_ > 0 ? static_cast<int>(std::ceil(period_ / cell_)) : 0;
    for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy) {
            int jy = iy;
            if (period_ > 0) {
                jy %= wrap_cells;
                if (jy < 0) jy += wrap_cells;
            }
            out.push_back(cell_key(ix, jy));
        }
}

void SegmentGrid::insert(Vec2 a, Vec2 b) {
    uint32_t idx = static_cast<uint32_t>(segs_.size());
    segs_.push_back({a, b});
    std::vector<int64_t> keys;
    cells_for(a, b, keys);
    for (int64_t k : keys) {
        auto& bucket = cells_[k];
        if (bucket.empty() || bucket.back() != idx) bucket.push_back(idx);
    }
}

std::optional<SegmentHit> SegmentGrid::first_crossing(Vec2 a, Vec2 b, size_t skip_from) const {
    std::vector<int64_t> keys;
    cells_for(a, b, keys);
    std::optional<SegmentHit> best;
    double best_t = 2.0;
    Vec2 r = b - a;
    for (int64_t k : keys) {
        auto it = cells_.find(k);
        if (it == cells_.end()) continue;
        for (uint32_t idx : it->second) {
            if (idx >= skip_from) continue;
            const Seg& s = segs_[idx];
            int mlo = 0, mhi = 0;
            if (period_ > 0) {
                double mid_gap = (0.5 * (a.y + b.y) - 0.5 * (s.a.y + s.b.y)) / period_;
                int m = static_cast<int>(std::lround(mid_gap));
                mlo = m - 1;
                mhi = m + 1;
            }
            for (int m = mlo; m <= mhi; ++m) {
                Vec2 shift{0.0, period_ * m};
                Vec2 point;
                if (segments_cross(a, b, s.a + shift, s.b + shift, &point)) {
                    double t = r.norm2() > 0 ? (point - a).dot(r) / r.norm2() : 0.0;
                    if (t < best_t) {
                        best_t = t;
                        best = SegmentHit{idx, segs_.size(), point};
                    }
                }
            }
        }
    }
    return best;
}

bool SegmentGrid::any_contact(double tol) const {
    std::vector<int64_t> keys;
    for (size_t i = 0; i < segs_.size(); ++i) {
        Vec2 a = segs_[i].a, b = segs_[i].b;
        Vec2 pad{tol, tol};
        cells_for(a - pad, b + pad, keys);
        for (int64_t k : keys) {
            auto it = cells_.find(k);
            if (it == cells_.end()) continue;
            for (uint32_t idx : it->second) {
                if (idx + 1 >= i || (idx == 0 && i + 1 == segs_.size() && segs_.size() > 2 &&
                                     (segs_.front().a - segs_.back().b).norm() < tol))
                    continue;  // adjacent (or closing) pairs share a vertex
                const Seg& s = segs_[idx];
                int mlo = 0, mhi = 0;
                if (period_ > 0) {
                    double mid_gap = (0.5 * (a.y + b.y) - 0.5 * (s.a.y + s.b.y)) / period_;
                    int m = static_cast<int>(std::lround(mid_gap));
                    mlo = m - 1;
                    mhi = m + 1;
                }
                for (int m = mlo; m <= mhi; ++m) {
                    Vec2 shift{0.0, period_ * m};
                    if (segment_distance(a, b, s.a + shift, s.b + shift) < tol) return true;
                }
            }
        }
    }
    return false;
}

bool polyline_self_intersects(const MetricChart& chart, const Polyline& poly, double tol) {
    if (poly.size() < 3) return false;
    double maxseg = 0.0;
    for (size_t i = 0; i + 1 < poly.size(); ++i)
        maxseg = std::max(maxseg, (poly[i + 1] - poly[i]).norm());
    SegmentGrid grid(std::max(maxseg, 4 * tol), chart.period());
    for (size_t i = 0; i + 1 < poly.size(); ++i) grid.insert(poly[i], poly[i + 1]);
    return grid.any_contact(tol);
}

double hausdorff_distance(const MetricChart& chart, const Polyline& a, const Polyline& b,
                          double step) {
    if (a.size() < 1 || b.size() < 1) throw EmptyCurve("hausdorff: empty polyline");

    auto embed = [&chart](const Polyline& poly) {
        std::vector<Vec3> pts;
        pts.reserve(poly.size());
        for (Vec2 p : poly) pts.push_back(chart.chordal(p));
        return pts;
    };
    auto densify = [&](const Polyline& poly) {
        std::vector<Vec3> pts;
        for (size_t i = 0; i + 1 < poly.size(); ++i) {
            Vec3 pa = chart.chordal(poly[i]);
            Vec3 pb = chart.chordal(poly[i + 1]);
            double len = (pb - pa).norm();
            int n = std::max(1, static_cast<int>(std::ceil(len / step)));
            for (int j = 0; j < n; ++j) {
                double w = static_cast<double>(j) / n;
                pts.push_back(Vec3{pa.x + (pb.x - pa.x) * w, pa.y + (pb.y - pa.y) * w,
                                   pa.z + (pb.z - pa.z) * w});
            }
        }
        pts.push_back(chart.chordal(poly.back()));
        return pts;
    };
    auto point_to_chain = [](const Vec3& p, const std::vector<Vec3>& chain) {
        double best = std::numeric_limits<double>::infinity();
        if (chain.size() == 1) return (p - chain[0]).norm();
        for (size_t i = 0; i + 1 < chain.size(); ++i) {
            Vec3 d{chain[i + 1].x - chain[i].x, chain[i + 1].y - chain[i].y,
                   chain[i + 1].z - chain[i].z};
            Vec3 w{p.x - chain[i].x, p.y - chain[i].y, p.z - chain[i].z};
            double len2 = d.norm2();
            double t = len2 > 0 ? std::clamp((w.x * d.x + w.y * d.y + w.z * d.z) / len2, 0.0, 1.0)
                                : 0.0;
            Vec3 q{chain[i].x + d.x * t, chain[i].y + d.y * t, chain[i].z + d.z * t};
            best = std::min(best, (p - q).norm());
        }
        return best;
    };

    auto chain_a = embed(a);
    auto chain_b = embed(b);
    auto dense_a = densify(a);
    auto dense_b = densify(b);
    double d_ab = 0.0, d_ba = 0.0;
    for (const Vec3& p : dense_a) d_ab = std::max(d_ab, point_to_chain(p, chain_b));
    for (const Vec3& p : dense_b) d_ba = std::max(d_ba, point_to_chain(p, chain_a));
    return std::max(d_ab, d_ba);
}

}  // namespace capgeo::geom
