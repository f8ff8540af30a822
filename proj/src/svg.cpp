#include "capgeo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace capgeo {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(double min_x, double min_y, double max_x, double max_y, int pixels)
    : min_x_(min_x), min_y_(min_y), max_x_(max_x), max_y_(max_y) {
    double aspect = (max_y_ - min_y_) / (max_x_ - min_x_);
    pixels_w_ = pixels;
    pixels_h_ = std::max(64, static_cast<int>(std::lround(pixels * aspect)));
}

double SvgCanvas::scale() const { return pixels_w_ / (max_x_ - min_x_); }

Vec2 SvgCanvas::map(Vec2 p) const {
    return {(p.x - min_x_) * scale(), (max_y_ - p.y) * scale()};
}

void SvgCanvas::polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width,
                         bool closed) {
    body_ += closed ? "<polygon points=\"" : "<polyline points=\"";
    for (Vec2 p : pts) {
        Vec2 q = map(p);
        body_ += num(q.x) + "," + num(q.y) + " ";
    }
    body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgCanvas::circle(Vec2 center, double radius, const std::string& stroke,
                       const std::string& fill, double width) {
    Vec2 q = map(center);
    body_ += "<circle cx=\"" + num(q.x) + "\" cy=\"" + num(q.y) + "\" r=\"" +
             num(radius * scale()) + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
             "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgCanvas::rect(Vec2 lo, Vec2 hi, const std::string& fill) {
    Vec2 a = map({lo.x, hi.y});
    Vec2 b = map({hi.x, lo.y});
    body_ += "<rect x=\"" + num(a.x) + "\" y=\"" + num(a.y) + "\" width=\"" + num(b.x - a.x) +
             "\" height=\"" + num(b.y - a.y) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::text(Vec2 at, const std::string& content, int size) {
    Vec2 q = map(at);
    body_ += "<text x=\"" + num(q.x) + "\" y=\"" + num(q.y) + "\" font-size=\"" +
             std::to_string(size) + "\" font-family=\"monospace\">" + content + "</text>\n";
}

std::string SvgCanvas::finish() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(pixels_w_) + "\" height=\"" + std::to_string(pixels_h_) +
                      "\" viewBox=\"0 0 " + std::to_string(pixels_w_) + " " +
                      std::to_string(pixels_h_) + "\">\n<rect width=\"100%\" height=\"100%\" " +
                      "fill=\"white\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

std::string heatmap_svg(const std::vector<std::vector<double>>& values, const std::string& title) {
    size_t rows = values.size();
    size_t cols = rows ? values[0].size() : 0;
    if (!rows || !cols) return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";
    double lo = values[0][0], hi = values[0][0];
    for (const auto& row : values)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi <= lo) hi = lo + 1.0;

    SvgCanvas canvas(0, 0, static_cast<double>(cols), static_cast<double>(rows) + 2.0);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) {
            double w = (values[r][c] - lo) / (hi - lo);
            int red = static_cast<int>(std::lround(255 * w));
            int blue = static_cast<int>(std::lround(255 * (1.0 - w)));
            char color[16];
            std::snprintf(color, sizeof color, "#%02x20%02x", red, blue);
            canvas.rect({static_cast<double>(c), static_cast<double>(r)},
                        {static_cast<double>(c + 1), static_cast<double>(r + 1)}, color);
        }
    canvas.text({0.2, rows + 1.2}, title, 16);
    return canvas.finish();
}

}  // namespace capgeo
