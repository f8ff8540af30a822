#pragma once

#include <string>
#include <vector>

#include "capgeo/vec2.hpp"

namespace capgeo {

// Minimal deterministic SVG writer for the emitted figures.
class SvgCanvas {
public:
    SvgCanvas(double min_x, double min_y, double max_x, double max_y, int pixels = 720);

    void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width = 1.5,
                  bool closed = false);
    void circle(Vec2 center, double radius, const std::string& stroke,
                const std::string& fill = "none", double width = 1.5);
    void rect(Vec2 lo, Vec2 hi, const std::string& fill);
    void text(Vec2 at, const std::string& content, int size = 14);
    std::string finish() const;

private:
    double min_x_, min_y_, max_x_, max_y_;
    int pixels_w_, pixels_h_;
    std::string body_;

    Vec2 map(Vec2 p) const;
    double scale() const;
};

// Piecewise-constant heatmap with a small diverging palette.
std::string heatmap_svg(const std::vector<std::vector<double>>& values, const std::string& title);

}  // namespace capgeo
