#pragma once

#include <optional>
#include <string>

#include "capgeo/chart.hpp"
#include "capgeo/cone.hpp"

namespace capgeo {

// Parsed metric definition (plain-text key = value lines; grammar in
// docs/metric-format.md).
struct MetricDefinition {
    geom::ChartPtr chart;
    std::string kind;
    std::optional<cone::SharpnessDisk> sharpness;  // set when kind = sharpness
};

MetricDefinition parse_metric_text(const std::string& text);
MetricDefinition load_metric_file(const std::string& path);

}  // namespace capgeo
