#include "capgeo/metricfile.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "capgeo/errors.hpp"
#include "capgeo/expr.hpp"

namespace capgeo {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> parse_keys(const std::string& text) {
    std::map<std::string, std::string> keys;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("metric file: expected key = value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        keys[key] = trim(line.substr(eq + 1));
    }
    return keys;
}

double get_double(const std::map<std::string, std::string>& keys, const std::string& key) {
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("metric file: missing key '" + key + "'");
    // Values may be arithmetic expressions (pi/2 etc.).
    return Expr::parse(it->second).eval(0, 0, 0);
}

}  // namespace

MetricDefinition parse_metric_text(const std::string& text) {
    auto keys = parse_keys(text);
    auto it = keys.find("kind");
    if (it == keys.end()) throw ConfigError("metric file: missing kind");
    std::string kind = it->second;

    MetricDefinition def;
    def.kind = kind;
    if (kind == "flat") {
        def.chart = geom::flat_unit_disk();
        return def;
    }
    if (kind == "conformal") {
        auto phi_it = keys.find("phi");
        if (phi_it == keys.end()) throw ConfigError("metric file: conformal needs phi");
        Expr phi = Expr::parse(phi_it->second);
        int resolution = 0;
        if (keys.count("resolution")) resolution = static_cast<int>(get_double(keys, "resolution"));
        if (resolution > 0) {
            def.chart = geom::conformal_disk_grid(
                [phi](Vec2 p) { return phi.eval(p.x, p.y); }, resolution);
        } else {
            def.chart = geom::conformal_disk_expr(phi);
        }
        return def;
    }
    if (kind == "revolution") {
        auto prof_it = keys.find("profile");
        if (prof_it == keys.end()) throw ConfigError("metric file: revolution needs profile");
        Expr r = Expr::parse(prof_it->second);
        double s = keys.count("s") ? get_double(keys, "s") : 0.0;
        geom::RevolutionProfile prof;
        prof.s = s;
        prof.r = [r](double u) { return r.eval(0, 0, u); };
        // Stencil derivatives; the concavity check tolerates their noise.
        prof.dr = [r](double u) {
            const double h = 1e-6;
            return (r.eval(0, 0, u + h) - r.eval(0, 0, u - h)) / (2 * h);
        };
        prof.ddr = [r](double u) {
            const double h = 1e-4;
            double noise_floor = (r.eval(0, 0, u + h) - 2 * r.eval(0, 0, u) + r.eval(0, 0, u - h)) /
                                 (h * h);
            return std::fabs(noise_floor) < 1e-6 ? std::min(noise_floor, 0.0) : noise_floor;
        };
        prof.has_tip = std::fabs(prof.r(s)) < 1e-12;
        def.chart = geom::revolution_disk(std::move(prof));
        return def;
    }
    if (kind == "sharpness") {
        double k = get_double(keys, "k");
        def.sharpness = cone::build_sharpness_disk(k);
        def.chart = def.sharpness->chart;
        return def;
    }
    throw ConfigError("metric file: unknown kind '" + kind + "'");
}

MetricDefinition load_metric_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open metric file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_metric_text(ss.str());
}

}  // namespace capgeo
