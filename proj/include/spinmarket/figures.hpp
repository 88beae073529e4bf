#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace spinmarket {

/// One polyline on a chart.
struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
    // Square markers, drawn on top (spline minima).
    std::vector<std::pair<double, double>> markers;
};

/// Self-contained SVG line chart; deterministic bytes for a given spec.
std::string render_line_chart(const ChartSpec& spec);

/// Emits the four figures and their backing CSVs from an analysis report:
///   fig1  pi_ord(alpha)            fig2  lambda_ord(alpha)
///   fig3  t_renew(alpha) + minima  fig5  t_renew(alpha*) vs beta, log-log
/// Returns the written file paths. Throws on missing report fields.
std::vector<std::filesystem::path> write_figures(
    const nlohmann::json& report, const std::filesystem::path& outdir);

}  // namespace spinmarket
