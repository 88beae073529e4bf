#include "spinmarket/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace spinmarket {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 560.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 200.0;  // room for the legend
constexpr double kMarginTop = 48.0;
constexpr double kMarginBottom = 64.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log_scale = false;

    double transform(double v) const { return log_scale ? std::log10(v) : v; }

    double unit(double v) const {
        const double t0 = transform(lo), t1 = transform(hi);
        return (transform(v) - t0) / (t1 - t0);
    }
};

std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9;
         t += step) {
        ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    }
    return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> ticks;
    const int k0 = static_cast<int>(std::floor(std::log10(lo))) - 1;
    const int k1 = static_cast<int>(std::ceil(std::log10(hi))) + 1;
    for (int k = k0; k <= k1; ++k) {
        for (double m : {1.0, 2.0, 5.0}) {
            const double v = m * std::pow(10.0, k);
            if (v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12)) {
                ticks.push_back(v);
            }
        }
    }
    return ticks;
}

}  // namespace

std::string render_line_chart(const ChartSpec& spec) {
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    auto grow = [&](double x, double y) {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    };
    for (const auto& s : spec.series) {
        for (const auto& [x, y] : s.points) grow(x, y);
    }
    for (const auto& [x, y] : spec.markers) grow(x, y);
    if (!(x_lo <= x_hi) || !(y_lo <= y_hi)) {
        throw std::invalid_argument("render_line_chart: no data points");
    }
    if (x_lo == x_hi) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    if (y_lo == y_hi) {
        y_lo = spec.log_y ? y_lo * 0.5 : y_lo - 1.0;
        y_hi = spec.log_y ? y_hi * 2.0 : y_hi + 1.0;
    }
    // A little headroom so curves do not touch the frame.
    if (spec.log_y) {
        y_lo /= 1.3;
        y_hi *= 1.3;
    } else {
        const double pad = 0.06 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    }

    const Axis xa{x_lo, x_hi, spec.log_x};
    const Axis ya{y_lo, y_hi, spec.log_y};
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double v) { return kMarginLeft + xa.unit(v) * plot_w; };
    auto py = [&](double v) {
        return kHeight - kMarginBottom - ya.unit(v) * plot_h;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
           "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) +
           " " + fmt(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(kWidth / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" +
           spec.title + "</text>\n";

    // Frame.
    svg += "<rect x=\"" + fmt(kMarginLeft) + "\" y=\"" + fmt(kMarginTop) +
           "\" width=\"" + fmt(plot_w) + "\" height=\"" + fmt(plot_h) +
           "\" fill=\"none\" stroke=\"#333\"/>\n";

    const auto x_ticks = spec.log_x ? log_ticks(x_lo, x_hi)
                                    : linear_ticks(x_lo, x_hi);
    for (double t : x_ticks) {
        const double x = px(t);
        svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kMarginTop) +
               "\" x2=\"" + fmt(x) + "\" y2=\"" +
               fmt(kHeight - kMarginBottom) +
               "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
        svg += "<text x=\"" + fmt(x) + "\" y=\"" +
               fmt(kHeight - kMarginBottom + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"11\">" +
               fmt(t) + "</text>\n";
    }
    const auto y_ticks = spec.log_y ? log_ticks(y_lo, y_hi)
                                    : linear_ticks(y_lo, y_hi);
    for (double t : y_ticks) {
        const double y = py(t);
        svg += "<line x1=\"" + fmt(kMarginLeft) + "\" y1=\"" + fmt(y) +
               "\" x2=\"" + fmt(kWidth - kMarginRight) + "\" y2=\"" + fmt(y) +
               "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
        svg += "<text x=\"" + fmt(kMarginLeft - 6) + "\" y=\"" + fmt(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" "
               "font-size=\"11\">" +
               fmt(t) + "</text>\n";
    }

    svg += "<text x=\"" + fmt(kMarginLeft + plot_w / 2) + "\" y=\"" +
           fmt(kHeight - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">" +
           spec.x_label + "</text>\n";
    svg += "<text x=\"20\" y=\"" + fmt(kMarginTop + plot_h / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 20 " +
           fmt(kMarginTop + plot_h / 2) + ")\">" + spec.y_label + "</text>\n";

    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto& s = spec.series[i];
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(*kPalette))];
        std::string pts;
        for (const auto& [x, y] : s.points) {
            pts += fmt(px(x)) + "," + fmt(py(y)) + " ";
        }
        svg += "<polyline points=\"" + pts +
               "\" fill=\"none\" stroke-width=\"1.5\" stroke=\"" + color +
               "\"/>\n";
        for (const auto& [x, y] : s.points) {
            svg += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) +
                   "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        }
        // Legend entry.
        const double ly = kMarginTop + 14.0 + 18.0 * static_cast<double>(i);
        const double lx = kWidth - kMarginRight + 14.0;
        svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly - 4) +
               "\" x2=\"" + fmt(lx + 22) + "\" y2=\"" + fmt(ly - 4) +
               "\" stroke-width=\"2\" stroke=\"" + color + "\"/>\n";
        svg += "<text x=\"" + fmt(lx + 28) + "\" y=\"" + fmt(ly) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label +
               "</text>\n";
    }

    for (const auto& [x, y] : spec.markers) {
        svg += "<rect x=\"" + fmt(px(x) - 4) + "\" y=\"" + fmt(py(y) - 4) +
               "\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"black\" "
               "stroke-width=\"1.5\"/>\n";
    }

    svg += "</svg>\n";
    return svg;
}

namespace {

std::string curve_label(const nlohmann::json& curve) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "L=%d beta=%.6g",
                  curve.at("side").get<int>(), curve.at("beta").get<double>());
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << body;
}

}  // namespace

std::vector<std::filesystem::path> write_figures(
    const nlohmann::json& report, const std::filesystem::path& outdir) {
    std::filesystem::create_directories(outdir);
    std::vector<std::filesystem::path> written;

    struct AlphaFigure {
        const char* stem;
        const char* field;
        const char* y_label;
        bool log_y;
        bool markers;
    };
    const AlphaFigure figures[] = {
        {"fig1_pi_ord", "pi_ord", "pi_ord", false, false},
        {"fig2_lambda_ord", "lambda_ord", "lambda_ord (1/sweep)", false, false},
        {"fig3_t_renew", "t_renew", "T_renew (sweeps)", true, true},
    };

    const auto& curves = report.at("curves");
    for (const auto& fig : figures) {
        ChartSpec spec;
        spec.title = std::string(fig.field) + " vs alpha";
        spec.x_label = "alpha";
        spec.y_label = fig.y_label;
        spec.log_y = fig.log_y;
        std::string csv = "side,beta,alpha," + std::string(fig.field) + "\n";
        char buf[160];
        for (const auto& curve : curves) {
            Series series;
            series.label = curve_label(curve);
            for (const auto& p : curve.at("points")) {
                const double alpha = p.at("alpha").get<double>();
                const double value = p.at(fig.field).get<double>();
                series.points.emplace_back(alpha, value);
                std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g\n",
                              curve.at("side").get<int>(),
                              curve.at("beta").get<double>(), alpha, value);
                csv += buf;
            }
            if (!series.points.empty()) spec.series.push_back(series);
            if (fig.markers && curve.contains("t_renew_min")) {
                spec.markers.emplace_back(
                    curve.at("t_renew_min").at("location").get<double>(),
                    curve.at("t_renew_min").at("value").get<double>());
            }
        }
        const auto svg_path = outdir / (std::string(fig.stem) + ".svg");
        const auto csv_path = outdir / (std::string(fig.stem) + ".csv");
        write_file(svg_path, render_line_chart(spec));
        write_file(csv_path, csv);
        written.push_back(svg_path);
        written.push_back(csv_path);
    }

    // fig5: minimum renewal period against beta, log-log, one series per side.
    ChartSpec fig5;
    fig5.title = "T_renew(alpha*) vs beta";
    fig5.x_label = "beta";
    fig5.y_label = "T_renew(alpha*) (sweeps)";
    fig5.log_x = true;
    fig5.log_y = true;
    std::string csv5 = "side,beta,t_renew_min\n";
    char buf[160];
    for (const auto& entry : report.at("power_law").at("per_side")) {
        Series series;
        char label[48];
        std::snprintf(label, sizeof(label), "L=%d", entry.at("side").get<int>());
        series.label = label;
        for (const auto& pair : entry.at("pairs")) {
            const double beta = pair.at(0).get<double>();
            const double value = pair.at(1).get<double>();
            series.points.emplace_back(beta, value);
            std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g\n",
                          entry.at("side").get<int>(), beta, value);
            csv5 += buf;
        }
        if (!series.points.empty()) fig5.series.push_back(series);
    }
    const auto svg5 = outdir / "fig5_scaling.svg";
    const auto csv5_path = outdir / "fig5_scaling.csv";
    write_file(svg5, render_line_chart(fig5));
    write_file(csv5_path, csv5);
    written.push_back(svg5);
    written.push_back(csv5_path);

    return written;
}

}  // namespace spinmarket
