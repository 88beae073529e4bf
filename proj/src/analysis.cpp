#include "spinmarket/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "spinmarket/version.hpp"

namespace spinmarket {

namespace {

nlohmann::json extremum_json(const ExtremumEstimate& e) {
    return {{"location", e.location},
            {"value", e.value},
            {"interior", e.interior}};
}

std::vector<CurvePoint> curve_of(const CurveGroup& group,
                                 double RenewalEstimate::*field) {
    std::vector<CurvePoint> points;
    points.reserve(group.points.size());
    for (const auto& p : group.points) {
        points.push_back({p.alpha, p.est.*field, p.est.n_cycles});
    }
    return points;
}

struct VariantAccumulator {
    double n_cycles = 0.0;
    double sum_ord = 0.0;
    double sum_dis = 0.0;
};

struct VariantCurve {
    double beta = 0.0;
    std::map<double, VariantAccumulator> by_alpha;
};

std::string variant_label(double d_high, double d_low) {
    char buf[64];
    if (d_high != 0.0) {
        std::snprintf(buf, sizeof(buf), "theta_high%+.3f", d_high);
    } else {
        std::snprintf(buf, sizeof(buf), "theta_low%+.3f", d_low);
    }
    return buf;
}

/// Recomputes the aggregated critical coupling under one stored detector
/// variant, from the per-run sufficient statistics.
nlohmann::json sensitivity_variant_json(
    std::span<const RunRecord> records, const DetectorConfig& base,
    double d_high, double d_low, double confidence,
    std::optional<double> base_mean) {
    const double want_high = base.theta_high + d_high;
    const double want_low = base.theta_low + d_low;

    nlohmann::json out{{"label", variant_label(d_high, d_low)},
                       {"theta_high", want_high},
                       {"theta_low", want_low}};

    std::map<std::pair<int, std::string>, VariantCurve> curves;
    std::size_t matched_records = 0;
    for (const auto& r : records) {
        for (const auto& s : r.sensitivity) {
            if (std::abs(s.theta_high - want_high) > 1e-12 ||
                std::abs(s.theta_low - want_low) > 1e-12) {
                continue;
            }
            ++matched_records;
            auto& curve = curves[{r.side, beta_key(r.beta)}];
            curve.beta = r.beta;
            auto& acc = curve.by_alpha[r.alpha];
            acc.n_cycles += static_cast<double>(s.n_cycles);
            acc.sum_ord += s.sum_ord;
            acc.sum_dis += s.sum_dis;
        }
    }
    if (matched_records == 0) {
        out["available"] = false;
        out["reason"] = "no stored sensitivity stats at these thresholds";
        return out;
    }

    std::vector<CriticalPointSummary::Minimum> minima;
    int unusable = 0;
    for (const auto& [key, curve] : curves) {
        std::vector<CurvePoint> points;
        for (const auto& [alpha, acc] : curve.by_alpha) {
            if (acc.n_cycles < 1.0) continue;
            points.push_back(
                {alpha, (acc.sum_ord + acc.sum_dis) / acc.n_cycles, 0});
        }
        if (points.size() < 3) {
            ++unusable;
            continue;
        }
        const auto minimum =
            find_extremum(fit_spline(points), ExtremumKind::Min);
        minima.push_back({curve.beta, key.first, minimum.location});
    }
    out["unusable_curves"] = unusable;
    out["n_minima"] = minima.size();
    if (minima.size() < 2) {
        out["available"] = false;
        out["reason"] = "fewer than 2 per-(beta, side) minima";
        return out;
    }
    const auto summary = aggregate_minima(std::move(minima), confidence);
    out["available"] = true;
    out["alpha_star_mean"] = summary.mean;
    out["alpha_star_half_width"] = summary.half_width;
    if (base_mean) {
        out["shift_vs_base"] = summary.mean - *base_mean;
    }
    return out;
}

}  // namespace

nlohmann::json build_report(std::span<const RunRecord> records,
                            const AnalysisOptions& options) {
    const auto groups = collect(records);

    nlohmann::json report;
    report["engine_version"] = kEngineVersion;
    report["confidence"] = options.confidence;
    report["n_records"] = records.size();
    {
        std::set<std::int64_t> sweeps, burns;
        for (const auto& r : records) {
            sweeps.insert(r.n_sweeps);
            burns.insert(r.burn_in);
        }
        report["n_sweeps"] = sweeps;
        report["burn_in"] = burns;
    }
    const DetectorConfig& detector = groups.front().detector;
    report["detector"] = {{"theta_high", detector.theta_high},
                          {"theta_low", detector.theta_low},
                          {"min_dwell", detector.min_dwell}};

    bool identity_all_pass = true;
    double identity_max_rel_err = 0.0;

    std::vector<CriticalPointSummary::Minimum> t_renew_minima;
    bool all_minima_interior = true;
    // side -> (beta, minimum t_renew value)
    std::map<int, std::vector<std::pair<double, double>>> scaling_pairs;

    nlohmann::json curves = nlohmann::json::array();
    for (const auto& group : groups) {
        nlohmann::json g{{"side", group.side},
                         {"beta", group.beta},
                         {"beta_key", group.key},
                         {"omitted_alphas", group.omitted_alphas},
                         {"insufficient_runs", group.insufficient_runs},
                         {"failed_runs", group.failed_runs},
                         {"usable", group.usable}};

        nlohmann::json points = nlohmann::json::array();
        for (const auto& p : group.points) {
            const double mean_cycle =
                (p.est.sum_ord + p.est.sum_dis) /
                static_cast<double>(p.est.n_cycles);
            const double rel_err =
                std::abs(p.est.t_renew - mean_cycle) / p.est.t_renew;
            const bool pass = rel_err <= options.identity_rel_tol;
            identity_all_pass = identity_all_pass && pass;
            identity_max_rel_err = std::max(identity_max_rel_err, rel_err);
            points.push_back({{"alpha", p.alpha},
                              {"t_renew", p.est.t_renew},
                              {"pi_ord", p.est.pi_ord},
                              {"lambda_ord", p.est.lambda_ord},
                              {"lambda_dis", p.est.lambda_dis},
                              {"n_cycles", p.est.n_cycles},
                              {"ks_ord", p.est.ks_ord},
                              {"ks_dis", p.est.ks_dis},
                              {"seeds_used", p.seeds_used},
                              {"identity_rel_err", rel_err},
                              {"identity_pass", pass}});
        }
        g["points"] = points;

        if (group.usable) {
            const auto t_spline = fit_spline(curve_of(group, &RenewalEstimate::t_renew));
            const auto pi_spline = fit_spline(curve_of(group, &RenewalEstimate::pi_ord));
            const auto lm_spline = fit_spline(curve_of(group, &RenewalEstimate::lambda_ord));
            const auto t_min = find_extremum(t_spline, ExtremumKind::Min);
            g["t_renew_min"] = extremum_json(t_min);
            g["pi_ord_min"] =
                extremum_json(find_extremum(pi_spline, ExtremumKind::Min));
            g["lambda_ord_max"] =
                extremum_json(find_extremum(lm_spline, ExtremumKind::Max));

            t_renew_minima.push_back({group.beta, group.side, t_min.location});
            all_minima_interior = all_minima_interior && t_min.interior;
            scaling_pairs[group.side].emplace_back(group.beta, t_min.value);
        }
        curves.push_back(std::move(g));
    }
    report["curves"] = curves;

    report["identity_check"] = {{"all_pass", identity_all_pass},
                                {"max_rel_err", identity_max_rel_err}};

    std::optional<double> base_alpha_star;
    if (t_renew_minima.size() >= 2) {
        nlohmann::json minima = nlohmann::json::array();
        for (const auto& m : t_renew_minima) {
            minima.push_back(
                {{"beta", m.beta}, {"side", m.side}, {"location", m.location}});
        }
        const auto summary =
            aggregate_minima(t_renew_minima, options.confidence);
        base_alpha_star = summary.mean;
        report["alpha_star"] = {{"available", true},
                                {"minima", minima},
                                {"mean", summary.mean},
                                {"half_width", summary.half_width},
                                {"confidence", summary.confidence},
                                {"all_interior", all_minima_interior}};
    } else {
        report["alpha_star"] = {
            {"available", false},
            {"reason", "fewer than 2 usable per-(beta, side) spline minima"}};
    }

    nlohmann::json per_side = nlohmann::json::array();
    std::map<int, PowerLawFit> fits;
    for (auto& [side, pairs] : scaling_pairs) {
        std::sort(pairs.begin(), pairs.end());
        nlohmann::json entry{{"side", side}};
        nlohmann::json jpairs = nlohmann::json::array();
        for (const auto& [beta, value] : pairs) {
            jpairs.push_back({beta, value});
        }
        entry["pairs"] = jpairs;
        if (pairs.size() >= 2) {
            const auto fit = fit_power_law(pairs);
            fits[side] = fit;
            entry["exponent"] = fit.exponent;
            entry["log_prefactor"] = fit.log_prefactor;
            entry["r_squared"] = fit.r_squared;
            entry["available"] = true;
        } else {
            entry["available"] = false;
            entry["reason"] = "fewer than 2 (beta, minimum) pairs";
        }
        per_side.push_back(std::move(entry));
    }
    nlohmann::json power_law{{"per_side", per_side}};
    if (fits.size() == 2) {
        const auto small = fits.begin();
        const auto large = std::next(fits.begin());
        power_law["prefactor_ratio"] =
            prefactor_ratio(large->second, small->second);
        power_law["prefactor_ratio_sides"] = {large->first, small->first};
    }
    report["power_law"] = power_law;

    const double deltas[4][2] = {{+options.theta_high_delta, 0.0},
                                 {-options.theta_high_delta, 0.0},
                                 {0.0, +options.theta_low_delta},
                                 {0.0, -options.theta_low_delta}};
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& d : deltas) {
        variants.push_back(sensitivity_variant_json(
            records, detector, d[0], d[1], options.confidence,
            base_alpha_star));
    }
    report["sensitivity"] = {{"theta_high_delta", options.theta_high_delta},
                             {"theta_low_delta", options.theta_low_delta},
                             {"variants", variants}};

    return report;
}

std::string report_to_string(const nlohmann::json& report) {
    return report.dump(2) + "\n";
}

}  // namespace spinmarket
