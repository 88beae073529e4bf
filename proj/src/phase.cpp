#include "spinmarket/phase.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "spinmarket/errors.hpp"

namespace spinmarket {

void DetectorConfig::validate() const {
    if (!(0.0 <= theta_low && theta_low < theta_high && theta_high <= 1.0)) {
        throw std::invalid_argument(
            "detector thresholds must satisfy 0 <= theta_low < theta_high <= 1");
    }
    if (min_dwell < 1) {
        throw std::invalid_argument("min_dwell must be >= 1");
    }
}

std::vector<double> SojournSeries::durations(Phase phase) const {
    std::vector<double> out;
    for (const auto& s : sojourns) {
        if (s.phase == phase) {
            out.push_back(static_cast<double>(s.duration));
        }
    }
    return out;
}

std::vector<Phase> classify(std::span<const double> m_series,
                            const DetectorConfig& cfg) {
    cfg.validate();
    if (m_series.empty()) {
        throw std::invalid_argument("classify: empty magnetization series");
    }

    std::vector<Phase> labels(m_series.size(), Phase::Undetermined);

    Phase current = Phase::Undetermined;
    Phase run_phase = Phase::Undetermined;  // candidate crossing being dwelt
    std::size_t run_start = 0;
    int run_len = 0;

    for (std::size_t t = 0; t < m_series.size(); ++t) {
        const double abs_m = std::abs(m_series[t]);
        Phase band = Phase::Undetermined;
        if (abs_m >= cfg.theta_high) {
            band = Phase::Ordered;
        } else if (abs_m <= cfg.theta_low) {
            band = Phase::Disordered;
        }

        if (band == Phase::Undetermined || band == current) {
            // In-band values and same-phase values both break any pending run.
            run_len = 0;
            labels[t] = current;
            continue;
        }

        if (run_phase == band && run_len > 0) {
            ++run_len;
        } else {
            run_phase = band;
            run_start = t;
            run_len = 1;
        }

        if (run_len >= cfg.min_dwell) {
            current = band;
            for (std::size_t s = run_start; s <= t; ++s) {
                labels[s] = current;
            }
            run_len = 0;
        } else {
            labels[t] = current;
        }
    }
    return labels;
}

SojournSeries extract_sojourns(std::span<const Phase> labels) {
    // Run-length encode, skipping the Undetermined prefix.
    std::vector<Sojourn> runs;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (labels[t] == Phase::Undetermined) continue;
        if (!runs.empty() && runs.back().phase == labels[t]) {
            ++runs.back().duration;
        } else {
            runs.push_back({labels[t], static_cast<std::int64_t>(t), 1});
        }
    }

    const std::int64_t transitions =
        runs.empty() ? 0 : static_cast<std::int64_t>(runs.size()) - 1;

    auto fail = [transitions]() -> SojournSeries {
        throw insufficient_data_error(
            "no complete ordered+disordered cycle after censoring (" +
                std::to_string(transitions) + " raw transitions)",
            transitions);
    };

    // Both boundary sojourns are censored: their true durations are unknown.
    if (runs.size() < 3) return fail();
    runs.erase(runs.begin());
    runs.pop_back();

    SojournSeries series;
    series.trimmed = true;
    auto count = [&runs](Phase p) {
        std::int64_t n = 0;
        for (const auto& s : runs) n += (s.phase == p) ? 1 : 0;
        return n;
    };
    std::int64_t n_ord = count(Phase::Ordered);
    std::int64_t n_dis = count(Phase::Disordered);
    while (n_ord != n_dis && !runs.empty()) {
        (runs.back().phase == Phase::Ordered ? n_ord : n_dis) -= 1;
        runs.pop_back();
    }
    if (n_ord < 1) return fail();

    series.sojourns = std::move(runs);
    series.n_ord = n_ord;
    series.n_dis = n_dis;
    return series;
}

std::string labeled_trajectory_csv(std::span<const double> m_series,
                                   std::span<const Phase> labels) {
    if (m_series.size() != labels.size()) {
        throw std::invalid_argument("labeled_trajectory_csv: size mismatch");
    }
    std::string out = "sweep,M,phase\n";
    out.reserve(out.size() + m_series.size() * 26);
    char buf[64];
    for (std::size_t t = 0; t < m_series.size(); ++t) {
        const char tag = labels[t] == Phase::Ordered     ? 'O'
                         : labels[t] == Phase::Disordered ? 'D'
                                                          : 'U';
        std::snprintf(buf, sizeof(buf), "%zu,%.12g,%c\n", t, m_series[t], tag);
        out += buf;
    }
    return out;
}

}  // namespace spinmarket
