#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spinmarket {

enum class Phase : std::uint8_t { Undetermined, Ordered, Disordered };

/// Hysteresis detector over |M(t)|: enter Ordered at theta_high, Disordered
/// at theta_low, and require a crossing to persist min_dwell sweeps before it
/// registers. Values inside the open band keep the current label.
struct DetectorConfig {
    double theta_high = 0.5;
    double theta_low = 0.25;
    int min_dwell = 1;

    void validate() const;
};

struct Sojourn {
    Phase phase = Phase::Undetermined;
    std::int64_t start = 0;     // sweep index of the first labeled sweep
    std::int64_t duration = 0;  // sweeps, >= 1
};

/// Strictly alternating complete-cycle sojourns: censored head/tail removed
/// and trailing sojourns dropped until n_ord == n_dis.
struct SojournSeries {
    std::vector<Sojourn> sojourns;
    bool trimmed = false;
    std::int64_t n_ord = 0;
    std::int64_t n_dis = 0;

    std::vector<double> durations(Phase phase) const;
};

/// Per-sweep phase labels from the hysteresis state machine. A qualifying
/// crossing labels retroactively from the first sweep of its dwell run, so
/// sojourn boundaries land on the crossing itself. The prefix before the
/// first committed label stays Undetermined.
std::vector<Phase> classify(std::span<const double> m_series,
                            const DetectorConfig& cfg);

/// Run-length encodes labels, drops the censored first and last sojourns,
/// then drops trailing sojourns until ordered and disordered counts match.
/// Throws insufficient_data_error (with the raw transition count) when no
/// complete cycle survives.
SojournSeries extract_sojourns(std::span<const Phase> labels);

/// CSV with header `sweep,M,phase`, phase in {O, D, U}.
std::string labeled_trajectory_csv(std::span<const double> m_series,
                                   std::span<const Phase> labels);

}  // namespace spinmarket
