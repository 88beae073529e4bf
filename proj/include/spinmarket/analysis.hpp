#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "spinmarket/sweep.hpp"

namespace spinmarket {

struct AnalysisOptions {
    double confidence = 0.99;
    // Which stored sensitivity variants to report; must match the deltas the
    // sweep recorded (trajectories are not persisted, so detection cannot be
    // redone at analyze time).
    double theta_high_delta = 0.05;
    double theta_low_delta = 0.05;
    // Relative tolerance of the per-point t_renew == mean-cycle identity.
    double identity_rel_tol = 1e-12;
};

/// Builds the full analysis report: per-(beta, side) curves with spline
/// extrema, the aggregated critical coupling, per-side power-law fits with
/// the prefactor ratio, the renewal-identity check, and the detector
/// sensitivity table. Deterministic: the same records and options yield
/// byte-identical JSON.
nlohmann::json build_report(std::span<const RunRecord> records,
                            const AnalysisOptions& options);

std::string report_to_string(const nlohmann::json& report);

}  // namespace spinmarket
