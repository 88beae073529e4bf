#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinmarket/phase.hpp"

namespace spinmarket {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Exact Boltzmann distribution over the 512 states of the 3x3 torus with
/// Moore adjacency under H = -sum_{i<j} J_ij S_i S_j. Brute-force oracle:
/// owns its adjacency derivation and energy sum, independent of the Monte
/// Carlo kernel it is used to check. State index: bit i set iff S_i = +1.
std::vector<double> exact_boltzmann_3x3(double beta);

/// Per-sweep state histogram from the real kernel at alpha = 0, side = 3,
/// normalized to frequencies.
std::vector<double> empirical_state_distribution_3x3(double beta,
                                                     std::int64_t n_sweeps,
                                                     std::int64_t burn_in,
                                                     std::uint64_t seed);

double total_variation(const std::vector<double>& p,
                       const std::vector<double>& q);

/// Alternating renewal series with exponential sojourns (rates per sweep),
/// durations discretized by ceil to integer sweeps, generated directly with
/// no lattice involved.
SojournSeries synthetic_alternating_renewal(double rate_ord, double rate_dis,
                                            std::int64_t n_cycles,
                                            std::uint64_t seed);

enum class FaultInjection { None, SpinSumCache };

/// Fast invariant suite (sub-second): kernel identities, detector and
/// renewal arithmetic, spline and power-law checks.
std::vector<CheckResult> run_quick_checks(
    FaultInjection fault = FaultInjection::None);

/// Quick suite plus the 3x3 Gibbs-oracle comparison (10^6 sweeps) and the
/// synthetic renewal-rate recovery (10^4 cycles).
std::vector<CheckResult> run_full_checks(
    FaultInjection fault = FaultInjection::None);

}  // namespace spinmarket
