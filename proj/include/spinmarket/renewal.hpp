#pragma once

#include <cstdint>
#include <span>

#include "spinmarket/phase.hpp"

namespace spinmarket {

/// Renewal quantities of one parameter point. Invariants (held to machine
/// precision by construction):
///   pi_ord  = lambda_dis / (lambda_ord + lambda_dis)
///   t_renew = 1 / (lambda_ord * pi_ord) = mean complete-cycle length
struct RenewalEstimate {
    double pi_ord = 0.0;
    double lambda_ord = 0.0;  // per sweep
    double lambda_dis = 0.0;  // per sweep
    double t_renew = 0.0;     // sweeps
    std::int64_t n_cycles = 0;
    double ks_ord = 0.0;  // KS distance of ordered durations vs Exp(matched mean)
    double ks_dis = 0.0;
    double sum_ord = 0.0;  // total sweeps in each phase; sufficient statistics
    double sum_dis = 0.0;
};

/// One-sample Kolmogorov-Smirnov distance against an exponential with the
/// sample mean. Diagnostic only; the renewal identity holds regardless.
double ks_statistic_exponential(std::span<const double> sample);

/// Maximum-likelihood exponential rates from complete sojourn samples:
/// lambda_ord = n_ord / sum(ordered), pi_ord = sum(ordered) / total, the
/// rest by the steady-state relations. Requires equal-size samples (complete
/// cycles); throws insufficient_data_error otherwise.
RenewalEstimate estimate_from_durations(std::span<const double> ordered,
                                        std::span<const double> disordered);

RenewalEstimate estimate(const SojournSeries& series);

/// Concatenates sojourn samples across same-parameter series, then estimates.
/// Pool of one series is exactly estimate(series).
RenewalEstimate pool(std::span<const SojournSeries> series);

}  // namespace spinmarket
