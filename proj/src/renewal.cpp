#include "spinmarket/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spinmarket/errors.hpp"

namespace spinmarket {

double ks_statistic_exponential(std::span<const double> sample) {
    if (sample.empty()) return 0.0;
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double mean =
        std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
    if (!(mean > 0.0)) return 1.0;
    const double rate = 1.0 / mean;
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = 1.0 - std::exp(-rate * sorted[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

RenewalEstimate estimate_from_durations(std::span<const double> ordered,
                                        std::span<const double> disordered) {
    if (ordered.empty() || disordered.empty() ||
        ordered.size() != disordered.size()) {
        throw insufficient_data_error(
            "renewal estimate needs equal nonzero counts of ordered and "
            "disordered sojourns",
            static_cast<std::int64_t>(ordered.size() + disordered.size()));
    }
    const double sum_ord =
        std::accumulate(ordered.begin(), ordered.end(), 0.0);
    const double sum_dis =
        std::accumulate(disordered.begin(), disordered.end(), 0.0);
    const double n = static_cast<double>(ordered.size());

    RenewalEstimate est;
    est.n_cycles = static_cast<std::int64_t>(ordered.size());
    est.sum_ord = sum_ord;
    est.sum_dis = sum_dis;
    est.lambda_ord = n / sum_ord;
    est.pi_ord = sum_ord / (sum_ord + sum_dis);
    // lambda_ord * pi_ord / (1 - pi_ord) reduces to n / sum_dis because the
    // trimming forces n_ord == n_dis; the direct form stays exact as pi -> 1.
    est.lambda_dis = n / sum_dis;
    est.t_renew = 1.0 / (est.lambda_ord * est.pi_ord);
    est.ks_ord = ks_statistic_exponential(ordered);
    est.ks_dis = ks_statistic_exponential(disordered);
    return est;
}

RenewalEstimate estimate(const SojournSeries& series) {
    const auto ord = series.durations(Phase::Ordered);
    const auto dis = series.durations(Phase::Disordered);
    return estimate_from_durations(ord, dis);
}

RenewalEstimate pool(std::span<const SojournSeries> series) {
    std::vector<double> ord;
    std::vector<double> dis;
    for (const auto& s : series) {
        const auto o = s.durations(Phase::Ordered);
        const auto d = s.durations(Phase::Disordered);
        ord.insert(ord.end(), o.begin(), o.end());
        dis.insert(dis.end(), d.begin(), d.end());
    }
    return estimate_from_durations(ord, dis);
}

}  // namespace spinmarket
