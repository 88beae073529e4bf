#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinmarket/rng.hpp"

namespace spinmarket {

/// Update schedule for the Monte Carlo dynamics. Only asynchronous random-site
/// heat-bath is implemented; the enum exists so configs can name it.
enum class UpdateSchedule : std::uint8_t { RandomSite };

/// Physics knobs of one simulation: coupling alpha, inverse temperature beta,
/// lattice side L (agents = L^2), update schedule.
struct ModelParams {
    double alpha = 6.0;
    double beta = 0.5;
    int side = 32;
    UpdateSchedule schedule = UpdateSchedule::RandomSite;

    int agents() const { return side * side; }

    /// Throws std::invalid_argument unless beta > 0, alpha >= 0 and side >= 3
    /// (Moore neighbors are pairwise distinct only for L >= 3).
    void validate() const;
};

/// Adjacency of the periodic L x L lattice with Moore (8-site) neighborhoods.
/// Row i lists the 8 distinct neighbors of site i; the relation is symmetric.
class NeighborTable {
public:
    explicit NeighborTable(int side);

    std::span<const std::int32_t> neighbors(int site) const {
        return {flat_.data() + static_cast<std::size_t>(site) * 8, 8};
    }

    int side() const { return side_; }
    int agents() const { return side_ * side_; }

private:
    int side_;
    std::vector<std::int32_t> flat_;
};

NeighborTable build_neighbor_table(int side);

/// +/-1 spin array with a running spin-sum cache so magnetization is O(1).
class SpinState {
public:
    /// i.i.d. uniform +/-1 spins, one raw draw per site.
    static SpinState random(int agents, Rng64& rng);
    static SpinState uniform(int agents, std::int8_t value);
    static SpinState from_spins(std::vector<std::int8_t> spins);

    std::int8_t spin(int i) const { return spins_[static_cast<std::size_t>(i)]; }

    void set_spin(int i, std::int8_t value) {
        auto& s = spins_[static_cast<std::size_t>(i)];
        spin_sum_ += value - s;
        s = value;
    }

    int spin_sum() const { return spin_sum_; }
    int agents() const { return static_cast<int>(spins_.size()); }
    const std::vector<std::int8_t>& spins() const { return spins_; }

    /// Full O(N) recount, for consistency checks against the cache.
    int recompute_spin_sum() const;

    /// Validation hook: desynchronizes the cache so the consistency check in
    /// `validate` can demonstrate that it actually fires.
    void corrupt_spin_sum(int delta) { spin_sum_ += delta; }

private:
    SpinState() = default;
    std::vector<std::int8_t> spins_;
    int spin_sum_ = 0;
};

/// M = (1/N) sum_i S_i, read from the cache.
double magnetization(const SpinState& state);

/// h_i = sum_{j in nbrs(i)} S_j - alpha * S_i * |M|, with M the instantaneous
/// magnetization from the spin-sum cache.
double local_field(const SpinState& state, int site, const ModelParams& params,
                   const NeighborTable& table);

/// p = 1 / (1 + exp(-2 beta h)), computed with the sign-split form so large
/// |2 beta h| saturates to 0 or 1 instead of overflowing.
double flip_probability(double h, double beta);

/// Heat-bath update of one site: draws one uniform u and sets S_i = +1 iff
/// u < flip_probability(local_field(i), beta). Exactly one draw consumed.
void update_site(SpinState& state, int site, const ModelParams& params,
                 const NeighborTable& table, Rng64& rng);

/// One time step: N_agents random-site updates (with replacement). Each
/// update consumes a site draw then an acceptance draw.
void sweep(SpinState& state, const ModelParams& params,
           const NeighborTable& table, Rng64& rng);

/// Per-sweep magnetization record of one run.
struct Trajectory {
    ModelParams params;
    std::uint64_t seed = 0;
    std::int64_t burn_in = 0;
    std::vector<double> m_series;
};

/// Random initial state from `seed`, `burn_in` unrecorded sweeps, then
/// `n_sweeps` recorded ones. (params, seed, n_sweeps, burn_in) fully
/// determines the result.
Trajectory run_trajectory(const ModelParams& params, std::int64_t n_sweeps,
                          std::int64_t burn_in, std::uint64_t seed);

/// CSV with header `sweep,M`, one row per recorded sweep, 12 significant
/// digits for M.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace spinmarket
