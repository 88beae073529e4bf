#include "spinmarket/model.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace spinmarket {

void ModelParams::validate() const {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("beta must be > 0");
    }
    if (!(alpha >= 0.0)) {
        throw std::invalid_argument("alpha must be >= 0");
    }
    if (side < 3) {
        throw std::invalid_argument(
            "side must be >= 3: Moore neighbors are pairwise distinct only for L >= 3");
    }
}

NeighborTable::NeighborTable(int side) : side_(side) {
    if (side < 3) {
        throw std::invalid_argument(
            "side must be >= 3: Moore neighbors are pairwise distinct only for L >= 3");
    }
    const int n = side * side;
    flat_.resize(static_cast<std::size_t>(n) * 8);
    std::size_t k = 0;
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const int rr = (r + dr + side) % side;
                    const int cc = (c + dc + side) % side;
                    flat_[k++] = static_cast<std::int32_t>(rr * side + cc);
                }
            }
        }
    }
}

NeighborTable build_neighbor_table(int side) { return NeighborTable(side); }

SpinState SpinState::random(int agents, Rng64& rng) {
    SpinState state;
    state.spins_.resize(static_cast<std::size_t>(agents));
    int sum = 0;
    for (auto& s : state.spins_) {
        s = rng.next_spin();
        sum += s;
    }
    state.spin_sum_ = sum;
    return state;
}

SpinState SpinState::uniform(int agents, std::int8_t value) {
    SpinState state;
    state.spins_.assign(static_cast<std::size_t>(agents), value);
    state.spin_sum_ = agents * value;
    return state;
}

SpinState SpinState::from_spins(std::vector<std::int8_t> spins) {
    SpinState state;
    state.spins_ = std::move(spins);
    state.spin_sum_ = state.recompute_spin_sum();
    return state;
}

int SpinState::recompute_spin_sum() const {
    return std::accumulate(spins_.begin(), spins_.end(), 0,
                           [](int acc, std::int8_t s) { return acc + s; });
}

double magnetization(const SpinState& state) {
    return static_cast<double>(state.spin_sum()) / state.agents();
}

double flip_probability(double h, double beta) {
    const double x = 2.0 * beta * h;
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

/// Shared single-site kernel: both update_site and the sweep loop go through
/// this, so the two paths are update-for-update identical.
inline void heat_bath_update(SpinState& state, int site, double alpha,
                             double beta, const NeighborTable& table,
                             double inv_agents, Rng64& rng) {
    const auto nbrs = table.neighbors(site);
    int neighbor_sum = 0;
    for (int j = 0; j < 8; ++j) {
        neighbor_sum += state.spin(nbrs[static_cast<std::size_t>(j)]);
    }
    const double abs_m = std::abs(state.spin_sum() * inv_agents);
    const double h = neighbor_sum - alpha * state.spin(site) * abs_m;
    const double u = rng.next_uniform01();
    state.set_spin(site, u < flip_probability(h, beta) ? std::int8_t{1}
                                                       : std::int8_t{-1});
}

}  // namespace

double local_field(const SpinState& state, int site, const ModelParams& params,
                   const NeighborTable& table) {
    const auto nbrs = table.neighbors(site);
    int neighbor_sum = 0;
    for (int j = 0; j < 8; ++j) {
        neighbor_sum += state.spin(nbrs[static_cast<std::size_t>(j)]);
    }
    const double abs_m = std::abs(magnetization(state));
    return neighbor_sum - params.alpha * state.spin(site) * abs_m;
}

void update_site(SpinState& state, int site, const ModelParams& params,
                 const NeighborTable& table, Rng64& rng) {
    heat_bath_update(state, site, params.alpha, params.beta, table,
                     1.0 / state.agents(), rng);
}

void sweep(SpinState& state, const ModelParams& params,
           const NeighborTable& table, Rng64& rng) {
    const int n = state.agents();
    const double inv_agents = 1.0 / n;
    for (int k = 0; k < n; ++k) {
        const int site = rng.next_site(n);
        heat_bath_update(state, site, params.alpha, params.beta, table,
                         inv_agents, rng);
    }
}

Trajectory run_trajectory(const ModelParams& params, std::int64_t n_sweeps,
                          std::int64_t burn_in, std::uint64_t seed) {
    params.validate();
    if (n_sweeps <= 0) {
        throw std::invalid_argument("n_sweeps must be > 0");
    }
    if (burn_in < 0) {
        throw std::invalid_argument("burn_in must be >= 0");
    }

    const NeighborTable table(params.side);
    Rng64 rng(seed);
    SpinState state = SpinState::random(params.agents(), rng);

    for (std::int64_t t = 0; t < burn_in; ++t) {
        sweep(state, params, table, rng);
    }

    Trajectory trajectory;
    trajectory.params = params;
    trajectory.seed = seed;
    trajectory.burn_in = burn_in;
    trajectory.m_series.reserve(static_cast<std::size_t>(n_sweeps));
    for (std::int64_t t = 0; t < n_sweeps; ++t) {
        sweep(state, params, table, rng);
        trajectory.m_series.push_back(magnetization(state));
    }
    return trajectory;
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "sweep,M\n";
    out.reserve(out.size() + trajectory.m_series.size() * 24);
    char buf[64];
    for (std::size_t t = 0; t < trajectory.m_series.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", t,
                      trajectory.m_series[t]);
        out += buf;
    }
    return out;
}

}  // namespace spinmarket
