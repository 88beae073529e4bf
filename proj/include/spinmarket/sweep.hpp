#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinmarket/model.hpp"
#include "spinmarket/phase.hpp"
#include "spinmarket/renewal.hpp"
#include "spinmarket/spline.hpp"

namespace spinmarket {

/// Canonical 12-decimal rendering used for grouping and resume keys, so an
/// inexact beta like 1/3 never splits into two float keys.
std::string beta_key(double beta);

/// Full experiment grid. Defaults reproduce the study grid: alpha 2..8,
/// T = 1/beta in {5,4,3,2}, sides 16 and 32, 5 seeds per point.
struct SweepConfig {
    std::vector<double> alphas{2, 3, 4, 5, 6, 7, 8};
    std::vector<double> betas{0.2, 0.25, 0.333333333333, 0.5};
    std::vector<int> sides{16, 32};
    int seeds_per_point = 5;
    std::int64_t n_sweeps = 1'000'000;
    std::int64_t burn_in = 10'000;
    DetectorConfig detector{};
    double sensitivity_delta = 0.05;
    std::uint64_t master_seed = 1;

    void validate() const;
    static SweepConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct RunSpec {
    std::int64_t index = 0;
    double alpha = 0.0;
    double beta = 0.0;
    int side = 0;
    int seed_slot = 0;
    std::uint64_t seed = 0;
};

struct SweepPlan {
    SweepConfig config;
    std::vector<RunSpec> runs;
};

/// Deterministic enumeration in lexicographic (side, beta, alpha, seed-slot)
/// order; per-run seed = mix_seed(master_seed, run index).
SweepPlan plan(const SweepConfig& config);

/// Renewal sufficient statistics under one shifted detector variant.
struct SensitivityStat {
    double theta_high = 0.0;
    double theta_low = 0.0;
    std::int64_t n_cycles = 0;
    double sum_ord = 0.0;
    double sum_dis = 0.0;
};

struct RunRecord {
    std::int64_t run_index = 0;
    double alpha = 0.0;
    double beta = 0.0;
    int side = 0;
    int seed_slot = 0;
    std::uint64_t seed = 0;
    std::int64_t n_sweeps = 0;
    std::int64_t burn_in = 0;
    DetectorConfig detector{};
    std::string status;  // "ok" | "insufficient_data" | "failed"
    std::optional<RenewalEstimate> estimate;
    std::vector<double> ord_durations;
    std::vector<double> dis_durations;
    std::vector<SensitivityStat> sensitivity;
    std::int64_t transitions = 0;  // raw transition count when insufficient
    std::string error;             // message when failed
    double wall_time_s = 0.0;
    std::string engine_version;

    nlohmann::json to_json() const;
    static RunRecord from_json(const nlohmann::json& j);

    /// Resume key: one record per (params, seed).
    std::string key() const;
};

/// Append-only JSON-lines store. Appends are serialized internally; loading
/// dedupes by key, keeping the latest record.
class ResultStore {
public:
    explicit ResultStore(std::filesystem::path path);

    const std::filesystem::path& path() const { return path_; }
    bool exists() const;
    std::vector<RunRecord> load() const;
    void append(const RunRecord& record);

    /// CSV export: side,beta,alpha,seed,pi_ord,lambda_ord,lambda_dis,t_renew,n_cycles
    /// (successful records only, canonical order).
    static std::string to_csv(std::span<const RunRecord> records);

private:
    std::filesystem::path path_;
    mutable std::mutex write_mutex_;
};

/// Run one planned point end to end: trajectory, detection at the base
/// detector plus the four shifted variants, renewal estimation.
RunRecord execute_run(const RunSpec& spec, const SweepConfig& config);

/// Executes all plan entries missing from the store on `workers` threads.
/// Completed records (ok or insufficient_data) are skipped; failed ones are
/// retried. Returns the number of runs executed. A summary line per
/// completed run goes to `progress` when non-null.
int execute(const SweepPlan& plan, ResultStore& store, int workers,
            std::ostream* progress = nullptr);

/// Seed-pooled estimate for one alpha of one (beta, side) group.
struct PooledPoint {
    double alpha = 0.0;
    RenewalEstimate est;
    int seeds_used = 0;
};

struct CurveGroup {
    int side = 0;
    double beta = 0.0;
    std::string key;  // beta_key(beta)
    DetectorConfig detector{};
    std::vector<PooledPoint> points;     // ordered by alpha
    std::vector<double> omitted_alphas;  // no usable data
    int insufficient_runs = 0;
    int failed_runs = 0;
    bool usable = false;  // >= 3 points, enough for a spline
};

/// Groups records by (side, beta), pools seeds per alpha, emits curves in
/// canonical (side, beta, alpha) order. All records must share one detector
/// config; mixing detectors in one store is an input error.
std::vector<CurveGroup> collect(std::span<const RunRecord> records);

}  // namespace spinmarket
