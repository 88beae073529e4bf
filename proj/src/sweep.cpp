#include "spinmarket/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "spinmarket/errors.hpp"
#include "spinmarket/rng.hpp"
#include "spinmarket/version.hpp"

namespace spinmarket {

std::string beta_key(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12f", beta);
    return buf;
}

namespace {

std::string alpha_key(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12f", alpha);
    return buf;
}

void require_strictly_increasing(std::span<const double> values,
                                 const char* name) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw std::invalid_argument(std::string(name) +
                                        " grid must be strictly increasing");
        }
    }
}

}  // namespace

void SweepConfig::validate() const {
    if (alphas.empty() || betas.empty() || sides.empty()) {
        throw std::invalid_argument("sweep grid lists must be nonempty");
    }
    require_strictly_increasing(alphas, "alpha");
    require_strictly_increasing(betas, "beta");
    for (std::size_t i = 1; i < sides.size(); ++i) {
        if (sides[i] <= sides[i - 1]) {
            throw std::invalid_argument("side grid must be strictly increasing");
        }
    }
    for (double a : alphas) {
        if (!(a >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    }
    for (double b : betas) {
        if (!(b > 0.0)) throw std::invalid_argument("beta must be > 0");
    }
    for (int s : sides) {
        ModelParams p;
        p.side = s;
        p.validate();
    }
    if (seeds_per_point < 1) {
        throw std::invalid_argument("seeds_per_point must be >= 1");
    }
    if (n_sweeps <= 0) throw std::invalid_argument("n_sweeps must be > 0");
    if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
    detector.validate();
    if (!(sensitivity_delta > 0.0)) {
        throw std::invalid_argument("sensitivity_delta must be > 0");
    }
}

SweepConfig SweepConfig::from_json(const nlohmann::json& j) {
    SweepConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "alphas") {
            cfg.alphas = value.get<std::vector<double>>();
        } else if (key == "betas") {
            cfg.betas = value.get<std::vector<double>>();
        } else if (key == "sides") {
            cfg.sides = value.get<std::vector<int>>();
        } else if (key == "seeds_per_point") {
            cfg.seeds_per_point = value.get<int>();
        } else if (key == "n_sweeps") {
            cfg.n_sweeps = value.get<std::int64_t>();
        } else if (key == "burn_in") {
            cfg.burn_in = value.get<std::int64_t>();
        } else if (key == "detector") {
            cfg.detector.theta_high = value.at("theta_high").get<double>();
            cfg.detector.theta_low = value.at("theta_low").get<double>();
            cfg.detector.min_dwell = value.value("min_dwell", 1);
        } else if (key == "sensitivity_delta") {
            cfg.sensitivity_delta = value.get<double>();
        } else if (key == "master_seed") {
            cfg.master_seed = value.get<std::uint64_t>();
        } else {
            throw std::invalid_argument("unknown sweep config key: " + key);
        }
    }
    cfg.validate();
    return cfg;
}

nlohmann::json SweepConfig::to_json() const {
    return {
        {"alphas", alphas},
        {"betas", betas},
        {"sides", sides},
        {"seeds_per_point", seeds_per_point},
        {"n_sweeps", n_sweeps},
        {"burn_in", burn_in},
        {"detector",
         {{"theta_high", detector.theta_high},
          {"theta_low", detector.theta_low},
          {"min_dwell", detector.min_dwell}}},
        {"sensitivity_delta", sensitivity_delta},
        {"master_seed", master_seed},
    };
}

SweepPlan plan(const SweepConfig& config) {
    config.validate();
    SweepPlan p;
    p.config = config;
    std::int64_t index = 0;
    for (int side : config.sides) {
        for (double beta : config.betas) {
            for (double alpha : config.alphas) {
                for (int slot = 0; slot < config.seeds_per_point; ++slot) {
                    RunSpec spec;
                    spec.index = index;
                    spec.alpha = alpha;
                    spec.beta = beta;
                    spec.side = side;
                    spec.seed_slot = slot;
                    spec.seed = mix_seed(config.master_seed,
                                         static_cast<std::uint64_t>(index));
                    p.runs.push_back(spec);
                    ++index;
                }
            }
        }
    }
    return p;
}

nlohmann::json RunRecord::to_json() const {
    nlohmann::json j{
        {"run_index", run_index},
        {"alpha", alpha},
        {"beta", beta},
        {"side", side},
        {"seed_slot", seed_slot},
        {"seed", seed},
        {"n_sweeps", n_sweeps},
        {"burn_in", burn_in},
        {"detector",
         {{"theta_high", detector.theta_high},
          {"theta_low", detector.theta_low},
          {"min_dwell", detector.min_dwell}}},
        {"status", status},
        {"wall_time_s", wall_time_s},
        {"engine_version", engine_version},
    };
    if (estimate) {
        j["estimate"] = {
            {"pi_ord", estimate->pi_ord},
            {"lambda_ord", estimate->lambda_ord},
            {"lambda_dis", estimate->lambda_dis},
            {"t_renew", estimate->t_renew},
            {"n_cycles", estimate->n_cycles},
            {"ks_ord", estimate->ks_ord},
            {"ks_dis", estimate->ks_dis},
            {"sum_ord", estimate->sum_ord},
            {"sum_dis", estimate->sum_dis},
        };
        // Durations are integer sweep counts; stored as integers.
        std::vector<std::int64_t> ord(ord_durations.begin(),
                                      ord_durations.end());
        std::vector<std::int64_t> dis(dis_durations.begin(),
                                      dis_durations.end());
        j["ord_durations"] = ord;
        j["dis_durations"] = dis;
    }
    if (!sensitivity.empty()) {
        nlohmann::json variants = nlohmann::json::array();
        for (const auto& s : sensitivity) {
            variants.push_back({{"theta_high", s.theta_high},
                                {"theta_low", s.theta_low},
                                {"n_cycles", s.n_cycles},
                                {"sum_ord", s.sum_ord},
                                {"sum_dis", s.sum_dis}});
        }
        j["sensitivity"] = variants;
    }
    if (status == "insufficient_data") j["transitions"] = transitions;
    if (status == "failed") j["error"] = error;
    return j;
}

RunRecord RunRecord::from_json(const nlohmann::json& j) {
    RunRecord r;
    r.run_index = j.at("run_index").get<std::int64_t>();
    r.alpha = j.at("alpha").get<double>();
    r.beta = j.at("beta").get<double>();
    r.side = j.at("side").get<int>();
    r.seed_slot = j.at("seed_slot").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n_sweeps = j.value("n_sweeps", std::int64_t{0});
    r.burn_in = j.value("burn_in", std::int64_t{0});
    if (j.contains("detector")) {
        const auto& d = j.at("detector");
        r.detector.theta_high = d.at("theta_high").get<double>();
        r.detector.theta_low = d.at("theta_low").get<double>();
        r.detector.min_dwell = d.value("min_dwell", 1);
    }
    r.status = j.at("status").get<std::string>();
    r.wall_time_s = j.value("wall_time_s", 0.0);
    r.engine_version = j.value("engine_version", std::string{});
    if (j.contains("estimate")) {
        const auto& e = j.at("estimate");
        RenewalEstimate est;
        est.pi_ord = e.at("pi_ord").get<double>();
        est.lambda_ord = e.at("lambda_ord").get<double>();
        est.lambda_dis = e.at("lambda_dis").get<double>();
        est.t_renew = e.at("t_renew").get<double>();
        est.n_cycles = e.at("n_cycles").get<std::int64_t>();
        est.ks_ord = e.at("ks_ord").get<double>();
        est.ks_dis = e.at("ks_dis").get<double>();
        est.sum_ord = e.at("sum_ord").get<double>();
        est.sum_dis = e.at("sum_dis").get<double>();
        r.estimate = est;
    }
    if (j.contains("ord_durations")) {
        for (const auto& v : j.at("ord_durations")) {
            r.ord_durations.push_back(v.get<double>());
        }
    }
    if (j.contains("dis_durations")) {
        for (const auto& v : j.at("dis_durations")) {
            r.dis_durations.push_back(v.get<double>());
        }
    }
    if (j.contains("sensitivity")) {
        for (const auto& v : j.at("sensitivity")) {
            SensitivityStat s;
            s.theta_high = v.at("theta_high").get<double>();
            s.theta_low = v.at("theta_low").get<double>();
            s.n_cycles = v.at("n_cycles").get<std::int64_t>();
            s.sum_ord = v.at("sum_ord").get<double>();
            s.sum_dis = v.at("sum_dis").get<double>();
            r.sensitivity.push_back(s);
        }
    }
    r.transitions = j.value("transitions", std::int64_t{0});
    r.error = j.value("error", std::string{});
    return r;
}

std::string RunRecord::key() const {
    return std::to_string(side) + "|" + beta_key(beta) + "|" +
           alpha_key(alpha) + "|" + std::to_string(seed);
}

ResultStore::ResultStore(std::filesystem::path path)
    : path_(std::move(path)) {}

bool ResultStore::exists() const {
    return std::filesystem::exists(path_);
}

std::vector<RunRecord> ResultStore::load() const {
    std::vector<RunRecord> records;
    if (!exists()) return records;
    std::ifstream in(path_);
    if (!in) {
        throw std::runtime_error("cannot open result store: " + path_.string());
    }
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> by_key;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("corrupt store line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
        RunRecord r = RunRecord::from_json(j);
        const std::string k = r.key();
        auto it = by_key.find(k);
        if (it != by_key.end()) {
            records[it->second] = std::move(r);  // latest record wins
        } else {
            by_key.emplace(k, records.size());
            records.push_back(std::move(r));
        }
    }
    return records;
}

void ResultStore::append(const RunRecord& record) {
    std::lock_guard lock(write_mutex_);
    std::ofstream out(path_, std::ios::app);
    if (!out) {
        throw std::runtime_error("cannot append to result store: " +
                                 path_.string());
    }
    out << record.to_json().dump() << '\n';
    out.flush();
    if (!out) {
        throw std::runtime_error("write failure on result store: " +
                                 path_.string());
    }
}

std::string ResultStore::to_csv(std::span<const RunRecord> records) {
    std::vector<const RunRecord*> ok;
    for (const auto& r : records) {
        if (r.status == "ok" && r.estimate) ok.push_back(&r);
    }
    std::sort(ok.begin(), ok.end(), [](const RunRecord* a, const RunRecord* b) {
        return std::tuple(a->side, a->beta, a->alpha, a->seed_slot, a->seed) <
               std::tuple(b->side, b->beta, b->alpha, b->seed_slot, b->seed);
    });
    std::string csv =
        "side,beta,alpha,seed,pi_ord,lambda_ord,lambda_dis,t_renew,n_cycles\n";
    char buf[256];
    for (const RunRecord* r : ok) {
        std::snprintf(buf, sizeof(buf),
                      "%d,%.12g,%.12g,%llu,%.12g,%.12g,%.12g,%.12g,%lld\n",
                      r->side, r->beta, r->alpha,
                      static_cast<unsigned long long>(r->seed),
                      r->estimate->pi_ord, r->estimate->lambda_ord,
                      r->estimate->lambda_dis, r->estimate->t_renew,
                      static_cast<long long>(r->estimate->n_cycles));
        csv += buf;
    }
    return csv;
}

namespace {

std::vector<DetectorConfig> sensitivity_variants(const DetectorConfig& base,
                                                 double delta) {
    std::vector<DetectorConfig> variants;
    const double shifts[4][2] = {{+delta, 0.0}, {-delta, 0.0},
                                 {0.0, +delta}, {0.0, -delta}};
    for (const auto& shift : shifts) {
        DetectorConfig v = base;
        v.theta_high += shift[0];
        v.theta_low += shift[1];
        try {
            v.validate();
        } catch (const std::invalid_argument&) {
            continue;  // shift left the valid band; skip this variant
        }
        variants.push_back(v);
    }
    return variants;
}

}  // namespace

RunRecord execute_run(const RunSpec& spec, const SweepConfig& config) {
    const auto start = std::chrono::steady_clock::now();

    RunRecord record;
    record.run_index = spec.index;
    record.alpha = spec.alpha;
    record.beta = spec.beta;
    record.side = spec.side;
    record.seed_slot = spec.seed_slot;
    record.seed = spec.seed;
    record.n_sweeps = config.n_sweeps;
    record.burn_in = config.burn_in;
    record.detector = config.detector;
    record.engine_version = kEngineVersion;

    ModelParams params;
    params.alpha = spec.alpha;
    params.beta = spec.beta;
    params.side = spec.side;
    const Trajectory trajectory =
        run_trajectory(params, config.n_sweeps, config.burn_in, spec.seed);

    try {
        const auto labels = classify(trajectory.m_series, config.detector);
        const auto series = extract_sojourns(labels);
        record.estimate = estimate(series);
        record.ord_durations = series.durations(Phase::Ordered);
        record.dis_durations = series.durations(Phase::Disordered);
        record.status = "ok";
    } catch (const insufficient_data_error& e) {
        record.status = "insufficient_data";
        record.transitions = e.transitions();
    }

    for (const auto& variant :
         sensitivity_variants(config.detector, config.sensitivity_delta)) {
        SensitivityStat stat;
        stat.theta_high = variant.theta_high;
        stat.theta_low = variant.theta_low;
        try {
            const auto labels = classify(trajectory.m_series, variant);
            const auto series = extract_sojourns(labels);
            stat.n_cycles = series.n_ord;
            for (const auto& s : series.sojourns) {
                (s.phase == Phase::Ordered ? stat.sum_ord : stat.sum_dis) +=
                    static_cast<double>(s.duration);
            }
        } catch (const insufficient_data_error&) {
            // zero cycles recorded; pooling just sees no sample from this run
        }
        record.sensitivity.push_back(stat);
    }

    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return record;
}

int execute(const SweepPlan& plan, ResultStore& store, int workers,
            std::ostream* progress) {
    if (workers < 1) {
        throw std::invalid_argument("workers must be >= 1");
    }

    std::map<std::string, std::string> existing;  // key -> status
    for (const auto& r : store.load()) {
        if (!r.engine_version.empty() && r.engine_version != kEngineVersion) {
            throw std::runtime_error(
                "store " + store.path().string() + " was written by engine " +
                r.engine_version + "; results are not comparable across versions");
        }
        if (r.status != "failed" &&
            (r.detector.theta_high != plan.config.detector.theta_high ||
             r.detector.theta_low != plan.config.detector.theta_low ||
             r.detector.min_dwell != plan.config.detector.min_dwell)) {
            throw std::runtime_error(
                "store " + store.path().string() +
                " was built with a different detector config; use a fresh store");
        }
        existing[r.key()] = r.status;
    }

    std::vector<const RunSpec*> pending;
    for (const auto& run : plan.runs) {
        RunRecord probe;
        probe.alpha = run.alpha;
        probe.beta = run.beta;
        probe.side = run.side;
        probe.seed = run.seed;
        auto it = existing.find(probe.key());
        if (it == existing.end() || it->second == "failed") {
            pending.push_back(&run);
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            const RunSpec& spec = *pending[i];

            RunRecord record;
            try {
                record = execute_run(spec, plan.config);
            } catch (const std::exception& first_error) {
                try {
                    record = execute_run(spec, plan.config);  // one retry
                } catch (const std::exception& second_error) {
                    record.run_index = spec.index;
                    record.alpha = spec.alpha;
                    record.beta = spec.beta;
                    record.side = spec.side;
                    record.seed_slot = spec.seed_slot;
                    record.seed = spec.seed;
                    record.n_sweeps = plan.config.n_sweeps;
                    record.burn_in = plan.config.burn_in;
                    record.detector = plan.config.detector;
                    record.engine_version = kEngineVersion;
                    record.status = "failed";
                    record.error = std::string(first_error.what()) +
                                   "; retry: " + second_error.what();
                }
            }
            store.append(record);
            const std::size_t completed = done.fetch_add(1) + 1;
            if (progress != nullptr) {
                std::lock_guard lock(progress_mutex);
                *progress << "[" << completed << "/" << pending.size()
                          << "] side=" << spec.side << " beta=" << spec.beta
                          << " alpha=" << spec.alpha
                          << " slot=" << spec.seed_slot
                          << " status=" << record.status;
                if (record.estimate) {
                    *progress << " t_renew=" << record.estimate->t_renew
                              << " cycles=" << record.estimate->n_cycles;
                }
                *progress << " (" << record.wall_time_s << "s)" << std::endl;
            }
        }
    };

    const std::size_t n_threads =
        std::min(static_cast<std::size_t>(workers),
                 std::max<std::size_t>(pending.size(), 1));
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    return static_cast<int>(pending.size());
}

std::vector<CurveGroup> collect(std::span<const RunRecord> records) {
    if (records.empty()) {
        throw std::invalid_argument("collect: empty record set");
    }

    const DetectorConfig& base = records.front().detector;
    for (const auto& r : records) {
        if (r.detector.theta_high != base.theta_high ||
            r.detector.theta_low != base.theta_low ||
            r.detector.min_dwell != base.min_dwell) {
            throw std::invalid_argument(
                "collect: records mix detector configs; pooled estimates "
                "would be meaningless");
        }
    }

    // (side, beta_key) -> alpha_key -> contributing records.
    std::map<std::pair<int, std::string>,
             std::map<std::string, std::vector<const RunRecord*>>>
        groups;
    for (const auto& r : records) {
        groups[{r.side, beta_key(r.beta)}][alpha_key(r.alpha)].push_back(&r);
    }

    std::vector<CurveGroup> out;
    for (auto& [group_key, by_alpha] : groups) {
        CurveGroup group;
        group.side = group_key.first;
        group.key = group_key.second;
        group.detector = base;
        for (auto& [a_key, runs] : by_alpha) {
            group.beta = runs.front()->beta;
            const double alpha = runs.front()->alpha;
            std::vector<double> ord, dis;
            int seeds_used = 0;
            for (const RunRecord* r : runs) {
                if (r->status == "insufficient_data") ++group.insufficient_runs;
                if (r->status == "failed") ++group.failed_runs;
                if (r->status != "ok" || !r->estimate) continue;
                ord.insert(ord.end(), r->ord_durations.begin(),
                           r->ord_durations.end());
                dis.insert(dis.end(), r->dis_durations.begin(),
                           r->dis_durations.end());
                ++seeds_used;
            }
            const std::size_t n = std::min(ord.size(), dis.size());
            if (n < 1) {
                group.omitted_alphas.push_back(alpha);
                continue;
            }
            // Pooling concatenated complete cycles: counts can differ by the
            // per-seed trimming, so re-truncate to equal counts.
            ord.resize(n);
            dis.resize(n);
            PooledPoint point;
            point.alpha = alpha;
            point.est = estimate_from_durations(ord, dis);
            point.seeds_used = seeds_used;
            group.points.push_back(point);
        }
        std::sort(group.points.begin(), group.points.end(),
                  [](const PooledPoint& a, const PooledPoint& b) {
                      return a.alpha < b.alpha;
                  });
        std::sort(group.omitted_alphas.begin(), group.omitted_alphas.end());
        group.usable = group.points.size() >= 3;
        out.push_back(std::move(group));
    }
    std::sort(out.begin(), out.end(), [](const CurveGroup& a,
                                         const CurveGroup& b) {
        return std::tuple(a.side, a.beta) < std::tuple(b.side, b.beta);
    });
    return out;
}

}  // namespace spinmarket
