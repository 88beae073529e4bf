#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinmarket/analysis.hpp"
#include "spinmarket/errors.hpp"
#include "spinmarket/figures.hpp"
#include "spinmarket/model.hpp"
#include "spinmarket/phase.hpp"
#include "spinmarket/sweep.hpp"
#include "spinmarket/validation.hpp"
#include "spinmarket/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void write_text_file(const std::filesystem::path& path,
                     const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << body;
    if (!out.flush()) {
        throw std::runtime_error("write failure on " + path.string());
    }
}

int default_workers() {
    if (const char* env = std::getenv("SPINMARKET_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct SimulateArgs {
    double alpha = 6.0;
    double beta = 0.5;
    int side = 32;
    std::int64_t sweeps = 10'000;
    std::int64_t burn_in = 0;
    std::uint64_t seed = 1;
    std::string out;
    bool label = false;
    double theta_high = 0.5;
    double theta_low = 0.25;
    int min_dwell = 1;
};

int cmd_simulate(const SimulateArgs& args) {
    spinmarket::ModelParams params;
    params.alpha = args.alpha;
    params.beta = args.beta;
    params.side = args.side;
    params.validate();

    const auto trajectory = spinmarket::run_trajectory(
        params, args.sweeps, args.burn_in, args.seed);
    std::string csv;
    if (args.label) {
        spinmarket::DetectorConfig detector;
        detector.theta_high = args.theta_high;
        detector.theta_low = args.theta_low;
        detector.min_dwell = args.min_dwell;
        const auto labels = spinmarket::classify(trajectory.m_series, detector);
        csv = spinmarket::labeled_trajectory_csv(trajectory.m_series, labels);
    } else {
        csv = spinmarket::trajectory_csv(trajectory);
    }
    write_text_file(args.out, csv);
    std::cerr << "wrote " << trajectory.m_series.size() << " sweeps to "
              << args.out << "\n";
    return kExitOk;
}

struct SweepArgs {
    std::string config;
    std::string store;
    int workers = 0;
};

int cmd_sweep(const SweepArgs& args) {
    spinmarket::SweepConfig config;
    if (!args.config.empty()) {
        std::ifstream in(args.config);
        if (!in) {
            std::cerr << "cannot read config: " << args.config << "\n";
            return kExitUsage;
        }
        nlohmann::json j;
        try {
            in >> j;
            config = spinmarket::SweepConfig::from_json(j);
        } catch (const std::exception& e) {
            std::cerr << "malformed config " << args.config << ": " << e.what()
                      << "\n";
            return kExitUsage;
        }
    }

    const auto sweep_plan = spinmarket::plan(config);
    spinmarket::ResultStore store{args.store};
    const int workers = args.workers > 0 ? args.workers : default_workers();
    std::cerr << "plan: " << sweep_plan.runs.size() << " runs, " << workers
              << " workers, store " << args.store << "\n";
    const int executed = spinmarket::execute(sweep_plan, store, workers,
                                             &std::cerr);
    std::cerr << "executed " << executed << " runs ("
              << sweep_plan.runs.size() - executed << " already present)\n";
    return kExitOk;
}

struct AnalyzeArgs {
    std::string store;
    std::string report;
    double theta_high_delta = 0.05;
    double theta_low_delta = 0.05;
    double confidence = 0.99;
};

int cmd_analyze(const AnalyzeArgs& args) {
    spinmarket::ResultStore store{args.store};
    if (!store.exists()) {
        std::cerr << "store not found: " << args.store << "\n";
        return kExitRuntime;
    }
    const auto records = store.load();
    if (records.empty()) {
        std::cerr << "store is empty: " << args.store << "\n";
        return kExitRuntime;
    }

    spinmarket::AnalysisOptions options;
    options.theta_high_delta = args.theta_high_delta;
    options.theta_low_delta = args.theta_low_delta;
    options.confidence = args.confidence;
    const auto report = spinmarket::build_report(records, options);

    int usable = 0;
    for (const auto& curve : report.at("curves")) {
        if (curve.at("usable").get<bool>()) ++usable;
    }
    if (usable == 0) {
        int insufficient = 0, failed = 0;
        for (const auto& curve : report.at("curves")) {
            insufficient += curve.at("insufficient_runs").get<int>();
            failed += curve.at("failed_runs").get<int>();
        }
        std::cerr << "no usable curve in store: " << records.size()
                  << " records, " << insufficient << " insufficient runs, "
                  << failed << " failed runs\n";
        return kExitRuntime;
    }

    write_text_file(args.report, spinmarket::report_to_string(report));
    std::cerr << "report with " << usable << " usable curves written to "
              << args.report << "\n";
    return kExitOk;
}

struct PlotArgs {
    std::string report;
    std::string outdir;
};

int cmd_plot(const PlotArgs& args) {
    std::ifstream in(args.report);
    if (!in) {
        std::cerr << "cannot read report: " << args.report << "\n";
        return kExitRuntime;
    }
    nlohmann::json report;
    try {
        in >> report;
        const auto written = spinmarket::write_figures(report, args.outdir);
        for (const auto& path : written) {
            std::cerr << "wrote " << path.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "plot failed: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

struct ValidateArgs {
    std::string level = "quick";
    std::string inject_fault;
};

int cmd_validate(const ValidateArgs& args) {
    auto fault = spinmarket::FaultInjection::None;
    if (args.inject_fault == "spin-cache") {
        fault = spinmarket::FaultInjection::SpinSumCache;
    } else if (!args.inject_fault.empty()) {
        std::cerr << "unknown fault: " << args.inject_fault << "\n";
        return kExitUsage;
    }

    const auto results = args.level == "full"
                             ? spinmarket::run_full_checks(fault)
                             : spinmarket::run_quick_checks(fault);
    bool all_pass = true;
    for (const auto& r : results) {
        nlohmann::json line{
            {"check", r.name}, {"pass", r.pass}, {"detail", r.detail}};
        std::cout << line.dump() << "\n";
        all_pass = all_pass && r.pass;
    }
    nlohmann::json summary{{"summary",
                            {{"level", args.level},
                             {"checks", results.size()},
                             {"all_pass", all_pass}}}};
    std::cout << summary.dump() << "\n";
    return all_pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bornholdt spin market simulator and renewal-period analysis"};
    app.set_version_flag("--version", spinmarket::kEngineVersion);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand(
        "simulate", "Run one trajectory and write its magnetization CSV");
    simulate->add_option("--alpha", sim.alpha, "coupling constant");
    simulate->add_option("--beta", sim.beta, "inverse temperature");
    simulate->add_option("--side", sim.side, "lattice side L (agents = L^2)");
    simulate->add_option("--sweeps", sim.sweeps, "recorded sweeps");
    simulate->add_option("--burn-in", sim.burn_in, "discarded sweeps");
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--out", sim.out, "output CSV path")->required();
    simulate->add_flag("--label", sim.label,
                       "emit sweep,M,phase CSV using the hysteresis detector");
    simulate->add_option("--theta-high", sim.theta_high,
                         "detector upper threshold (with --label)");
    simulate->add_option("--theta-low", sim.theta_low,
                         "detector lower threshold (with --label)");
    simulate->add_option("--min-dwell", sim.min_dwell,
                         "detector dwell sweeps (with --label)");

    SweepArgs swp;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Execute the (alpha, beta, side, seed) grid into a store");
    sweep_cmd->add_option("--config", swp.config,
                          "sweep config JSON (defaults to the study grid)");
    sweep_cmd->add_option("--store", swp.store, "JSONL result store path")
        ->required();
    sweep_cmd->add_option("--workers", swp.workers,
                          "worker threads (default: SPINMARKET_WORKERS or "
                          "hardware concurrency)");

    AnalyzeArgs ana;
    auto* analyze = app.add_subcommand(
        "analyze", "Build the JSON analysis report from a result store");
    analyze->add_option("--store", ana.store, "JSONL result store path")
        ->required();
    analyze->add_option("--report", ana.report, "output report path")
        ->required();
    analyze->add_option("--theta-high", ana.theta_high_delta,
                        "sensitivity delta on theta_high");
    analyze->add_option("--theta-low", ana.theta_low_delta,
                        "sensitivity delta on theta_low");
    analyze->add_option("--confidence", ana.confidence,
                        "confidence level for the alpha* half-width");

    PlotArgs plt;
    auto* plot = app.add_subcommand(
        "plot", "Emit SVG figures and backing CSVs from a report");
    plot->add_option("--report", plt.report, "analysis report path")
        ->required();
    plot->add_option("--outdir", plt.outdir, "output directory")->required();

    ValidateArgs val;
    auto* validate = app.add_subcommand(
        "validate", "Run the oracle and invariant suites");
    validate->add_option("--level", val.level, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    validate
        ->add_option("--inject-fault", val.inject_fault,
                     "negative control: deliberately break an invariant")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (sweep_cmd->parsed()) return cmd_sweep(swp);
        if (analyze->parsed()) return cmd_analyze(ana);
        if (plot->parsed()) return cmd_plot(plt);
        if (validate->parsed()) return cmd_validate(val);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
