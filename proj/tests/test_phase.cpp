#include <doctest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "spinmarket/errors.hpp"
#include "spinmarket/phase.hpp"

using namespace spinmarket;

namespace {

std::vector<Phase> labels_of(std::initializer_list<std::pair<Phase, int>> runs) {
    std::vector<Phase> labels;
    for (const auto& [phase, len] : runs) {
        labels.insert(labels.end(), static_cast<std::size_t>(len), phase);
    }
    return labels;
}

std::int64_t transition_count(const std::vector<Phase>& labels) {
    std::int64_t n = 0;
    Phase last = Phase::Undetermined;
    bool started = false;
    for (Phase p : labels) {
        if (p == Phase::Undetermined) continue;
        if (started && p != last) ++n;
        last = p;
        started = true;
    }
    return n;
}

// Random walk on [0, 1] as a stand-in |M| series for property tests.
std::vector<double> random_series(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> step(-0.12, 0.12);
    std::vector<double> series(n);
    double x = 0.5;
    for (auto& v : series) {
        x += step(gen);
        x = std::clamp(x, 0.0, 1.0);
        v = x;
    }
    return series;
}

}  // namespace

TEST_CASE("detector config validation") {
    DetectorConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.theta_low = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.theta_low = 0.25;
    cfg.min_dwell = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.min_dwell = 1;
    cfg.theta_high = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("classify: constant high series is all ordered") {
    const std::vector<double> series(100, 0.9);
    const auto labels = classify(series, {0.5, 0.25, 1});
    for (Phase p : labels) CHECK(p == Phase::Ordered);
}

TEST_CASE("classify: square wave alternates in blocks of 50") {
    std::vector<double> series;
    for (int rep = 0; rep < 4; ++rep) {
        series.insert(series.end(), 50, 0.9);
        series.insert(series.end(), 50, 0.1);
    }
    const auto labels = classify(series, {0.5, 0.25, 1});
    REQUIRE(labels.size() == 400);
    for (std::size_t t = 0; t < labels.size(); ++t) {
        const Phase want =
            (t / 50) % 2 == 0 ? Phase::Ordered : Phase::Disordered;
        CHECK(labels[t] == want);
    }
}

TEST_CASE("classify: negative M is classified by |M|") {
    std::vector<double> series(40, -0.9);
    series.insert(series.end(), 40, 0.05);
    const auto labels = classify(series, {0.5, 0.25, 1});
    for (std::size_t t = 0; t < 40; ++t) CHECK(labels[t] == Phase::Ordered);
    for (std::size_t t = 40; t < 80; ++t) CHECK(labels[t] == Phase::Disordered);
}

TEST_CASE("classify: in-band dip keeps the current label") {
    std::vector<double> series(30, 0.9);
    series[10] = 0.3;  // inside (0.25, 0.5)
    series[11] = 0.3;
    const auto labels = classify(series, {0.5, 0.25, 1});
    for (Phase p : labels) CHECK(p == Phase::Ordered);
}

TEST_CASE("classify: undetermined prefix until the first commitment") {
    std::vector<double> series{0.3, 0.4, 0.3, 0.9, 0.9, 0.1};
    const auto labels = classify(series, {0.5, 0.25, 1});
    CHECK(labels[0] == Phase::Undetermined);
    CHECK(labels[1] == Phase::Undetermined);
    CHECK(labels[2] == Phase::Undetermined);
    CHECK(labels[3] == Phase::Ordered);
    CHECK(labels[4] == Phase::Ordered);
    CHECK(labels[5] == Phase::Disordered);
}

TEST_CASE("classify: min_dwell filters short excursions, labels from the crossing") {
    DetectorConfig cfg{0.5, 0.25, 3};
    std::vector<double> series(10, 0.9);
    series.insert(series.end(), {0.1, 0.1});   // too short to register
    series.insert(series.end(), 5, 0.9);
    series.insert(series.end(), {0.1, 0.1, 0.1});  // registers, labels from first 0.1
    series.insert(series.end(), 5, 0.9);            // back up, registers again

    const auto labels = classify(series, cfg);
    for (std::size_t t = 0; t < 17; ++t) {
        CAPTURE(t);
        CHECK(labels[t] == Phase::Ordered);  // includes the 2-sweep dip
    }
    for (std::size_t t = 17; t < 20; ++t) CHECK(labels[t] == Phase::Disordered);
    for (std::size_t t = 20; t < 25; ++t) CHECK(labels[t] == Phase::Ordered);
}

TEST_CASE("classify: dwell run broken by an in-band value") {
    DetectorConfig cfg{0.5, 0.25, 2};
    // 0.1, 0.3, 0.1: never two consecutive below-threshold sweeps
    std::vector<double> series(5, 0.9);
    series.insert(series.end(), {0.1, 0.3, 0.1, 0.3});
    series.insert(series.end(), 5, 0.9);
    const auto labels = classify(series, cfg);
    for (Phase p : labels) CHECK(p == Phase::Ordered);
}

TEST_CASE("classify rejects an empty series") {
    CHECK_THROWS_AS(classify(std::vector<double>{}, DetectorConfig{}),
                    std::invalid_argument);
}

TEST_CASE("classify is a pure function of its inputs") {
    const auto series = random_series(7, 5000);
    const DetectorConfig cfg{0.55, 0.2, 2};
    CHECK(classify(series, cfg) == classify(series, cfg));
}

TEST_CASE("extract_sojourns: censored ends dropped, cycles equalized") {
    // O50 D50 O50 D50 O50 -> censored first and last O dropped, trailing D
    // dropped to equalize: one complete cycle D50 + O50.
    const auto labels = labels_of({{Phase::Ordered, 50},
                                   {Phase::Disordered, 50},
                                   {Phase::Ordered, 50},
                                   {Phase::Disordered, 50},
                                   {Phase::Ordered, 50}});
    const auto series = extract_sojourns(labels);
    CHECK(series.n_ord == 1);
    CHECK(series.n_dis == 1);
    REQUIRE(series.sojourns.size() == 2);
    CHECK(series.sojourns[0].phase == Phase::Disordered);
    CHECK(series.sojourns[0].start == 50);
    CHECK(series.sojourns[0].duration == 50);
    CHECK(series.sojourns[1].phase == Phase::Ordered);
    CHECK(series.sojourns[1].duration == 50);
    CHECK(series.trimmed);
}

TEST_CASE("extract_sojourns: three complete cycles from seven runs") {
    const auto labels = labels_of({{Phase::Disordered, 10},
                                   {Phase::Ordered, 20},
                                   {Phase::Disordered, 30},
                                   {Phase::Ordered, 40},
                                   {Phase::Disordered, 50},
                                   {Phase::Ordered, 60},
                                   {Phase::Disordered, 70}});
    const auto series = extract_sojourns(labels);
    CHECK(series.n_ord == 2);
    CHECK(series.n_dis == 2);
    const auto ord = series.durations(Phase::Ordered);
    const auto dis = series.durations(Phase::Disordered);
    CHECK(ord == std::vector<double>{20, 40});
    CHECK(dis == std::vector<double>{30, 50});
}

TEST_CASE("extract_sojourns: all one phase is insufficient") {
    const auto labels = labels_of({{Phase::Ordered, 200}});
    CHECK_THROWS_AS((void)extract_sojourns(labels), insufficient_data_error);
    try {
        (void)extract_sojourns(labels);
    } catch (const insufficient_data_error& e) {
        CHECK(e.transitions() == 0);
    }
}

TEST_CASE("extract_sojourns: both ends censored leaves nothing from O-D-O") {
    const auto labels = labels_of({{Phase::Ordered, 10},
                                   {Phase::Disordered, 30},
                                   {Phase::Ordered, 20}});
    try {
        (void)extract_sojourns(labels);
        FAIL("expected insufficient_data_error");
    } catch (const insufficient_data_error& e) {
        CHECK(e.transitions() == 2);
    }
}

TEST_CASE("extract_sojourns skips the undetermined prefix") {
    auto labels = labels_of({{Phase::Undetermined, 25},
                             {Phase::Ordered, 10},
                             {Phase::Disordered, 20},
                             {Phase::Ordered, 30},
                             {Phase::Disordered, 40}});
    const auto series = extract_sojourns(labels);
    CHECK(series.n_ord == 1);
    CHECK(series.n_dis == 1);
    CHECK(series.sojourns[0].phase == Phase::Disordered);
    CHECK(series.sojourns[0].start == 35);
    CHECK(series.sojourns[0].duration == 20);
    CHECK(series.sojourns[1].duration == 30);
}

TEST_CASE("property: extracted series alternates with equal counts") {
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
        const auto series = random_series(seed, 4000);
        const auto labels = classify(series, {0.6, 0.4, 1});
        SojournSeries sojourns;
        try {
            sojourns = extract_sojourns(labels);
        } catch (const insufficient_data_error&) {
            continue;
        }
        CHECK(sojourns.n_ord == sojourns.n_dis);
        CHECK(sojourns.n_ord >= 1);
        for (std::size_t i = 1; i < sojourns.sojourns.size(); ++i) {
            CHECK(sojourns.sojourns[i].phase != sojourns.sojourns[i - 1].phase);
            CHECK(sojourns.sojourns[i].start ==
                  sojourns.sojourns[i - 1].start +
                      sojourns.sojourns[i - 1].duration);
        }
        for (const auto& s : sojourns.sojourns) CHECK(s.duration >= 1);
    }
}

TEST_CASE("property: widening the band never adds transitions") {
    for (std::uint64_t seed = 1; seed <= 24; ++seed) {
        const auto series = random_series(seed ^ 0xABCD, 4000);
        const auto narrow = classify(series, {0.55, 0.45, 1});
        const auto wide = classify(series, {0.65, 0.35, 1});
        CHECK(transition_count(wide) <= transition_count(narrow));
    }
}

TEST_CASE("property: labeled sweeps are fully accounted for") {
    for (std::uint64_t seed = 31; seed <= 40; ++seed) {
        const auto series = random_series(seed, 3000);
        const auto labels = classify(series, {0.6, 0.4, 1});
        SojournSeries sojourns;
        try {
            sojourns = extract_sojourns(labels);
        } catch (const insufficient_data_error&) {
            continue;
        }
        // undetermined prefix + censored head + kept sojourns + censored and
        // trimmed tail = full series
        std::int64_t kept = 0;
        for (const auto& s : sojourns.sojourns) kept += s.duration;
        const std::int64_t head = sojourns.sojourns.front().start;
        CHECK(head + kept <= static_cast<std::int64_t>(series.size()));
        CHECK(head >= 1);  // at least the censored first sojourn precedes
    }
}

TEST_CASE("labeled trajectory csv") {
    const std::vector<double> series{0.9, 0.9, 0.1, 0.3};
    const auto labels = classify(series, {0.5, 0.25, 1});
    const auto csv = labeled_trajectory_csv(series, labels);
    CHECK(csv.rfind("sweep,M,phase\n", 0) == 0);
    CHECK(csv.find("0,0.9,O") != std::string::npos);
    CHECK(csv.find("2,0.1,D") != std::string::npos);
    CHECK(csv.find("3,0.3,D") != std::string::npos);
}
