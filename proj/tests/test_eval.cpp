#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "peereval/eval.hpp"
#include "peereval/synthetic.hpp"

using namespace peereval;

TEST_SUITE_BEGIN("eval");

namespace {

AggregateOutput constant_output(const ForecastDataset& ds, double q) {
    AggregateOutput out;
    out.aggregator = "const";
    out.predictions.resize(static_cast<std::size_t>(ds.num_events()));
    for (int i = 0; i < ds.num_events(); ++i)
        if (ds.event(i).space.is_binary())
            out.predictions[static_cast<std::size_t>(i)] = std::vector<double>{1.0 - q, q};
    return out;
}

ForecastDataset resolved_dataset(const std::vector<int>& outcomes) {
    DatasetBuilder b;
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        b.add_event("e" + std::to_string(i), OutcomeSpace{2}, outcomes[i]);
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        b.add_record("e" + std::to_string(i), "a", {0.5});
    return b.build();
}

} // namespace

TEST_CASE("evaluate on worked fixtures") {
    const auto ds = resolved_dataset({1, 0, 1});
    // exact outcome predictions score zero
    AggregateOutput exact;
    exact.predictions = {std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 0.0},
                         std::vector<double>{0.0, 1.0}};
    CHECK(evaluate(exact, ds, Metric::brier).mean == 0.0);

    // the constant-half forecaster scores 0.5 regardless of outcomes
    CHECK(evaluate(constant_output(ds, 0.5), ds, Metric::brier).mean == doctest::Approx(0.5));

    // hand-computed briers 0.02, 0.5, 1.28 average to 0.6
    AggregateOutput hand;
    hand.predictions = {std::vector<double>{0.1, 0.9}, std::vector<double>{0.5, 0.5},
                        std::vector<double>{0.8, 0.2}};
    const auto entry = evaluate(hand, ds, Metric::brier);
    CHECK(entry.per_event[0].second == doctest::Approx(0.02));
    CHECK(entry.per_event[1].second == doctest::Approx(0.5));
    CHECK(entry.per_event[2].second == doctest::Approx(1.28));
    CHECK(entry.mean == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("evaluate under the log metric") {
    const auto ds = resolved_dataset({1, 0});
    AggregateOutput out;
    out.predictions = {std::vector<double>{0.1, 0.9}, std::vector<double>{0.5, 0.5}};
    const auto entry = evaluate(out, ds, Metric::log);
    CHECK(entry.per_event[0].second == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
    CHECK(entry.per_event[1].second == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(entry.mean == doctest::Approx(0.5 * (-std::log(0.9) + std::log(2.0))).epsilon(1e-12));
}

TEST_CASE("evaluate refuses unresolved events") {
    DatasetBuilder b;
    b.add_event("open", OutcomeSpace{2});
    b.add_record("open", "a", {0.5});
    const auto ds = b.build();
    CHECK_THROWS_WITH_AS(evaluate(constant_output(ds, 0.5), ds, Metric::brier),
                         doctest::Contains("unresolved"), Error);
}

TEST_CASE("auc metric evaluates dataset-wide") {
    const auto ds = resolved_dataset({1, 0, 1, 0});
    AggregateOutput out;
    out.predictions = {std::vector<double>{0.1, 0.9}, std::vector<double>{0.9, 0.1},
                       std::vector<double>{0.2, 0.8}, std::vector<double>{0.8, 0.2}};
    const auto entry = evaluate(out, ds, Metric::auc);
    CHECK(entry.mean == 1.0);
    CHECK(entry.per_event.empty());
    CHECK(entry.n_events == 4);
}

TEST_CASE("paired t test on the worked example") {
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{0, 0, 0, 0};
    const auto r = paired_t_test(a, b);
    CHECK(r.t == doctest::Approx(3.872983).epsilon(1e-6));
    CHECK(r.p == doctest::Approx(0.030466).epsilon(1e-4));
    CHECK(r.n == 4);
    CHECK(!r.degenerate);
}

TEST_CASE("identical scores are degenerate with p = 1") {
    const std::vector<double> a{0.4, 0.6, 0.1};
    const auto r = paired_t_test(a, a);
    CHECK(r.degenerate);
    CHECK(r.t == 0.0);
    CHECK(r.p == 1.0);
}

TEST_CASE("t test antisymmetry") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(12), b(12);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = unif(rng);
            b[i] = unif(rng);
        }
        const auto ab = paired_t_test(a, b);
        const auto ba = paired_t_test(b, a);
        CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{2.0}), Error);
}

TEST_CASE("significance threshold marks p below 0.05") {
    // planted systematic difference
    std::vector<double> a(30), b(30);
    std::mt19937_64 rng(77);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (std::size_t i = 0; i < a.size(); ++i) {
        b[i] = 0.5 + noise(rng);
        a[i] = b[i] - 0.05;
    }
    CHECK(paired_t_test(a, b).p < 0.05);
}

namespace {

ForecastDataset bathtub_crowd(int agents, int events, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::gamma_distribution<double> g(0.15, 1.0);
    SyntheticSpec spec;
    spec.num_events = events;
    spec.num_agents = agents;
    spec.seed = seed;
    AdditiveNoiseModel an;
    an.event_probs.resize(static_cast<std::size_t>(events));
    for (auto& q : an.event_probs) {
        const double x = g(rng), y = g(rng);
        q = x / (x + y);
    }
    an.agent_sigma.resize(static_cast<std::size_t>(agents));
    for (std::size_t j = 0; j < an.agent_sigma.size(); ++j)
        j < an.agent_sigma.size() / 2 ? an.agent_sigma[j] = 0.05 + 0.1 * unif(rng)
                                      : an.agent_sigma[j] = 0.2 + 0.2 * unif(rng);
    spec.model = an;
    return generate_synthetic(spec);
}

} // namespace

TEST_CASE("sweep reduces to benchmarks at fraction one") {
    const auto ds = bathtub_crowd(20, 60, 3003);
    PasConfig cfg;
    cfg.seed = 5;
    const std::vector<Mechanism> mechs{Mechanism::ca};
    const std::vector<BaseAggregator> bases{BaseAggregator::mean, BaseAggregator::logit};
    const std::vector<double> grid{0.1, 0.5, 1.0};
    const auto sweep = sweep_top_k(ds, mechs, bases, grid, cfg, Metric::brier);

    REQUIRE(sweep.curves.size() == 4); // (ca + true) x (mean, logit)
    double bench_mean = 0.0, bench_logit = 0.0;
    for (const auto& [name, value] : sweep.baselines) {
        if (name == "mean") bench_mean = value;
        if (name == "logit") bench_logit = value;
    }
    for (const auto& curve : sweep.curves) {
        const double at_one = curve.values.back();
        if (curve.base == "mean") CHECK(at_one == bench_mean);
        else CHECK(at_one == doctest::Approx(bench_logit).epsilon(1e-12));
    }
}

TEST_CASE("true-score sweep dips below the full crowd") {
    const auto ds = bathtub_crowd(40, 120, 1234);
    PasConfig cfg;
    const std::vector<Mechanism> mechs{};
    const std::vector<BaseAggregator> bases{BaseAggregator::mean};
    const std::vector<double> grid{0.1, 0.25, 0.5, 1.0};
    const auto sweep = sweep_top_k(ds, mechs, bases, grid, cfg, Metric::brier);
    REQUIRE(sweep.curves.size() == 1);
    const auto& truth = sweep.curves[0];
    const auto min_at = std::min_element(truth.values.begin(), truth.values.end()) -
                        truth.values.begin();
    CHECK(sweep.grid[static_cast<std::size_t>(min_at)] < 1.0);
    CHECK(truth.values[static_cast<std::size_t>(min_at)] < truth.values.back());
}

TEST_CASE("the oracle curve's best point dominates the mechanism curves") {
    const auto ds = bathtub_crowd(50, 150, 60601);
    PasConfig cfg;
    cfg.seed = 2;
    const std::vector<Mechanism> mechs{Mechanism::ca, Mechanism::pts};
    const std::vector<BaseAggregator> bases{BaseAggregator::mean};
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.5, 1.0};
    const auto sweep = sweep_top_k(ds, mechs, bases, grid, cfg, Metric::brier);
    double truth_min = 1e300;
    std::vector<double> mechanism_mins;
    for (const auto& curve : sweep.curves) {
        const double m = *std::min_element(curve.values.begin(), curve.values.end());
        if (curve.mechanism == "true") truth_min = m;
        else mechanism_mins.push_back(m);
    }
    REQUIRE(mechanism_mins.size() == 2);
    for (double m : mechanism_mins) CHECK(truth_min <= m + 1e-12);
}

TEST_CASE("overlap of a single or duplicated ranking is one") {
    PasScores pas;
    pas.mechanism = Mechanism::ca;
    for (int j = 0; j < 10; ++j) {
        pas.agent_ids.push_back("a" + std::to_string(j));
        pas.scores.push_back(static_cast<double>(j));
        pas.eligible.push_back(1);
    }
    const std::vector<double> levels{0.2, 0.5, 1.0};
    const std::vector<PasScores> single{pas};
    const auto r1 = overlap_analysis(single, levels);
    for (double v : r1.overlap) CHECK(v == 1.0);

    const std::vector<PasScores> twice{pas, pas};
    const auto r2 = overlap_analysis(twice, levels);
    for (double v : r2.overlap) CHECK(v == 1.0);
    CHECK(r2.overlap.back() == 1.0); // level 1.0 is always 1
}

TEST_CASE("independent rankings overlap near the selection fraction") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = 100;
    double total = 0.0;
    const int reps = 40;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<PasScores> list(2);
        for (auto& pas : list) {
            pas.mechanism = Mechanism::ca;
            for (int j = 0; j < n; ++j) {
                pas.agent_ids.push_back("a" + std::to_string(j));
                pas.scores.push_back(unif(rng));
                pas.eligible.push_back(1);
            }
        }
        const std::vector<double> levels{0.3};
        total += overlap_analysis(list, levels).overlap[0];
    }
    CHECK(total / reps == doctest::Approx(0.3).epsilon(0.15));
}

TEST_CASE("overlap analysis validates agent sets") {
    PasScores a, b;
    a.mechanism = b.mechanism = Mechanism::ca;
    a.agent_ids = {"x", "y"};
    a.scores = {0.1, 0.2};
    a.eligible = {1, 1};
    b.agent_ids = {"x", "z"};
    b.scores = {0.1, 0.2};
    b.eligible = {1, 1};
    const std::vector<PasScores> list{a, b};
    const std::vector<double> levels{0.5};
    CHECK_THROWS_AS(overlap_analysis(list, levels), Error);
}

TEST_CASE("comparison table tallies planted wins") {
    std::vector<ForecastDataset> datasets;
    for (int d = 0; d < 3; ++d) datasets.push_back(bathtub_crowd(40, 100, 9100 + static_cast<std::uint64_t>(d)));
    PasConfig cfg;
    const std::vector<Mechanism> mechs{Mechanism::true_score};
    const std::vector<BaseAggregator> bases{BaseAggregator::mean};
    const std::vector<std::string> benchmarks{"mean"};
    const auto report = comparison_table(datasets, mechs, bases, benchmarks, Metric::brier, cfg);
    REQUIRE(report.tallies.size() == 1);
    CHECK(report.tallies[0].pas_aggregator == "true-mean");
    CHECK(report.tallies[0].benchmark == "mean");
    CHECK(report.tallies[0].wins == 3);
    CHECK(report.tallies[0].losses == 0);
    CHECK(report.per_dataset.size() == 3);
}

TEST_SUITE_END();
