#include <benchmark/benchmark.h>

#include <random>

#include "peereval/aggregate.hpp"
#include "peereval/eval.hpp"
#include "peereval/mechanisms.hpp"
#include "peereval/scoring.hpp"
#include "peereval/synthetic.hpp"

using namespace peereval;

namespace {

ForecastDataset make_crowd(int agents, int events, double density) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SyntheticSpec spec;
    spec.num_events = events;
    spec.num_agents = agents;
    spec.answer_density = density;
    spec.seed = 99;
    AdditiveNoiseModel an;
    an.event_probs.resize(static_cast<std::size_t>(events));
    for (auto& q : an.event_probs) q = unif(rng);
    an.agent_sigma.resize(static_cast<std::size_t>(agents));
    for (auto& s : an.agent_sigma) s = 0.05 + 0.35 * unif(rng);
    spec.model = an;
    return generate_synthetic(spec);
}

const ForecastDataset& crowd(benchmark::State& state) {
    static const ForecastDataset small = make_crowd(30, 100, 1.0);
    static const ForecastDataset medium = make_crowd(100, 200, 0.8);
    return state.range(0) == 0 ? small : medium;
}

} // namespace

static void BM_Generate(benchmark::State& state) {
    for (auto _ : state) {
        auto ds = make_crowd(static_cast<int>(state.range(0)), 200, 1.0);
        benchmark::DoNotOptimize(ds.num_records());
    }
}
BENCHMARK(BM_Generate)->Arg(30)->Arg(100);

static void BM_PasCa(benchmark::State& state) {
    const auto& ds = crowd(state);
    PasConfig cfg;
    for (auto _ : state) {
        auto pas = compute_pas(ds, Mechanism::ca, cfg);
        benchmark::DoNotOptimize(pas.scores.data());
    }
}
BENCHMARK(BM_PasCa)->Arg(0)->Arg(1);

static void BM_PasDmi(benchmark::State& state) {
    const auto& ds = crowd(state);
    PasConfig cfg;
    for (auto _ : state) {
        auto pas = compute_pas(ds, Mechanism::dmi, cfg);
        benchmark::DoNotOptimize(pas.scores.data());
    }
}
BENCHMARK(BM_PasDmi)->Arg(0)->Arg(1);

static void BM_PasSsr(benchmark::State& state) {
    const auto& ds = crowd(state);
    PasConfig cfg;
    cfg.seed = 7;
    for (auto _ : state) {
        auto pas = compute_pas(ds, Mechanism::ssr, cfg);
        benchmark::DoNotOptimize(pas.scores.data());
    }
}
BENCHMARK(BM_PasSsr)->Arg(0)->Arg(1);

static void BM_Vi(benchmark::State& state) {
    const auto& ds = crowd(state);
    for (auto _ : state) {
        auto out = vi_agg(ds);
        benchmark::DoNotOptimize(out.predictions.data());
    }
}
BENCHMARK(BM_Vi)->Arg(0)->Arg(1);

static void BM_PasAidedMean(benchmark::State& state) {
    const auto& ds = crowd(state);
    const auto truth = true_score_pas(ds, Spsr::brier);
    for (auto _ : state) {
        auto out = pas_aided_aggregate(ds, truth, BaseAggregator::mean, RankSelect{});
        benchmark::DoNotOptimize(out.predictions.data());
    }
}
BENCHMARK(BM_PasAidedMean)->Arg(0)->Arg(1);

static void BM_AucRoc(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> preds(n);
    std::vector<int> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        preds[i] = unif(rng);
        ys[i] = i % 2;
    }
    for (auto _ : state) benchmark::DoNotOptimize(auc_roc(preds, ys));
}
BENCHMARK(BM_AucRoc)->Arg(100)->Arg(10000);

static void BM_FilterDataset(benchmark::State& state) {
    const auto ds = make_crowd(100, 200, 0.4);
    for (auto _ : state) {
        auto result = filter_dataset(ds);
        benchmark::DoNotOptimize(result.dataset.num_records());
    }
}
BENCHMARK(BM_FilterDataset);

BENCHMARK_MAIN();
