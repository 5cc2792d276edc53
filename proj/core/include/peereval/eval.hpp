#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "peereval/aggregate.hpp"
#include "peereval/dataset.hpp"
#include "peereval/mechanisms.hpp"

namespace peereval {

enum class Metric { brier, log, auc };

const char* metric_name(Metric m);
std::optional<Metric> metric_from_name(const std::string& name);
Orientation metric_orientation(Metric m);

// Per-event scores plus their mean. AUC has no per-event decomposition: it is
// a single dataset-level value computed across binary events, per_event stays
// empty and mean holds the AUC.
struct EvalEntry {
    Metric metric = Metric::brier;
    std::vector<std::pair<int, double>> per_event; // (event index, score), event-sorted
    double mean = 0.0;
    int n_events = 0;
};

// Scores an aggregator's output against realized outcomes. Every event the
// output covers must be resolved.
EvalEntry evaluate(const AggregateOutput& output, const ForecastDataset& ds, Metric metric);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    int n = 0;
    bool degenerate = false; // zero-variance differences
};

// Classic two-sided paired t-test on aligned per-event scores.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct PairwiseTest {
    std::string agg_a;
    std::string agg_b;
    double t = 0.0;
    double p = 1.0;
    int n = 0;
    bool degenerate = false;
};

struct EvalReport {
    Metric metric = Metric::brier;
    std::vector<std::pair<std::string, EvalEntry>> per_aggregator;
    std::vector<PairwiseTest> pairwise;
    std::vector<std::string> warnings;
};

// Pairwise test of two entries on their common events (the aligned score
// vectors must share at least 2 events).
PairwiseTest pairwise_test(const std::string& name_a, const EvalEntry& a,
                           const std::string& name_b, const EvalEntry& b);

// ---------------------------------------------------------------------------
// Top-k sweep

struct SweepCurve {
    std::string mechanism; // mechanism name, or "true" for the oracle curve
    std::string base;
    std::vector<double> values; // mean metric per grid point
};

struct SweepResult {
    Metric metric = Metric::brier;
    std::vector<double> grid; // selection fractions
    std::vector<SweepCurve> curves;
    std::vector<std::pair<std::string, double>> baselines; // benchmark means
    std::vector<std::string> warnings;
};

// Runs pas_aided_aggregate with RankSelect(fraction, floor = 1) for every
// (mechanism, base, fraction) and records the mean metric, alongside the
// full-crowd benchmark baselines and the ground-truth-selected curve.
SweepResult sweep_top_k(const ForecastDataset& ds, std::span<const Mechanism> mechanisms,
                        std::span<const BaseAggregator> bases, std::span<const double> grid,
                        const PasConfig& cfg, Metric metric, bool include_true_curve = true);

// ---------------------------------------------------------------------------
// Top-agent overlap across mechanisms

struct OverlapResult {
    std::vector<double> levels;
    // Fraction of agents selected by every mechanism simultaneously, per level.
    std::vector<double> overlap;
    // Per mechanism: mean true Brier of its top group at each level (only
    // when a resolved dataset is supplied).
    std::vector<std::pair<std::string, std::vector<double>>> top_group_mean_true_brier;
};

OverlapResult overlap_analysis(std::span<const PasScores> pas_list,
                               std::span<const double> levels,
                               const ForecastDataset* ds_for_truth = nullptr);

// ---------------------------------------------------------------------------
// Comparison tables with win/loss tallies

struct WinLossCell {
    std::string pas_aggregator;
    std::string benchmark;
    int wins = 0;
    int losses = 0;
};

struct ComparisonReport {
    Metric metric = Metric::brier;
    std::vector<EvalReport> per_dataset;
    std::vector<WinLossCell> tallies; // at p < 0.05, brier/log metrics only
    std::vector<std::string> warnings;
};

// Evaluates every PAS-aided (mechanism x base, RankSelect 10%/10) aggregator
// and every named benchmark ("mean", "logit", "vi", "mp", "sp") on each
// dataset, pairing them with two-sided t-tests and tallying significant wins
// and losses across datasets.
ComparisonReport comparison_table(std::span<const ForecastDataset> datasets,
                                  std::span<const Mechanism> mechanisms,
                                  std::span<const BaseAggregator> bases,
                                  std::span<const std::string> benchmarks, Metric metric,
                                  const PasConfig& cfg);

} // namespace peereval
