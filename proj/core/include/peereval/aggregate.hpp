#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "peereval/dataset.hpp"
#include "peereval/mechanisms.hpp"
#include "peereval/scoring.hpp"

namespace peereval {

// ---------------------------------------------------------------------------
// Per-event aggregation primitives. Predictions are full probability vectors
// (binary events as {1-p, p}); every output is again a valid probability
// vector.

// Componentwise arithmetic mean.
std::vector<double> mean_agg(std::span<const std::vector<double>> preds);

// Binary: sigmoid(alpha * mean(logit(p))) with p clamped into [0.01, 0.99];
// alpha = 2 extremizes. Multi-choice: per-class clamped log-probability
// average scaled by alpha, softmax-normalized (reduces to the binary formula
// at C = 2).
std::vector<double> logit_agg(std::span<const std::vector<double>> preds, double alpha = 2.0,
                              LogClamp clamp = {});

// Weighted variants; weights must be nonnegative and not all zero.
std::vector<double> weighted_mean_agg(std::span<const std::vector<double>> preds,
                                      std::span<const double> weights);
std::vector<double> weighted_logit_agg(std::span<const std::vector<double>> preds,
                                       std::span<const double> weights, double alpha = 2.0,
                                       LogClamp clamp = {});

// Minimal pivoting: mean of (2p - t) clipped into [0,1]. Binary only; every
// prediction needs its meta-prediction.
double mp_agg(std::span<const double> preds, std::span<const double> metas);

// Surprisingly popular: 1 when the actual vote share for outcome 1 exceeds
// the mean predicted share, 0 when below; ties fall back to the majority
// vote, then to 1.
int sp_agg(std::span<const double> votes, std::span<const double> metas);

// ---------------------------------------------------------------------------
// Weight schemes (step 2 of the PAS-aided pipeline)

struct RankSelect {
    double fraction = 0.10;
    int floor = 10;
};

struct SoftmaxWeights {
    double shift = 0.0;
    double scale = 1.0;
};

using WeightScheme = std::variant<RankSelect, SoftmaxWeights>;

// Among `event_agents`, keeps the top max(round(fraction * n), floor) agents
// by PAS (capped at n). Unscored agents rank last, ties break by agent id.
std::vector<int> rank_select(const PasScores& pas, std::span<const int> event_agents,
                             const RankSelect& scheme);

// w_j proportional to exp((s_j - shift) / scale); unscored agents receive the
// weight of the lowest scored agent. Guarded against overflow.
std::vector<double> softmax_weights(const PasScores& pas, std::span<const int> event_agents,
                                    const SoftmaxWeights& scheme);

// ---------------------------------------------------------------------------
// Whole-dataset aggregation

struct AggregateOutput {
    // Full probability vector per event; nullopt where the aggregator does
    // not apply (e.g. VI on a multi-choice event).
    std::vector<std::optional<std::vector<double>>> predictions;
    std::string aggregator;
    std::string config_digest;
    std::vector<std::string> warnings;

    // Scalar P(y=1) for a binary event.
    double binary_prob(int event) const { return (*predictions[static_cast<std::size_t>(event)])[1]; }
};

enum class BaseAggregator { mean, logit };

const char* base_aggregator_name(BaseAggregator b);

// Full-crowd benchmark run of Mean or Logit over every event.
AggregateOutput aggregate_all(const ForecastDataset& ds, BaseAggregator base, double alpha = 2.0,
                              LogClamp clamp = {});

// MP / SP benchmarks (binary events with meta-predictions only).
AggregateOutput mp_aggregate(const ForecastDataset& ds);
AggregateOutput sp_aggregate(const ForecastDataset& ds);

// ---------------------------------------------------------------------------
// Variational inference (two-coin model)

struct ViOptions {
    double alpha = 2.0; // Beta prior; mean alpha/(alpha+beta) must be >= 0.5
    double beta = 1.0;
    double tol = 1e-6;
    int max_iter = 500;
    enum class Labels { threshold, sampled } labels = Labels::threshold;
    std::uint64_t seed = 0; // for sampled labels
};

struct ViState {
    std::vector<double> mu;                        // posterior P(y_i = 1), binary events
    std::vector<std::pair<double, double>> c_bar;  // per-agent (c_{j,0}, c_{j,1})
    int iterations = 0;
    bool converged = false;
};

// Mean-field updates of the two-coin crowdsourcing model over the binary
// events. mu is initialized to the per-event vote fraction; iteration stops
// when max |delta mu| < tol. Non-convergence is reported, not thrown.
AggregateOutput vi_agg(const ForecastDataset& ds, const ViOptions& opts = {},
                       ViState* state_out = nullptr);

// ---------------------------------------------------------------------------
// PAS-aided aggregation (step 3)

// For each event, restricts/weights the answering agents per the scheme and
// aggregates with the base aggregator. PAS computed on binary events applies
// to multi-choice events as well.
AggregateOutput pas_aided_aggregate(const ForecastDataset& ds, const PasScores& pas,
                                    BaseAggregator base, const WeightScheme& scheme,
                                    double alpha = 2.0, LogClamp clamp = {});

} // namespace peereval
