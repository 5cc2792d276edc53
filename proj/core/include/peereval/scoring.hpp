#pragma once

#include <span>
#include <vector>

#include "peereval/error.hpp"

namespace peereval {

enum class Orientation { loss, reward };

struct ScoreValue {
    double value = 0.0;
    Orientation orientation = Orientation::loss;
};

// Clamp bounds applied to predictions before taking logarithms, so the log
// score stays finite at 0 and 1.
struct LogClamp {
    double lo = 0.01;
    double hi = 0.99;
};

// Binary Brier score 2*(q - y)^2, range [0, 2]. Loss.
double brier(double q, int y);
// Multi-choice Brier: sum_c (q_c - 1{y=c})^2, same range. Loss.
double brier(std::span<const double> q, int y);

// Binary log score -y*ln(q) - (1-y)*ln(1-q) after clamping q. Loss.
double log_score(double q, int y, LogClamp clamp = {});
// Multi-choice: clamp each component, renormalize to sum 1, return -ln(q_y).
double log_score(std::span<const double> q, int y, LogClamp clamp = {});

// phi_i = #{i': p_{i'} < p_i} - #{i': p_{i'} > p_i} over one agent's own
// prediction list.
std::vector<double> rank_phi(std::span<const double> preds);

// Rank-sum score -sum_i y_i * phi_i. Loss; requires >= 2 events.
double rank_sum(std::span<const double> preds, std::span<const int> outcomes);

// Pairwise-concordance AUC with 0.5 credit per tied pair. Reward; requires
// both outcome classes present.
double auc_roc(std::span<const double> preds, std::span<const int> outcomes);

// (4 / n^2) * rank_sum: the ground-truth-free surrogate used when ranking
// quality is the target metric. n = preds.size().
double normalized_rank_sum(std::span<const double> preds, std::span<const int> outcomes);

// Strictly proper scoring rule selector for the score-recovering mechanisms.
enum class Spsr { brier, log, normalized_rank_sum };

// S(p, y) for a single binary prediction under the chosen rule. For
// normalized_rank_sum the per-event term is -y * phi_i * scale with
// phi/scale supplied by the caller, so this helper covers brier/log only.
double spsr_binary(Spsr rule, double p, int y, LogClamp clamp = {});

// S(p, y') against a probabilistic target y' in [0,1]:
// y'*S(p,1) + (1-y')*S(p,0).
double spsr_prob_target(Spsr rule, double p, double y_prime, LogClamp clamp = {});

const char* spsr_name(Spsr rule);

} // namespace peereval
