#include "peereval/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace peereval {

namespace {

void check_clamp(LogClamp c) {
    if (!(c.lo > 0.0) || !(c.lo < c.hi) || !(c.hi < 1.0))
        throw usage_error("log clamp bounds must satisfy 0 < lo < hi < 1");
}

} // namespace

double brier(double q, int y) {
    if (y != 0 && y != 1) throw data_error("binary outcome must be 0 or 1");
    const double d = q - static_cast<double>(y);
    return 2.0 * d * d;
}

double brier(std::span<const double> q, int y) {
    if (y < 0 || y >= static_cast<int>(q.size())) throw data_error("outcome index out of range");
    double s = 0.0;
    for (std::size_t c = 0; c < q.size(); ++c) {
        const double d = q[c] - (static_cast<int>(c) == y ? 1.0 : 0.0);
        s += d * d;
    }
    return s;
}

double log_score(double q, int y, LogClamp clamp) {
    check_clamp(clamp);
    if (y != 0 && y != 1) throw data_error("binary outcome must be 0 or 1");
    const double qc = std::clamp(q, clamp.lo, clamp.hi);
    return y == 1 ? -std::log(qc) : -std::log(1.0 - qc);
}

double log_score(std::span<const double> q, int y, LogClamp clamp) {
    check_clamp(clamp);
    if (y < 0 || y >= static_cast<int>(q.size())) throw data_error("outcome index out of range");
    double sum = 0.0;
    std::vector<double> qc(q.size());
    for (std::size_t c = 0; c < q.size(); ++c) {
        qc[c] = std::clamp(q[c], clamp.lo, clamp.hi);
        sum += qc[c];
    }
    return -std::log(qc[static_cast<std::size_t>(y)] / sum);
}

std::vector<double> rank_phi(std::span<const double> preds) {
    const std::size_t n = preds.size();
    std::vector<double> phi(n, 0.0);
    // O(n log n) via sort: phi = (#smaller) - (#greater) with ties at 0-0.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return preds[a] < preds[b]; });
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && preds[order[j]] == preds[order[i]]) ++j;
        const double smaller = static_cast<double>(i);
        const double greater = static_cast<double>(n - j);
        for (std::size_t k = i; k < j; ++k) phi[order[k]] = smaller - greater;
        i = j;
    }
    return phi;
}

double rank_sum(std::span<const double> preds, std::span<const int> outcomes) {
    if (preds.size() != outcomes.size()) throw usage_error("preds/outcomes size mismatch");
    if (preds.size() < 2) throw data_error("rank_sum requires at least 2 events");
    const auto phi = rank_phi(preds);
    double s = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (outcomes[i] != 0 && outcomes[i] != 1) throw data_error("binary outcome must be 0 or 1");
        s += static_cast<double>(outcomes[i]) * phi[i];
    }
    return -s;
}

double auc_roc(std::span<const double> preds, std::span<const int> outcomes) {
    if (preds.size() != outcomes.size()) throw usage_error("preds/outcomes size mismatch");
    std::size_t n0 = 0, n1 = 0;
    for (int y : outcomes) {
        if (y == 0) ++n0;
        else if (y == 1) ++n1;
        else throw data_error("binary outcome must be 0 or 1");
    }
    if (n0 == 0 || n1 == 0)
        throw data_error("AUC-ROC undefined: outcomes contain a single class");

    // Concordance via sorting rather than the O(n0*n1) pair scan.
    std::vector<std::size_t> order(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return preds[a] < preds[b]; });
    double concordant = 0.0;
    std::size_t i = 0;
    double zeros_below = 0.0;
    while (i < order.size()) {
        std::size_t j = i;
        double zeros_here = 0.0, ones_here = 0.0;
        while (j < order.size() && preds[order[j]] == preds[order[i]]) {
            if (outcomes[order[j]] == 0) ++zeros_here;
            else ++ones_here;
            ++j;
        }
        concordant += ones_here * zeros_below + 0.5 * ones_here * zeros_here;
        zeros_below += zeros_here;
        i = j;
    }
    return concordant / (static_cast<double>(n0) * static_cast<double>(n1));
}

double normalized_rank_sum(std::span<const double> preds, std::span<const int> outcomes) {
    const double n = static_cast<double>(preds.size());
    return 4.0 / (n * n) * rank_sum(preds, outcomes);
}

double spsr_binary(Spsr rule, double p, int y, LogClamp clamp) {
    switch (rule) {
        case Spsr::brier: return brier(p, y);
        case Spsr::log: return log_score(p, y, clamp);
        case Spsr::normalized_rank_sum:
            throw usage_error("rank-sum has no single-prediction form");
    }
    throw usage_error("unknown scoring rule");
}

double spsr_prob_target(Spsr rule, double p, double y_prime, LogClamp clamp) {
    if (!(y_prime >= 0.0 && y_prime <= 1.0)) throw data_error("probabilistic target out of [0,1]");
    return y_prime * spsr_binary(rule, p, 1, clamp) + (1.0 - y_prime) * spsr_binary(rule, p, 0, clamp);
}

const char* spsr_name(Spsr rule) {
    switch (rule) {
        case Spsr::brier: return "brier";
        case Spsr::log: return "log";
        case Spsr::normalized_rank_sum: return "normalized_rank_sum";
    }
    return "?";
}

} // namespace peereval
