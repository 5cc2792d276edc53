#include "peereval/aggregate.hpp"

#include <algorithm>
#include <cmath>


namespace peereval {

namespace {

void check_preds(std::span<const std::vector<double>> preds) {
    if (preds.empty()) throw data_error("aggregation needs at least one prediction");
    for (const auto& p : preds)
        if (p.size() != preds[0].size()) throw data_error("prediction vectors must agree in length");
}

std::vector<double> normalized(std::vector<double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
    return v;
}

} // namespace

std::vector<double> mean_agg(std::span<const std::vector<double>> preds) {
    check_preds(preds);
    std::vector<double> out(preds[0].size(), 0.0);
    for (const auto& p : preds)
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += p[c];
    for (double& x : out) x /= static_cast<double>(preds.size());
    return out;
}

std::vector<double> weighted_mean_agg(std::span<const std::vector<double>> preds,
                                      std::span<const double> weights) {
    check_preds(preds);
    if (weights.size() != preds.size()) throw usage_error("weights must align with predictions");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw usage_error("weights must be nonnegative");
        total += w;
    }
    if (total <= 0.0) throw usage_error("weights must not all be zero");
    std::vector<double> out(preds[0].size(), 0.0);
    for (std::size_t i = 0; i < preds.size(); ++i)
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += weights[i] * preds[i][c];
    for (double& x : out) x /= total;
    return out;
}

std::vector<double> weighted_logit_agg(std::span<const std::vector<double>> preds,
                                       std::span<const double> weights, double alpha,
                                       LogClamp clamp) {
    check_preds(preds);
    if (weights.size() != preds.size()) throw usage_error("weights must align with predictions");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw usage_error("weights must be nonnegative");
        total += w;
    }
    if (total <= 0.0) throw usage_error("weights must not all be zero");

    const std::size_t C = preds[0].size();
    if (C == 2) {
        // sigmoid(alpha * weighted mean of logit(p)) on the clamped scalar.
        double acc = 0.0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            const double p = std::clamp(preds[i][1], clamp.lo, clamp.hi);
            acc += weights[i] * std::log(p / (1.0 - p));
        }
        const double q = 1.0 / (1.0 + std::exp(-alpha * acc / total));
        return {1.0 - q, q};
    }
    // Per-class clamped log-probability average, scaled, softmax-normalized.
    std::vector<double> acc(C, 0.0);
    for (std::size_t i = 0; i < preds.size(); ++i)
        for (std::size_t c = 0; c < C; ++c)
            acc[c] += weights[i] * std::log(std::clamp(preds[i][c], clamp.lo, clamp.hi));
    double max_acc = -1e300;
    for (double& a : acc) {
        a = alpha * a / total;
        max_acc = std::max(max_acc, a);
    }
    std::vector<double> out(C);
    for (std::size_t c = 0; c < C; ++c) out[c] = std::exp(acc[c] - max_acc);
    return normalized(std::move(out));
}

std::vector<double> logit_agg(std::span<const std::vector<double>> preds, double alpha,
                              LogClamp clamp) {
    const std::vector<double> uniform(preds.size(), 1.0);
    return weighted_logit_agg(preds, uniform, alpha, clamp);
}

double mp_agg(std::span<const double> preds, std::span<const double> metas) {
    if (preds.empty()) throw data_error("aggregation needs at least one prediction");
    if (preds.size() != metas.size()) throw data_error("meta-predictions required for MP");
    double s = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) s += 2.0 * preds[i] - metas[i];
    return std::clamp(s / static_cast<double>(preds.size()), 0.0, 1.0);
}

int sp_agg(std::span<const double> votes, std::span<const double> metas) {
    if (votes.empty()) throw data_error("aggregation needs at least one prediction");
    if (votes.size() != metas.size()) throw data_error("meta-predictions required for SP");
    double actual = 0.0, predicted = 0.0;
    for (std::size_t i = 0; i < votes.size(); ++i) {
        actual += votes[i] >= 0.5 ? 1.0 : 0.0;
        predicted += metas[i];
    }
    actual /= static_cast<double>(votes.size());
    predicted /= static_cast<double>(votes.size());
    if (actual > predicted) return 1;
    if (actual < predicted) return 0;
    return actual >= 0.5 ? 1 : 0; // tie: majority vote, then 1
}

// ---------------------------------------------------------------------------
// Weight schemes

std::vector<int> rank_select(const PasScores& pas, std::span<const int> event_agents,
                             const RankSelect& scheme) {
    if (!(scheme.fraction > 0.0 && scheme.fraction <= 1.0))
        throw usage_error("rank-select fraction must be in (0, 1]");
    if (scheme.floor < 1) throw usage_error("rank-select floor must be >= 1");
    const int n = static_cast<int>(event_agents.size());
    // round-half-up on fraction * n, then the floor, capped at n
    const int by_fraction = static_cast<int>(std::floor(scheme.fraction * n + 0.5));
    const int k = std::min(n, std::max(by_fraction, scheme.floor));
    auto order = pas.ranked(event_agents);
    order.resize(static_cast<std::size_t>(k));
    return order;
}

std::vector<double> softmax_weights(const PasScores& pas, std::span<const int> event_agents,
                                    const SoftmaxWeights& scheme) {
    if (!(scheme.scale > 0.0)) throw usage_error("softmax scale must be positive");
    double min_score = 0.0;
    bool any_scored = false;
    for (int j : event_agents) {
        const auto& s = pas.scores[static_cast<std::size_t>(j)];
        if (s) {
            min_score = any_scored ? std::min(min_score, *s) : *s;
            any_scored = true;
        }
    }
    std::vector<double> logits(event_agents.size());
    for (std::size_t i = 0; i < event_agents.size(); ++i) {
        const auto& s = pas.scores[static_cast<std::size_t>(event_agents[i])];
        const double v = s ? *s : min_score; // unscored agents get the bottom weight
        logits[i] = (v - scheme.shift) / scheme.scale;
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> w(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(logits[i] - m);
        total += w[i];
    }
    for (double& x : w) x /= total;
    return w;
}

// ---------------------------------------------------------------------------
// Whole-dataset runs

const char* base_aggregator_name(BaseAggregator b) {
    return b == BaseAggregator::mean ? "mean" : "logit";
}

AggregateOutput aggregate_all(const ForecastDataset& ds, BaseAggregator base, double alpha,
                              LogClamp clamp) {
    AggregateOutput out;
    out.aggregator = base_aggregator_name(base);
    out.predictions.resize(static_cast<std::size_t>(ds.num_events()));
    for (int i = 0; i < ds.num_events(); ++i) {
        auto recs = ds.records_on_event(i);
        if (recs.empty()) continue;
        std::vector<std::vector<double>> preds;
        preds.reserve(recs.size());
        for (std::int32_t r : recs) preds.push_back(ds.full_probs(static_cast<std::size_t>(r)));
        out.predictions[static_cast<std::size_t>(i)] =
            base == BaseAggregator::mean ? mean_agg(preds) : logit_agg(preds, alpha, clamp);
    }
    return out;
}

AggregateOutput mp_aggregate(const ForecastDataset& ds) {
    AggregateOutput out;
    out.aggregator = "mp";
    out.predictions.resize(static_cast<std::size_t>(ds.num_events()));
    for (int i = 0; i < ds.num_events(); ++i) {
        if (!ds.event(i).space.is_binary()) continue;
        auto recs = ds.records_on_event(i);
        if (recs.empty()) continue;
        std::vector<double> p, t;
        for (std::int32_t r : recs) {
            const auto& rec = ds.record(static_cast<std::size_t>(r));
            if (!rec.meta)
                throw data_error("meta-predictions required for MP (event '" +
                                 ds.event(i).id + "', agent '" + ds.agent_id(rec.agent) + "')");
            p.push_back(ForecastDataset::binary_p(rec));
            t.push_back(*rec.meta);
        }
        const double q = mp_agg(p, t);
        out.predictions[static_cast<std::size_t>(i)] = std::vector<double>{1.0 - q, q};
    }
    return out;
}

AggregateOutput sp_aggregate(const ForecastDataset& ds) {
    AggregateOutput out;
    out.aggregator = "sp";
    out.predictions.resize(static_cast<std::size_t>(ds.num_events()));
    for (int i = 0; i < ds.num_events(); ++i) {
        if (!ds.event(i).space.is_binary()) continue;
        auto recs = ds.records_on_event(i);
        if (recs.empty()) continue;
        std::vector<double> p, t;
        for (std::int32_t r : recs) {
            const auto& rec = ds.record(static_cast<std::size_t>(r));
            if (!rec.meta)
                throw data_error("meta-predictions required for SP (event '" +
                                 ds.event(i).id + "', agent '" + ds.agent_id(rec.agent) + "')");
            p.push_back(ForecastDataset::binary_p(rec));
            t.push_back(*rec.meta);
        }
        const double q = static_cast<double>(sp_agg(p, t));
        out.predictions[static_cast<std::size_t>(i)] = std::vector<double>{1.0 - q, q};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variational inference

AggregateOutput vi_agg(const ForecastDataset& ds, const ViOptions& opts, ViState* state_out) {
    if (!(opts.alpha > 0.0) || !(opts.beta > 0.0))
        throw usage_error("VI prior parameters must be positive");
    if (opts.alpha / (opts.alpha + opts.beta) < 0.5)
        throw usage_error("VI prior mean must be at least 0.5");

    std::vector<std::int8_t> labels;
    if (opts.labels == ViOptions::Labels::threshold) {
        labels = threshold_labels(ds);
    } else {
        labels = sampled_labels(ds, binarize(ds, BinarizeMode::sampled, opts.seed));
    }

    const int ne = ds.num_events();
    const int na = ds.num_agents();
    std::vector<double> mu(static_cast<std::size_t>(ne), 0.5);
    std::vector<char> active(static_cast<std::size_t>(ne), 0);
    for (int i = 0; i < ne; ++i) {
        if (!ds.event(i).space.is_binary()) continue;
        auto recs = ds.records_on_event(i);
        if (recs.empty()) continue;
        active[static_cast<std::size_t>(i)] = 1;
        double votes = 0.0;
        for (std::int32_t r : recs) votes += labels[static_cast<std::size_t>(r)];
        mu[static_cast<std::size_t>(i)] = votes / static_cast<double>(recs.size());
    }

    ViState state;
    state.c_bar.assign(static_cast<std::size_t>(na), {0.5, 0.5});
    bool converged = false;
    int it = 0;
    for (; it < opts.max_iter && !converged; ++it) {
        // Jacobi sweep: all c_bar from current mu, then all mu from c_bar.
        for (int j = 0; j < na; ++j) {
            double num0 = 0.0, den0 = 0.0, num1 = 0.0, den1 = 0.0;
            for (std::int32_t r : ds.records_of_agent(j)) {
                const auto& rec = ds.record(static_cast<std::size_t>(r));
                if (!active[static_cast<std::size_t>(rec.event)]) continue;
                const double m1 = mu[static_cast<std::size_t>(rec.event)];
                const int lab = labels[static_cast<std::size_t>(r)];
                den1 += m1;
                den0 += 1.0 - m1;
                if (lab == 1) num1 += m1;
                else num0 += 1.0 - m1;
            }
            state.c_bar[static_cast<std::size_t>(j)] = {
                (num0 + opts.alpha) / (den0 + opts.alpha + opts.beta),
                (num1 + opts.alpha) / (den1 + opts.alpha + opts.beta)};
        }
        double max_delta = 0.0;
        for (int i = 0; i < ne; ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            double log1 = 0.0, log0 = 0.0;
            for (std::int32_t r : ds.records_on_event(i)) {
                const auto& rec = ds.record(static_cast<std::size_t>(r));
                const int lab = labels[static_cast<std::size_t>(r)];
                const auto [c0, c1] = state.c_bar[static_cast<std::size_t>(rec.agent)];
                log1 += lab == 1 ? std::log(c1) : std::log(1.0 - c1);
                log0 += lab == 0 ? std::log(c0) : std::log(1.0 - c0);
            }
            const double m = std::max(log0, log1);
            const double w1 = std::exp(log1 - m);
            const double w0 = std::exp(log0 - m);
            const double new_mu = w1 / (w0 + w1);
            max_delta = std::max(max_delta, std::abs(new_mu - mu[static_cast<std::size_t>(i)]));
            mu[static_cast<std::size_t>(i)] = new_mu;
        }
        converged = max_delta < opts.tol;
    }
    state.mu = mu;
    state.iterations = it;
    state.converged = converged;

    AggregateOutput out;
    out.aggregator = "vi";
    out.predictions.resize(static_cast<std::size_t>(ne));
    for (int i = 0; i < ne; ++i)
        if (active[static_cast<std::size_t>(i)])
            out.predictions[static_cast<std::size_t>(i)] =
                std::vector<double>{1.0 - mu[static_cast<std::size_t>(i)], mu[static_cast<std::size_t>(i)]};
    if (!converged) out.warnings.push_back("vi: not converged after " + std::to_string(it) + " iterations");
    if (state_out) *state_out = std::move(state);
    return out;
}

// ---------------------------------------------------------------------------
// PAS-aided aggregation

AggregateOutput pas_aided_aggregate(const ForecastDataset& ds, const PasScores& pas,
                                    BaseAggregator base, const WeightScheme& scheme,
                                    double alpha, LogClamp clamp) {
    if (pas.agent_ids != ds.agent_ids())
        throw usage_error("PAS scores were computed for a different agent population");

    AggregateOutput out;
    out.aggregator = std::string(mechanism_name(pas.mechanism)) + "-" + base_aggregator_name(base);
    out.predictions.resize(static_cast<std::size_t>(ds.num_events()));

    for (int i = 0; i < ds.num_events(); ++i) {
        auto recs = ds.records_on_event(i);
        if (recs.empty()) continue;
        std::vector<int> agents;
        agents.reserve(recs.size());
        for (std::int32_t r : recs) agents.push_back(ds.record(static_cast<std::size_t>(r)).agent);

        std::vector<std::vector<double>> preds;
        if (const auto* rs = std::get_if<RankSelect>(&scheme)) {
            auto selected = rank_select(pas, agents, *rs);
            if (selected.empty()) throw numeric_error("rank selection produced no agents");
            // Aggregate in agent order so a full selection reproduces the
            // base aggregator bit for bit.
            std::sort(selected.begin(), selected.end());
            preds.reserve(selected.size());
            for (int j : selected) preds.push_back(ds.full_probs(*ds.find(i, j)));
            out.predictions[static_cast<std::size_t>(i)] =
                base == BaseAggregator::mean ? mean_agg(preds) : logit_agg(preds, alpha, clamp);
        } else {
            const auto& sm = std::get<SoftmaxWeights>(scheme);
            const auto weights = softmax_weights(pas, agents, sm);
            preds.reserve(recs.size());
            for (std::int32_t r : recs) preds.push_back(ds.full_probs(static_cast<std::size_t>(r)));
            out.predictions[static_cast<std::size_t>(i)] =
                base == BaseAggregator::mean ? weighted_mean_agg(preds, weights)
                                             : weighted_logit_agg(preds, weights, alpha, clamp);
        }
    }
    return out;
}

} // namespace peereval
