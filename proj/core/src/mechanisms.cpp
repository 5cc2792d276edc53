#include "peereval/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "peereval/aggregate.hpp"
#include "peereval/rng.hpp"

namespace peereval {

namespace {

constexpr double kRateEps = 1e-6;

// Record indices of an agent's predictions on binary events, event-sorted.
std::vector<std::int32_t> binary_records(const ForecastDataset& ds, int agent) {
    std::vector<std::int32_t> out;
    for (std::int32_t r : ds.records_of_agent(agent))
        if (ds.event(ds.record(static_cast<std::size_t>(r)).event).space.is_binary())
            out.push_back(r);
    return out;
}

// (record of j, record of k) pairs on shared binary events, event-sorted.
std::vector<std::pair<std::int32_t, std::int32_t>> shared_binary(const ForecastDataset& ds,
                                                                 int j, int k) {
    std::vector<std::pair<std::int32_t, std::int32_t>> out;
    auto a = ds.records_of_agent(j);
    auto b = ds.records_of_agent(k);
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const auto& ra = ds.record(static_cast<std::size_t>(a[ia]));
        const auto& rb = ds.record(static_cast<std::size_t>(b[ib]));
        if (ra.event < rb.event) {
            ++ia;
        } else if (rb.event < ra.event) {
            ++ib;
        } else {
            if (ds.event(ra.event).space.is_binary()) out.emplace_back(a[ia], b[ib]);
            ++ia;
            ++ib;
        }
    }
    return out;
}

JointDistributionMatrix joint_from_pairs(
    const SignalView& signals,
    std::span<const std::pair<std::int32_t, std::int32_t>> pairs) {
    JointDistributionMatrix m;
    m.n_shared = static_cast<int>(pairs.size());
    for (const auto& [rj, rk] : pairs) {
        const double pj = signals.p1(static_cast<std::size_t>(rj));
        const double pk = signals.p1(static_cast<std::size_t>(rk));
        m.d[1][1] += pj * pk;
        m.d[1][0] += pj * (1.0 - pk);
        m.d[0][1] += (1.0 - pj) * pk;
        m.d[0][0] += (1.0 - pj) * (1.0 - pk);
    }
    if (m.n_shared > 0)
        for (auto& row : m.d)
            for (auto& v : row) v /= static_cast<double>(m.n_shared);
    return m;
}

// Peers of `agent` with at least min_overlap shared binary events, ascending.
std::vector<int> eligible_peers(const ForecastDataset& ds, int agent, int min_overlap,
                                std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>>* overlaps) {
    std::vector<int> peers;
    for (int k = 0; k < ds.num_agents(); ++k) {
        if (k == agent) continue;
        auto pairs = shared_binary(ds, agent, k);
        if (static_cast<int>(pairs.size()) >= min_overlap) {
            peers.push_back(k);
            if (overlaps) overlaps->push_back(std::move(pairs));
        }
    }
    return peers;
}

// Applies the peer policy: either every eligible peer or a seeded
// without-replacement sample of cfg.peer_policy.count of them.
std::vector<std::size_t> select_peer_indices(const ForecastDataset& ds, int agent,
                                             std::size_t num_eligible, const PasConfig& cfg) {
    std::vector<std::size_t> idx(num_eligible);
    for (std::size_t i = 0; i < num_eligible; ++i) idx[i] = i;
    if (cfg.peer_policy.kind == PeerPolicy::Kind::all_eligible) return idx;
    const std::size_t want = static_cast<std::size_t>(std::max(cfg.peer_policy.count, 1));
    if (want >= num_eligible) return idx;
    Rng rng = make_rng(cfg.seed, 0x70656572ULL, ds.agent_draw_key(agent)); // "peer"
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    return idx;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

const char* mechanism_name(Mechanism m) {
    switch (m) {
        case Mechanism::dmi: return "dmi";
        case Mechanism::ca: return "ca";
        case Mechanism::pts: return "pts";
        case Mechanism::ssr: return "ssr";
        case Mechanism::psr: return "psr";
        case Mechanism::true_score: return "true";
    }
    return "?";
}

std::optional<Mechanism> mechanism_from_name(const std::string& name) {
    if (name == "dmi") return Mechanism::dmi;
    if (name == "ca") return Mechanism::ca;
    if (name == "pts") return Mechanism::pts;
    if (name == "ssr") return Mechanism::ssr;
    if (name == "psr") return Mechanism::psr;
    if (name == "true") return Mechanism::true_score;
    return std::nullopt;
}

JointDistributionMatrix empirical_joint(const ForecastDataset& ds, const SignalView& signals,
                                        int agent_j, int agent_k) {
    if (agent_j == agent_k) throw usage_error("empirical_joint requires two distinct agents");
    auto pairs = shared_binary(ds, agent_j, agent_k);
    if (pairs.empty()) throw data_error("agents share no binary events");
    return joint_from_pairs(signals, pairs);
}

// ---------------------------------------------------------------------------
// DMI

std::optional<double> dmi_score(const ForecastDataset& ds, const SignalView& signals, int agent,
                                const PasConfig& cfg, int* peers_used) {
    const int overlap = std::max(cfg.min_overlap, 4);
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> overlaps;
    auto peers = eligible_peers(ds, agent, overlap, &overlaps);
    auto chosen = select_peer_indices(ds, agent, peers.size(), cfg);
    if (peers_used) *peers_used = static_cast<int>(chosen.size());
    if (chosen.empty()) return std::nullopt;

    std::vector<double> rewards;
    rewards.reserve(chosen.size());
    for (std::size_t ci : chosen) {
        auto& pairs = overlaps[ci];
        // Two disjoint halves of the shared events. even_odd alternates over
        // the event-sorted list; seeded_random shuffles first.
        std::vector<std::pair<std::int32_t, std::int32_t>> first, second;
        if (cfg.dmi_split == DmiSplit::seeded_random) {
            Rng rng = make_rng(cfg.seed, 0x646d33ULL,
                               mix64(ds.agent_draw_key(agent)) ^ ds.agent_draw_key(peers[ci]));
            std::shuffle(pairs.begin(), pairs.end(), rng);
            const std::size_t half = pairs.size() / 2;
            first.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(half));
            second.assign(pairs.begin() + static_cast<std::ptrdiff_t>(half), pairs.end());
        } else {
            for (std::size_t i = 0; i < pairs.size(); ++i)
                (i % 2 == 0 ? first : second).push_back(pairs[i]);
        }
        const auto d1 = joint_from_pairs(signals, first);
        const auto d2 = joint_from_pairs(signals, second);
        const double n1 = static_cast<double>(d1.n_shared);
        const double n2 = static_cast<double>(d2.n_shared);
        const double eta = (n1 * n2) / ((n1 - 1.0) * (n2 - 1.0));
        rewards.push_back(eta * d1.det() * d2.det());
    }
    return mean_of(rewards);
}

// ---------------------------------------------------------------------------
// CA

std::optional<double> ca_score(const ForecastDataset& ds, const SignalView& signals, int agent,
                               const PasConfig& cfg, int* peers_used) {
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> overlaps;
    auto peers = eligible_peers(ds, agent, cfg.min_overlap, &overlaps);
    auto chosen = select_peer_indices(ds, agent, peers.size(), cfg);
    if (peers_used) *peers_used = static_cast<int>(chosen.size());
    if (chosen.empty()) return std::nullopt;

    // Marginals over each agent's full binary answer set, not just the pair's
    // shared events.
    auto marginal1 = [&](int a) {
        double s = 0.0;
        int n = 0;
        for (std::int32_t r : binary_records(ds, a)) {
            s += signals.p1(static_cast<std::size_t>(r));
            ++n;
        }
        return n > 0 ? s / n : 0.0;
    };
    const double dj1 = marginal1(agent);

    std::vector<double> rewards;
    rewards.reserve(chosen.size());
    for (std::size_t ci : chosen) {
        const auto joint = joint_from_pairs(signals, overlaps[ci]);
        const double dk1 = marginal1(peers[ci]);
        const double mj[2] = {1.0 - dj1, dj1};
        const double mk[2] = {1.0 - dk1, dk1};
        double reward = 0.0;
        for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v) {
                const double delta = joint.d[u][v] - mj[u] * mk[v];
                if (delta > 0.0) reward += delta;
            }
        rewards.push_back(reward);
    }
    return mean_of(rewards);
}

// ---------------------------------------------------------------------------
// PTS

std::optional<double> pts_score(const ForecastDataset& ds, const SignalView& signals, int agent,
                                const PasConfig& cfg, int* peers_used,
                                std::vector<std::string>* warnings) {
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> overlaps;
    auto peers = eligible_peers(ds, agent, cfg.min_overlap, &overlaps);
    auto chosen = select_peer_indices(ds, agent, peers.size(), cfg);
    if (peers_used) *peers_used = static_cast<int>(chosen.size());
    if (chosen.empty()) return std::nullopt;

    // Mean over events of the leave-agent-out fraction of peers reporting 1.
    double sum_frac = 0.0;
    int n_events = 0;
    for (int i = 0; i < ds.num_events(); ++i) {
        if (!ds.event(i).space.is_binary()) continue;
        double s = 0.0;
        int n = 0;
        for (std::int32_t r : ds.records_on_event(i)) {
            const auto& rec = ds.record(static_cast<std::size_t>(r));
            if (rec.agent == agent) continue;
            s += signals.p1(static_cast<std::size_t>(r));
            ++n;
        }
        if (n > 0) {
            sum_frac += s / n;
            ++n_events;
        }
    }
    if (n_events == 0) return std::nullopt;
    const double pbar1 = sum_frac / n_events;
    const double pbar[2] = {1.0 - pbar1, pbar1};

    bool warned = false;
    std::vector<double> rewards;
    rewards.reserve(chosen.size());
    for (std::size_t ci : chosen) {
        const auto joint = joint_from_pairs(signals, overlaps[ci]);
        double reward = 0.0;
        for (int u = 0; u < 2; ++u) {
            if (pbar[u] > 0.0) {
                reward += joint.d[u][u] / pbar[u];
            } else if (!warned) {
                // The matching term on a never-reported value contributes 0.
                if (warnings)
                    warnings->push_back("pts: zero crowd frequency for value " + std::to_string(u) +
                                        " (agent " + ds.agent_id(agent) + ")");
                warned = true;
            }
        }
        rewards.push_back(reward);
    }
    return mean_of(rewards);
}

// ---------------------------------------------------------------------------
// SSR

SsrErrorRates ssr_invert_moments(double c1, double c2, double c3) {
    SsrErrorRates out;
    const double den = c2 - c1 * c1;
    if (std::abs(den) < 1e-9) {
        out.degenerate = true;
        return out;
    }
    const double a = (c3 - c1 * c2) / den;
    const double b = (c1 * c3 - c2 * c2) / den;
    double disc = a * a - 4.0 * b;
    if (disc < -1e-9) {
        out.degenerate = true;
        return out;
    }
    disc = std::max(disc, 0.0);
    const double root = std::sqrt(disc);
    double e0 = 0.5 * a - 0.5 * root;
    double e1 = 1.0 - 0.5 * a - 0.5 * root;
    e0 = std::clamp(e0, kRateEps, 1.0 - kRateEps);
    e1 = std::clamp(e1, kRateEps, 1.0 - kRateEps);
    if (e0 + e1 >= 1.0 - kRateEps) {
        out.degenerate = true;
        return out;
    }
    out.e0 = e0;
    out.e1 = e1;
    out.p1 = std::clamp((c1 - e0) / (1.0 - e1 - e0), 0.0, 1.0);
    return out;
}

SsrErrorRates ssr_estimate_error_rates(const ForecastDataset& ds, int exclude_agent,
                                       std::uint64_t seed) {
    // 1/|M_k| selection weights make the per-event peer pick uniform over the
    // signal population rather than biased toward prolific agents.
    std::vector<double> weight(static_cast<std::size_t>(ds.num_agents()), 0.0);
    for (int k = 0; k < ds.num_agents(); ++k) {
        const auto n = binary_records(ds, k).size();
        if (n > 0) weight[static_cast<std::size_t>(k)] = 1.0 / static_cast<double>(n);
    }
    const std::uint64_t jtag = ds.agent_draw_key(exclude_agent);

    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    int n_events = 0;
    for (int i = 0; i < ds.num_events(); ++i) {
        if (!ds.event(i).space.is_binary()) continue;
        std::vector<int> cand;
        std::vector<double> p_of;
        for (std::int32_t r : ds.records_on_event(i)) {
            const auto& rec = ds.record(static_cast<std::size_t>(r));
            if (rec.agent == exclude_agent) continue;
            cand.push_back(rec.agent);
            p_of.push_back(ForecastDataset::binary_p(rec));
        }
        if (cand.size() < 3) continue;
        const std::uint64_t etag = mix64(jtag) ^ fnv1a64(ds.event(i).id);

        // One z pick plus three reference picks, without replacement; with
        // exactly three candidates only the references are drawn.
        const std::size_t picks = cand.size() >= 4 ? 4 : 3;
        std::vector<double> w(cand.size());
        for (std::size_t c = 0; c < cand.size(); ++c) w[c] = weight[static_cast<std::size_t>(cand[c])];
        int r_sig[3] = {0, 0, 0};
        std::size_t r_at = 0;
        for (std::size_t m = 0; m < picks; ++m) {
            double total = 0.0;
            for (double x : w) total += x;
            const double u = prf_uniform(seed, 0x73737272ULL, etag, m) * total; // "ssrr"
            std::size_t pick = w.size();
            double acc = 0.0;
            for (std::size_t c = 0; c < w.size(); ++c) {
                if (w[c] <= 0.0) continue;
                pick = c; // falls back to the last positive weight if the
                          // accumulated total rounds below u
                acc += w[c];
                if (u < acc) break;
            }
            const bool is_reference = picks == 3 || m >= 1;
            if (is_reference) {
                const double us = prf_uniform(seed, 0x73737273ULL, etag, m); // "ssrs"
                r_sig[r_at++] = us < p_of[pick] ? 1 : 0;
            }
            w[pick] = 0.0;
        }
        // The three reference draws are exchangeable, so every singleton and
        // every pair estimates the same moment; averaging them tightens the
        // match frequencies at no extra draws.
        c1 += (r_sig[0] + r_sig[1] + r_sig[2]) / 3.0;
        c2 += (r_sig[0] * r_sig[1] + r_sig[0] * r_sig[2] + r_sig[1] * r_sig[2]) / 3.0;
        c3 += r_sig[0] * r_sig[1] * r_sig[2];
        ++n_events;
    }
    if (n_events == 0)
        throw data_error("SSR error-rate estimation needs at least 3 peer signals on some event");
    return ssr_invert_moments(c1 / n_events, c2 / n_events, c3 / n_events);
}

double ssr_debias_terms(double s_z, double s_not_z, int z, double e0, double e1) {
    if (e0 + e1 >= 1.0) throw numeric_error("SSR de-bias undefined for e0 + e1 >= 1");
    const double e_z = z == 1 ? e1 : e0;
    const double e_other = z == 1 ? e0 : e1;
    return ((1.0 - e_other) * s_z - e_z * s_not_z) / (1.0 - e0 - e1);
}

double ssr_debias(Spsr rule, double p, int z, double e0, double e1, LogClamp clamp) {
    return ssr_debias_terms(spsr_binary(rule, p, z, clamp), spsr_binary(rule, p, 1 - z, clamp),
                            z, e0, e1);
}

double ssr_score(const ForecastDataset& ds, int agent, const PasConfig& cfg,
                 const SsrErrorRates& rates, int* events_used) {
    if (rates.e0 + rates.e1 >= 1.0 - kRateEps)
        throw numeric_error("SSR error rates leave no de-bias margin (e0 + e1 >= 1)");

    // Scoreable: binary events with at least one peer to define the z draw.
    std::vector<std::int32_t> recs;
    for (std::int32_t r : binary_records(ds, agent))
        if (ds.records_on_event(ds.record(static_cast<std::size_t>(r)).event).size() >= 2) recs.push_back(r);
    if (events_used) *events_used = static_cast<int>(recs.size());
    if (recs.empty()) throw data_error("agent has no binary events with peers to score");

    const bool rank = cfg.spsr == Spsr::normalized_rank_sum;
    std::vector<double> phi;
    double event_weight = 1.0 / static_cast<double>(recs.size());
    if (rank) {
        std::vector<double> preds;
        preds.reserve(recs.size());
        for (std::int32_t r : recs) preds.push_back(ForecastDataset::binary_p(ds.record(static_cast<std::size_t>(r))));
        phi = rank_phi(preds);
        const double n = static_cast<double>(recs.size());
        event_weight = 4.0 / (n * n);
    }

    const std::uint64_t jtag = ds.agent_draw_key(agent);
    double total = 0.0;
    for (std::size_t idx = 0; idx < recs.size(); ++idx) {
        const auto& rec = ds.record(static_cast<std::size_t>(recs[idx]));
        const double p = ForecastDataset::binary_p(rec);
        double sum_others = 0.0;
        int n_others = 0;
        for (std::int32_t r2 : ds.records_on_event(rec.event)) {
            const auto& other = ds.record(static_cast<std::size_t>(r2));
            if (other.agent == agent) continue;
            sum_others += ForecastDataset::binary_p(other);
            ++n_others;
        }
        const double loo_mean = sum_others / n_others;
        const double u = prf_uniform(cfg.seed, 0x7373727aULL, // "ssrz"
                                     mix64(jtag) ^ fnv1a64(ds.event(rec.event).id));
        const int z = u < loo_mean ? 1 : 0;

        double s_z, s_not_z;
        if (rank) {
            s_z = -static_cast<double>(z) * phi[idx];
            s_not_z = -static_cast<double>(1 - z) * phi[idx];
        } else {
            s_z = spsr_binary(cfg.spsr, p, z);
            s_not_z = spsr_binary(cfg.spsr, p, 1 - z);
        }
        total += event_weight * ssr_debias_terms(s_z, s_not_z, z, rates.e0, rates.e1);
    }
    return total;
}

// ---------------------------------------------------------------------------
// PSR

double psr_score(const ForecastDataset& ds, int agent, const PasConfig& cfg,
                 std::span<const double> proxy_by_event, int* events_used) {
    auto recs = binary_records(ds, agent);
    if (events_used) *events_used = static_cast<int>(recs.size());
    if (recs.empty()) throw data_error("agent has no binary events to score");

    const bool rank = cfg.spsr == Spsr::normalized_rank_sum;
    std::vector<double> phi;
    double event_weight = 1.0 / static_cast<double>(recs.size());
    if (rank) {
        std::vector<double> preds;
        preds.reserve(recs.size());
        for (std::int32_t r : recs) preds.push_back(ForecastDataset::binary_p(ds.record(static_cast<std::size_t>(r))));
        phi = rank_phi(preds);
        const double n = static_cast<double>(recs.size());
        event_weight = 4.0 / (n * n);
    }

    double total = 0.0;
    for (std::size_t idx = 0; idx < recs.size(); ++idx) {
        const auto& rec = ds.record(static_cast<std::size_t>(recs[idx]));
        const double y_prime = rec.event < static_cast<std::int32_t>(proxy_by_event.size())
                                   ? proxy_by_event[static_cast<std::size_t>(rec.event)]
                                   : std::numeric_limits<double>::quiet_NaN();
        if (std::isnan(y_prime))
            throw data_error("missing proxy for answered event '" + ds.event(rec.event).id + "'");
        if (rank) {
            total += event_weight * (-y_prime * phi[idx]);
        } else {
            total += event_weight * spsr_prob_target(cfg.spsr, ForecastDataset::binary_p(rec), y_prime);
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// TrueScore and the dispatcher

PasScores true_score_pas(const ForecastDataset& ds, Spsr spsr) {
    PasScores out;
    out.mechanism = Mechanism::true_score;
    out.agent_ids = ds.agent_ids();
    out.scores.assign(static_cast<std::size_t>(ds.num_agents()), std::nullopt);
    out.eligible.assign(static_cast<std::size_t>(ds.num_agents()), 0);

    for (int i = 0; i < ds.num_events(); ++i)
        if (ds.event(i).space.is_binary() && !ds.event(i).outcome)
            throw data_error("unresolved event '" + ds.event(i).id + "' in true-score computation");

    for (int j = 0; j < ds.num_agents(); ++j) {
        auto recs = binary_records(ds, j);
        if (recs.empty()) continue;
        out.eligible[static_cast<std::size_t>(j)] = static_cast<int>(recs.size());
        std::vector<double> preds;
        std::vector<int> ys;
        preds.reserve(recs.size());
        for (std::int32_t r : recs) {
            const auto& rec = ds.record(static_cast<std::size_t>(r));
            preds.push_back(ForecastDataset::binary_p(rec));
            ys.push_back(*ds.event(rec.event).outcome);
        }
        double loss;
        if (spsr == Spsr::normalized_rank_sum) {
            loss = recs.size() >= 2 ? normalized_rank_sum(preds, ys) : 0.0;
        } else {
            double s = 0.0;
            for (std::size_t i = 0; i < preds.size(); ++i) s += spsr_binary(spsr, preds[i], ys[i]);
            loss = s / static_cast<double>(preds.size());
        }
        out.scores[static_cast<std::size_t>(j)] = -loss;
    }
    return out;
}

std::vector<double> psr_default_proxy(const ForecastDataset& ds, const PasConfig& cfg,
                                      std::vector<std::string>* warnings) {
    AggregateOutput agg;
    if (cfg.psr_proxy == PsrProxy::vi) {
        ViOptions opts;
        opts.seed = cfg.seed;
        agg = vi_agg(ds, opts);
    } else {
        agg = aggregate_all(ds, BaseAggregator::logit);
    }
    if (warnings)
        for (const auto& w : agg.warnings) warnings->push_back("psr proxy: " + w);
    std::vector<double> proxy(static_cast<std::size_t>(ds.num_events()),
                              std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < ds.num_events(); ++i)
        if (ds.event(i).space.is_binary() && agg.predictions[static_cast<std::size_t>(i)])
            proxy[static_cast<std::size_t>(i)] = agg.binary_prob(i);
    return proxy;
}

PasScores compute_pas(const ForecastDataset& ds, Mechanism mechanism, const PasConfig& cfg,
                      std::span<const double> proxy_by_event) {
    if (cfg.min_overlap < 2) throw usage_error("min_overlap must be at least 2");
    if (mechanism == Mechanism::true_score) return true_score_pas(ds, cfg.spsr);

    if (ds.binary_event_indices().empty())
        throw data_error("binary events required for peer assessment scores");

    PasScores out;
    out.mechanism = mechanism;
    out.agent_ids = ds.agent_ids();
    out.scores.assign(static_cast<std::size_t>(ds.num_agents()), std::nullopt);
    out.eligible.assign(static_cast<std::size_t>(ds.num_agents()), 0);

    switch (mechanism) {
        case Mechanism::dmi:
        case Mechanism::ca:
        case Mechanism::pts: {
            const SignalView signals = binarize(ds, cfg.binarize, cfg.seed);
            for (int j = 0; j < ds.num_agents(); ++j) {
                int peers = 0;
                std::optional<double> s;
                if (mechanism == Mechanism::dmi) s = dmi_score(ds, signals, j, cfg, &peers);
                else if (mechanism == Mechanism::ca) s = ca_score(ds, signals, j, cfg, &peers);
                else s = pts_score(ds, signals, j, cfg, &peers, &out.warnings);
                out.scores[static_cast<std::size_t>(j)] = s;
                out.eligible[static_cast<std::size_t>(j)] = peers;
                if (!s)
                    out.warnings.push_back(std::string(mechanism_name(mechanism)) +
                                           ": agent " + ds.agent_id(j) + " unscored (no eligible peer)");
            }
            break;
        }
        case Mechanism::ssr: {
            for (int j = 0; j < ds.num_agents(); ++j) {
                if (binary_records(ds, j).empty()) {
                    out.warnings.push_back("ssr: agent " + ds.agent_id(j) + " unscored (no binary events)");
                    continue;
                }
                const auto rates = ssr_estimate_error_rates(ds, j, cfg.seed);
                if (rates.degenerate)
                    out.warnings.push_back("ssr: degenerate moments for agent " + ds.agent_id(j) +
                                           ", using epsilon error rates");
                int events = 0;
                const double loss = ssr_score(ds, j, cfg, rates, &events);
                out.scores[static_cast<std::size_t>(j)] = -loss;
                out.eligible[static_cast<std::size_t>(j)] = events;
            }
            break;
        }
        case Mechanism::psr: {
            std::vector<double> proxy;
            if (proxy_by_event.empty()) {
                proxy = psr_default_proxy(ds, cfg, &out.warnings);
                proxy_by_event = proxy;
            }
            for (int j = 0; j < ds.num_agents(); ++j) {
                if (binary_records(ds, j).empty()) {
                    out.warnings.push_back("psr: agent " + ds.agent_id(j) + " unscored (no binary events)");
                    continue;
                }
                int events = 0;
                const double loss = psr_score(ds, j, cfg, proxy_by_event, &events);
                out.scores[static_cast<std::size_t>(j)] = -loss;
                out.eligible[static_cast<std::size_t>(j)] = events;
            }
            break;
        }
        case Mechanism::true_score:
            break; // handled above
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ranking

std::vector<int> PasScores::ranked(std::span<const int> subset) const {
    std::vector<int> order(subset.begin(), subset.end());
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& sa = scores[static_cast<std::size_t>(a)];
        const auto& sb = scores[static_cast<std::size_t>(b)];
        if (sa.has_value() != sb.has_value()) return sa.has_value();
        if (sa && sb && *sa != *sb) return *sa > *sb;
        return agent_ids[static_cast<std::size_t>(a)] < agent_ids[static_cast<std::size_t>(b)];
    });
    return order;
}

std::vector<int> PasScores::ranked_all() const {
    std::vector<int> all(agent_ids.size());
    for (std::size_t j = 0; j < agent_ids.size(); ++j) all[j] = static_cast<int>(j);
    return ranked(all);
}

} // namespace peereval
