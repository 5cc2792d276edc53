#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peereval/dataset.hpp"
#include "peereval/scoring.hpp"

namespace peereval {

// The five peer assessment mechanisms plus the ground-truth oracle used for
// the "in hindsight" baseline. All of them operate on binary events only;
// the resulting per-agent scores may then be applied when aggregating any
// event type.
//
// The correlation mechanisms (dmi, ca) rank by mutual-information-style
// agreement, which cannot distinguish a consistently wrong reporter from a
// consistently right one: they assume reports correlate positively with
// outcomes. pts additionally needs the crowd's mean prediction to have
// precision above one half on both classes before its ranking tracks
// accuracy.
enum class Mechanism { dmi, ca, pts, ssr, psr, true_score };

const char* mechanism_name(Mechanism m);
std::optional<Mechanism> mechanism_from_name(const std::string& name);

struct PeerPolicy {
    enum class Kind { all_eligible, k_random };
    Kind kind = Kind::all_eligible;
    int count = 1; // peers per agent under k_random
};

enum class DmiSplit { even_odd, seeded_random };
enum class PsrProxy { vi, logit };

struct PasConfig {
    BinarizeMode binarize = BinarizeMode::analytic;
    PeerPolicy peer_policy{};
    // Minimum shared binary events for a peer to count. DMI uses
    // max(min_overlap, 4) so both halves of its split hold >= 2 events.
    int min_overlap = 2;
    DmiSplit dmi_split = DmiSplit::even_odd;
    Spsr spsr = Spsr::brier;
    PsrProxy psr_proxy = PsrProxy::vi;
    std::uint64_t seed = 0;
};

// Empirical joint distribution of two agents' binary signals over their
// shared events. Entries sum to 1 whenever n_shared > 0. In analytic mode
// the cells hold exact Bernoulli expectations, i.e. the mean over shared
// events of P(s_j = u) * P(s_k = v).
struct JointDistributionMatrix {
    double d[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    int n_shared = 0;

    double row_marginal(int u) const { return d[u][0] + d[u][1]; }
    double col_marginal(int v) const { return d[0][v] + d[1][v]; }
    double det() const { return d[0][0] * d[1][1] - d[0][1] * d[1][0]; }
};

JointDistributionMatrix empirical_joint(const ForecastDataset& ds, const SignalView& signals,
                                        int agent_j, int agent_k);

// Error rates of the crowd's noisy outcome signal, estimated excluding one
// agent. e0 = P(z=1 | y=0), e1 = P(z=0 | y=1), p1 = prior P(y=1).
// `degenerate` marks the epsilon-floor fallback after unusable moments.
struct SsrErrorRates {
    double e0 = 1e-6;
    double e1 = 1e-6;
    double p1 = 0.5;
    bool degenerate = false;
};

// Pure inversion of the first three match moments:
//   c_m = p1 * (1-e1)^m + (1-p1) * e0^m,  m = 1, 2, 3.
// Falls back to the epsilon floor when |c2 - c1^2| < 1e-9 or the
// discriminant is negative beyond tolerance.
SsrErrorRates ssr_invert_moments(double c1, double c2, double c3);

// Samples per event one signal plus three reference signals without
// replacement (peer pick probabilities proportional to 1 / |M_k|), computes
// the match moments and inverts them. Requires >= 3 peer signals on at least
// one event.
SsrErrorRates ssr_estimate_error_rates(const ForecastDataset& ds, int exclude_agent,
                                       std::uint64_t seed);

// Per-mechanism scores, uniformly oriented so that higher means better
// (loss-form SPSR mechanisms are negated on storage). Agents that cannot be
// scored (no eligible peer) carry nullopt and rank below every scored agent,
// ties broken by agent id.
struct PasScores {
    Mechanism mechanism = Mechanism::ca;
    std::vector<std::string> agent_ids;
    std::vector<std::optional<double>> scores;
    std::vector<int> eligible; // peers used (dmi/ca/pts) or events scored (ssr/psr/true)
    std::vector<std::string> warnings;

    // Agents of `subset` ordered best-first. nullptr subset means all agents.
    std::vector<int> ranked(std::span<const int> subset) const;
    std::vector<int> ranked_all() const;
};

// Single-agent scores; nullopt when the agent has no eligible peer. These are
// the raw per-mechanism rewards (not negated); compute_pas applies the
// orientation normalization.
std::optional<double> dmi_score(const ForecastDataset& ds, const SignalView& signals, int agent,
                                const PasConfig& cfg, int* peers_used = nullptr);
std::optional<double> ca_score(const ForecastDataset& ds, const SignalView& signals, int agent,
                               const PasConfig& cfg, int* peers_used = nullptr);
// The crowd frequency normalizer is the mean over events of the
// leave-this-agent-out fraction of peers reporting each value; a value the
// crowd never reports contributes nothing to the reward (with a warning).
std::optional<double> pts_score(const ForecastDataset& ds, const SignalView& signals, int agent,
                                const PasConfig& cfg, int* peers_used = nullptr,
                                std::vector<std::string>* warnings = nullptr);

// De-bias transform on a pair of candidate scores (s_z for the observed z,
// s_not_z for its flip):
//   ((1 - e_{1-z}) * s_z - e_z * s_not_z) / (1 - e0 - e1).
// In expectation over z | y this recovers the clean score s_y exactly.
double ssr_debias_terms(double s_z, double s_not_z, int z, double e0, double e1);

// Same transform applied to a strictly proper scoring rule on one binary
// prediction.
double ssr_debias(Spsr rule, double p, int z, double e0, double e1, LogClamp clamp = {});

// Mean surrogate-scoring-rule loss over the agent's scoreable binary events
// (z drawn from the leave-one-out mean Bernoulli, cfg.seed-derived).
double ssr_score(const ForecastDataset& ds, int agent, const PasConfig& cfg,
                 const SsrErrorRates& rates, int* events_used = nullptr);

// Mean proxy-scoring-rule loss against per-event proxies y' in [0,1]
// (indexed by event, NaN = unavailable; missing proxy for an answered binary
// event is an error).
double psr_score(const ForecastDataset& ds, int agent, const PasConfig& cfg,
                 std::span<const double> proxy_by_event, int* events_used = nullptr);

// Mean SPSR loss against realized outcomes, binary events; all such events
// must be resolved.
PasScores true_score_pas(const ForecastDataset& ds, Spsr spsr = Spsr::brier);

// Per-event outcome proxy used by PSR: the variational-inference aggregate
// (default) or the full-crowd Logit aggregate, indexed by event with NaN on
// multi-choice events.
std::vector<double> psr_default_proxy(const ForecastDataset& ds, const PasConfig& cfg,
                                      std::vector<std::string>* warnings = nullptr);

// Dispatcher over the mechanisms. For PSR the proxy is produced internally
// per cfg.psr_proxy (variational inference by default); pass
// `proxy_by_event` to override.
PasScores compute_pas(const ForecastDataset& ds, Mechanism mechanism, const PasConfig& cfg,
                      std::span<const double> proxy_by_event = {});

} // namespace peereval
