#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "peereval/dataset.hpp"

namespace peereval {

// p_{i,j} = clip(q_i + eps, 0, 1) with eps ~ Normal(0, sigma_j); the clip is
// a deliberate deviation from the raw additive model so that every generated
// report is a probability. Outcomes y_i ~ Bernoulli(q_i).
struct AdditiveNoiseModel {
    std::vector<double> event_probs; // q_i, one per event
    std::vector<double> agent_sigma; // sigma_j >= 0, one per agent
};

// Binary-signal agents: outcome y ~ Bernoulli(prior_p1), each answering
// agent independently reports 1 with probability p1_given_y (reports are
// degenerate probabilities 0.0 / 1.0). Signals are independent across agents
// conditioned on the outcome.
struct ConditionalSignalModel {
    struct AgentRow {
        double p1_given_y0 = 0.0;
        double p1_given_y1 = 1.0;
    };
    double prior_p1 = 0.5;
    std::vector<AgentRow> agents;
};

struct SyntheticSpec {
    std::variant<AdditiveNoiseModel, ConditionalSignalModel> model;
    int num_events = 0;
    int num_agents = 0;
    double answer_density = 1.0; // each (event, agent) pair answers independently
    std::uint64_t seed = 0;
};

// Deterministic given the spec: the same seed yields byte-identical datasets.
// Event ids are "e<k>", agent ids "a<k>", zero padded.
ForecastDataset generate_synthetic(const SyntheticSpec& spec);

// Parses a JSON document mirroring SyntheticSpec:
//
//   {"model": "additive_noise", "num_events": 200, "num_agents": 100,
//    "answer_density": 1.0, "seed": 7,
//    "q": [..] | {"uniform": [lo, hi]} | {"beta": [a, b]},
//    "sigma": [..] | {"uniform": [lo, hi]}}
//
//   {"model": "conditional_signal", ..., "prior_p1": 0.5,
//    "p1_given_y0": [..] | {"uniform": [lo, hi]},
//    "p1_given_y1": [..] | {"uniform": [lo, hi]}}
//
// Distribution shorthands expand to per-event / per-agent vectors using
// substreams of the spec seed, so a spec document plus seed fully determines
// the dataset.
SyntheticSpec synthetic_spec_from_json(const std::string& json_text);

} // namespace peereval
