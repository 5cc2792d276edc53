#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peereval/error.hpp"

namespace peereval {

// Outcome space of a single event. num_choices == 2 is a binary event whose
// predictions are stored as a scalar P(y=1); num_choices > 2 is a
// multiple-choice event with a full probability vector per prediction.
struct OutcomeSpace {
    int num_choices = 2;

    bool is_binary() const { return num_choices == 2; }
};

// One agent's final prediction on one event, as supplied by loaders and
// generators. Binary events carry probs of size 1 (= P(y=1)); multi-choice
// events carry a vector of length num_choices summing to 1 (tolerance 1e-9).
// meta is the agent's estimate of the average prediction of everyone else
// (used by MP/SP); it only applies to binary events.
struct PredictionRecord {
    std::string event_id;
    std::string agent_id;
    std::vector<double> probs;
    std::optional<double> meta;
};

// Immutable collection of events, agents and predictions with derived
// indices. At most one record exists per (event, agent) pair. Events and
// agents are interned: the library works with dense integer indices and the
// original string identifiers are kept for IO. Instances never change after
// construction and are safe to share across threads.
class ForecastDataset {
public:
    struct Event {
        std::string id;
        OutcomeSpace space;
        std::optional<int> outcome; // in {0, ..., num_choices-1} when resolved
    };

    // Internal record form: probs has size 1 for binary events, else
    // space.num_choices entries.
    struct Record {
        std::int32_t event = -1;
        std::int32_t agent = -1;
        std::vector<double> probs;
        std::optional<double> meta;
    };

    int num_events() const { return static_cast<int>(events_.size()); }
    int num_agents() const { return static_cast<int>(agent_ids_.size()); }
    std::size_t num_records() const { return records_.size(); }

    const Event& event(int i) const { return events_[static_cast<std::size_t>(i)]; }
    const std::string& agent_id(int j) const { return agent_ids_[static_cast<std::size_t>(j)]; }
    const std::vector<Event>& events() const { return events_; }
    const std::vector<std::string>& agent_ids() const { return agent_ids_; }
    const std::vector<Record>& records() const { return records_; }
    const Record& record(std::size_t r) const { return records_[r]; }

    // Record indices of all predictions on event i (N_i), sorted by agent.
    std::span<const std::int32_t> records_on_event(int i) const;
    // Record indices of all predictions by agent j (M_j), sorted by event.
    std::span<const std::int32_t> records_of_agent(int j) const;

    // Lookup of the unique record for (event, agent); nullptr when absent.
    const Record* find(int event, int agent) const;

    std::optional<int> event_index(const std::string& event_id) const;
    std::optional<int> agent_index(const std::string& agent_id) const;

    bool all_binary() const;
    bool all_resolved() const;
    // Indices of binary events, ascending. PAS mechanisms operate on these.
    std::vector<int> binary_event_indices() const;

    // Binary scalar P(y=1) of a record on a binary event.
    static double binary_p(const Record& rec) { return rec.probs[0]; }

    // Prediction expanded to a full probability vector of length num_choices.
    std::vector<double> full_probs(std::size_t r) const;
    std::vector<double> full_probs(const Record& rec) const;

    // Hash of the agent's predictions (events answered, probabilities,
    // metas). Seeded computations key their substreams on this instead of
    // the agent identifier or index, so scores follow the records: renaming
    // or reordering agents never changes any draw.
    std::uint64_t agent_draw_key(int j) const { return agent_draw_keys_[static_cast<std::size_t>(j)]; }

private:
    friend class DatasetBuilder;

    std::vector<Event> events_;
    std::vector<std::string> agent_ids_;
    std::vector<Record> records_;
    // CSR-style derived indices, rebuilt on construction.
    std::vector<std::int32_t> by_event_;
    std::vector<std::int32_t> by_event_offsets_;
    std::vector<std::int32_t> by_agent_;
    std::vector<std::int32_t> by_agent_offsets_;
    std::vector<std::uint64_t> agent_draw_keys_;
};

// Accumulates events and records, validates invariants, and freezes into a
// ForecastDataset. Throws peereval::Error (data kind) on violations:
// duplicate (event, agent) records, probabilities outside [0,1], unnormalized
// multi-choice vectors, outcomes outside the outcome space.
class DatasetBuilder {
public:
    // Returns the event index. Re-adding an existing id is an error.
    int add_event(std::string id, OutcomeSpace space, std::optional<int> outcome = std::nullopt);

    // Agent ids are interned on first use.
    void add_record(const std::string& event_id, const std::string& agent_id,
                    std::vector<double> probs, std::optional<double> meta = std::nullopt);
    void add_record(int event_index, int agent_index,
                    std::vector<double> probs, std::optional<double> meta = std::nullopt);

    int add_agent(std::string id);

    ForecastDataset build();

private:
    ForecastDataset ds_;
    bool built_ = false;
};

// Result of threshold filtering. `removed_*` list the identifiers dropped,
// in removal order; `rounds` counts fixed-point iterations.
struct FilterResult {
    ForecastDataset dataset;
    std::vector<std::string> removed_events;
    std::vector<std::string> removed_agents;
    int rounds = 0;
};

// Iteratively removes events with fewer than min_answers predictions and
// agents with fewer than min_questions predictions until both constraints
// hold simultaneously. Idempotent; may return an empty dataset.
FilterResult filter_dataset(const ForecastDataset& ds, int min_answers = 10,
                            int min_questions = 15);

// ---------------------------------------------------------------------------
// Report binarization

enum class BinarizeMode { analytic, sampled };

// View of the dataset's binary-event predictions as Bernoulli signals.
// In sampled mode each prediction is replaced by one seeded Bernoulli(p)
// draw, so p1() is 0 or 1. In analytic mode p1() returns the reported
// probability itself and downstream joint-distribution computations use
// exact Bernoulli expectations instead of Monte Carlo draws.
class SignalView {
public:
    BinarizeMode mode() const { return mode_; }

    // P(signal = 1) for a record on a binary event. Throws on multi-choice
    // records.
    double p1(std::size_t record_index) const;

    // Hard 0/1 signal; only valid in sampled mode.
    int signal(std::size_t record_index) const;

private:
    friend SignalView binarize(const ForecastDataset&, BinarizeMode, std::uint64_t);

    BinarizeMode mode_ = BinarizeMode::analytic;
    std::vector<double> p1_; // indexed by record; NaN marks multi-choice
};

// Builds the signal view over all binary events of ds. The seed is only used
// in sampled mode; the same (dataset, seed) always yields the same signals.
SignalView binarize(const ForecastDataset& ds, BinarizeMode mode, std::uint64_t seed = 0);

// Deterministic 0/1 labels for binary-event records: p >= 0.5 maps to 1.
// Multi-choice records get -1. This is the default input rule for the
// variational-inference aggregator.
std::vector<std::int8_t> threshold_labels(const ForecastDataset& ds);

// 0/1 labels taken from a sampled SignalView (errors on analytic views).
std::vector<std::int8_t> sampled_labels(const ForecastDataset& ds, const SignalView& signals);

} // namespace peereval
