#include "peereval/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "peereval/rng.hpp"

namespace peereval {

namespace {

constexpr double kProbEps = 1e-9;

void validate_probs(const std::vector<double>& probs, const OutcomeSpace& space,
                    const std::string& where) {
    if (space.is_binary()) {
        if (probs.size() != 1)
            throw data_error("binary prediction must be a single probability (" + where + ")");
        if (!(probs[0] >= 0.0 && probs[0] <= 1.0))
            throw data_error("probability out of range [0,1] (" + where + ")");
        return;
    }
    if (static_cast<int>(probs.size()) != space.num_choices)
        throw data_error("prediction vector length does not match outcome space (" + where + ")");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0))
            throw data_error("probability out of range [0,1] (" + where + ")");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbEps)
        throw data_error("multi-choice probabilities do not sum to 1 (" + where + ")");
}

} // namespace

std::span<const std::int32_t> ForecastDataset::records_on_event(int i) const {
    const auto a = static_cast<std::size_t>(by_event_offsets_[static_cast<std::size_t>(i)]);
    const auto b = static_cast<std::size_t>(by_event_offsets_[static_cast<std::size_t>(i) + 1]);
    return {by_event_.data() + a, b - a};
}

std::span<const std::int32_t> ForecastDataset::records_of_agent(int j) const {
    const auto a = static_cast<std::size_t>(by_agent_offsets_[static_cast<std::size_t>(j)]);
    const auto b = static_cast<std::size_t>(by_agent_offsets_[static_cast<std::size_t>(j) + 1]);
    return {by_agent_.data() + a, b - a};
}

const ForecastDataset::Record* ForecastDataset::find(int event, int agent) const {
    auto span = records_on_event(event);
    auto it = std::lower_bound(span.begin(), span.end(), agent,
                               [&](std::int32_t r, int a) { return records_[static_cast<std::size_t>(r)].agent < a; });
    if (it == span.end()) return nullptr;
    const Record& rec = records_[static_cast<std::size_t>(*it)];
    return rec.agent == agent ? &rec : nullptr;
}

std::optional<int> ForecastDataset::event_index(const std::string& event_id) const {
    for (std::size_t i = 0; i < events_.size(); ++i)
        if (events_[i].id == event_id) return static_cast<int>(i);
    return std::nullopt;
}

std::optional<int> ForecastDataset::agent_index(const std::string& agent_id) const {
    for (std::size_t j = 0; j < agent_ids_.size(); ++j)
        if (agent_ids_[j] == agent_id) return static_cast<int>(j);
    return std::nullopt;
}

bool ForecastDataset::all_binary() const {
    return std::all_of(events_.begin(), events_.end(),
                       [](const Event& e) { return e.space.is_binary(); });
}

bool ForecastDataset::all_resolved() const {
    return std::all_of(events_.begin(), events_.end(),
                       [](const Event& e) { return e.outcome.has_value(); });
}

std::vector<int> ForecastDataset::binary_event_indices() const {
    std::vector<int> out;
    for (int i = 0; i < num_events(); ++i)
        if (events_[static_cast<std::size_t>(i)].space.is_binary()) out.push_back(i);
    return out;
}

std::vector<double> ForecastDataset::full_probs(std::size_t r) const {
    return full_probs(records_[r]);
}

std::vector<double> ForecastDataset::full_probs(const Record& rec) const {
    const Event& ev = events_[static_cast<std::size_t>(rec.event)];
    if (ev.space.is_binary()) return {1.0 - rec.probs[0], rec.probs[0]};
    return rec.probs;
}

// ---------------------------------------------------------------------------
// DatasetBuilder

int DatasetBuilder::add_event(std::string id, OutcomeSpace space, std::optional<int> outcome) {
    if (space.num_choices < 2) throw data_error("outcome space must have at least 2 choices");
    if (outcome && (*outcome < 0 || *outcome >= space.num_choices))
        throw data_error("outcome out of range for event '" + id + "'");
    for (const auto& e : ds_.events_)
        if (e.id == id) throw data_error("duplicate event id '" + id + "'");
    ds_.events_.push_back({std::move(id), space, outcome});
    return static_cast<int>(ds_.events_.size()) - 1;
}

int DatasetBuilder::add_agent(std::string id) {
    for (std::size_t j = 0; j < ds_.agent_ids_.size(); ++j)
        if (ds_.agent_ids_[j] == id) return static_cast<int>(j);
    ds_.agent_ids_.push_back(std::move(id));
    return static_cast<int>(ds_.agent_ids_.size()) - 1;
}

void DatasetBuilder::add_record(const std::string& event_id, const std::string& agent_id,
                                std::vector<double> probs, std::optional<double> meta) {
    int ev = -1;
    for (std::size_t i = 0; i < ds_.events_.size(); ++i)
        if (ds_.events_[i].id == event_id) { ev = static_cast<int>(i); break; }
    if (ev < 0) throw data_error("record references unknown event '" + event_id + "'");
    add_record(ev, add_agent(agent_id), std::move(probs), meta);
}

void DatasetBuilder::add_record(int event_index, int agent_index,
                                std::vector<double> probs, std::optional<double> meta) {
    if (event_index < 0 || event_index >= static_cast<int>(ds_.events_.size()))
        throw data_error("record references unknown event index");
    if (agent_index < 0 || agent_index >= static_cast<int>(ds_.agent_ids_.size()))
        throw data_error("record references unknown agent index");
    const ForecastDataset::Event& ev = ds_.events_[static_cast<std::size_t>(event_index)];
    const std::string where = "event '" + ev.id + "', agent '" +
                              ds_.agent_ids_[static_cast<std::size_t>(agent_index)] + "'";
    validate_probs(probs, ev.space, where);
    if (meta) {
        if (!ev.space.is_binary())
            throw data_error("meta-prediction given for multi-choice " + where);
        if (!(*meta >= 0.0 && *meta <= 1.0))
            throw data_error("meta-prediction out of range [0,1] (" + where + ")");
    }
    ForecastDataset::Record rec;
    rec.event = event_index;
    rec.agent = agent_index;
    rec.probs = std::move(probs);
    rec.meta = meta;
    ds_.records_.push_back(std::move(rec));
}

ForecastDataset DatasetBuilder::build() {
    if (built_) throw usage_error("DatasetBuilder::build called twice");
    built_ = true;

    // Sort records by (event, agent); duplicates become adjacent.
    std::sort(ds_.records_.begin(), ds_.records_.end(),
              [](const ForecastDataset::Record& a, const ForecastDataset::Record& b) {
                  return a.event != b.event ? a.event < b.event : a.agent < b.agent;
              });
    for (std::size_t r = 1; r < ds_.records_.size(); ++r) {
        const auto& prev = ds_.records_[r - 1];
        const auto& cur = ds_.records_[r];
        if (prev.event == cur.event && prev.agent == cur.agent)
            throw data_error("duplicate record for event '" +
                             ds_.events_[static_cast<std::size_t>(cur.event)].id + "', agent '" +
                             ds_.agent_ids_[static_cast<std::size_t>(cur.agent)] + "'");
    }

    const int ne = static_cast<int>(ds_.events_.size());
    const int na = static_cast<int>(ds_.agent_ids_.size());
    ds_.by_event_offsets_.assign(static_cast<std::size_t>(ne) + 1, 0);
    ds_.by_agent_offsets_.assign(static_cast<std::size_t>(na) + 1, 0);
    for (const auto& rec : ds_.records_) {
        ++ds_.by_event_offsets_[static_cast<std::size_t>(rec.event) + 1];
        ++ds_.by_agent_offsets_[static_cast<std::size_t>(rec.agent) + 1];
    }
    for (int i = 0; i < ne; ++i)
        ds_.by_event_offsets_[static_cast<std::size_t>(i) + 1] += ds_.by_event_offsets_[static_cast<std::size_t>(i)];
    for (int j = 0; j < na; ++j)
        ds_.by_agent_offsets_[static_cast<std::size_t>(j) + 1] += ds_.by_agent_offsets_[static_cast<std::size_t>(j)];

    ds_.by_event_.resize(ds_.records_.size());
    ds_.by_agent_.resize(ds_.records_.size());
    std::vector<std::int32_t> epos(ds_.by_event_offsets_.begin(), ds_.by_event_offsets_.end() - 1);
    std::vector<std::int32_t> apos(ds_.by_agent_offsets_.begin(), ds_.by_agent_offsets_.end() - 1);
    for (std::size_t r = 0; r < ds_.records_.size(); ++r) {
        const auto& rec = ds_.records_[r];
        ds_.by_event_[static_cast<std::size_t>(epos[static_cast<std::size_t>(rec.event)]++)] = static_cast<std::int32_t>(r);
        ds_.by_agent_[static_cast<std::size_t>(apos[static_cast<std::size_t>(rec.agent)]++)] = static_cast<std::int32_t>(r);
    }
    // by_event_ is agent-sorted and by_agent_ event-sorted because records
    // were sorted by (event, agent) and the counting pass is stable.

    ds_.agent_draw_keys_.assign(static_cast<std::size_t>(na), 0);
    for (int j = 0; j < na; ++j) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto eat = [&h](const void* p, std::size_t n) {
            const auto* bytes = static_cast<const unsigned char*>(p);
            for (std::size_t i = 0; i < n; ++i) {
                h ^= bytes[i];
                h *= 0x100000001b3ULL;
            }
        };
        for (std::int32_t r : ds_.records_of_agent(j)) {
            const auto& rec = ds_.records_[static_cast<std::size_t>(r)];
            const auto& eid = ds_.events_[static_cast<std::size_t>(rec.event)].id;
            eat(eid.data(), eid.size());
            eat(rec.probs.data(), rec.probs.size() * sizeof(double));
            const double meta = rec.meta.value_or(-1.0);
            eat(&meta, sizeof(meta));
        }
        ds_.agent_draw_keys_[static_cast<std::size_t>(j)] = mix64(h);
    }
    return std::move(ds_);
}

// ---------------------------------------------------------------------------
// Filtering

FilterResult filter_dataset(const ForecastDataset& ds, int min_answers, int min_questions) {
    if (min_answers < 0 || min_questions < 0)
        throw usage_error("filter thresholds must be nonnegative");

    const int ne = ds.num_events();
    const int na = ds.num_agents();
    std::vector<char> event_alive(static_cast<std::size_t>(ne), 1);
    std::vector<char> agent_alive(static_cast<std::size_t>(na), 1);
    std::vector<int> event_count(static_cast<std::size_t>(ne), 0);
    std::vector<int> agent_count(static_cast<std::size_t>(na), 0);
    for (const auto& rec : ds.records()) {
        ++event_count[static_cast<std::size_t>(rec.event)];
        ++agent_count[static_cast<std::size_t>(rec.agent)];
    }

    FilterResult result;
    bool changed = true;
    while (changed) {
        changed = false;
        ++result.rounds;
        for (int i = 0; i < ne; ++i) {
            if (event_alive[static_cast<std::size_t>(i)] && event_count[static_cast<std::size_t>(i)] < min_answers) {
                event_alive[static_cast<std::size_t>(i)] = 0;
                changed = true;
                result.removed_events.push_back(ds.event(i).id);
                for (std::int32_t r : ds.records_on_event(i)) {
                    const auto& rec = ds.record(static_cast<std::size_t>(r));
                    if (agent_alive[static_cast<std::size_t>(rec.agent)]) --agent_count[static_cast<std::size_t>(rec.agent)];
                }
            }
        }
        for (int j = 0; j < na; ++j) {
            if (agent_alive[static_cast<std::size_t>(j)] && agent_count[static_cast<std::size_t>(j)] < min_questions) {
                agent_alive[static_cast<std::size_t>(j)] = 0;
                changed = true;
                result.removed_agents.push_back(ds.agent_id(j));
                for (std::int32_t r : ds.records_of_agent(j)) {
                    const auto& rec = ds.record(static_cast<std::size_t>(r));
                    if (event_alive[static_cast<std::size_t>(rec.event)]) --event_count[static_cast<std::size_t>(rec.event)];
                }
            }
        }
    }

    DatasetBuilder builder;
    std::vector<int> event_map(static_cast<std::size_t>(ne), -1);
    for (int i = 0; i < ne; ++i)
        if (event_alive[static_cast<std::size_t>(i)]) {
            const auto& ev = ds.event(i);
            event_map[static_cast<std::size_t>(i)] = builder.add_event(ev.id, ev.space, ev.outcome);
        }
    std::vector<int> agent_map(static_cast<std::size_t>(na), -1);
    for (int j = 0; j < na; ++j)
        if (agent_alive[static_cast<std::size_t>(j)]) agent_map[static_cast<std::size_t>(j)] = builder.add_agent(ds.agent_id(j));
    for (const auto& rec : ds.records()) {
        const int ei = event_map[static_cast<std::size_t>(rec.event)];
        const int aj = agent_map[static_cast<std::size_t>(rec.agent)];
        if (ei >= 0 && aj >= 0) builder.add_record(ei, aj, rec.probs, rec.meta);
    }
    result.dataset = builder.build();
    return result;
}

// ---------------------------------------------------------------------------
// Binarization

double SignalView::p1(std::size_t record_index) const {
    const double v = p1_[record_index];
    if (std::isnan(v)) throw data_error("binarize called on a multi-choice event");
    return v;
}

int SignalView::signal(std::size_t record_index) const {
    if (mode_ != BinarizeMode::sampled)
        throw usage_error("hard signals only exist in sampled mode");
    return p1(record_index) >= 0.5 ? 1 : 0;
}

SignalView binarize(const ForecastDataset& ds, BinarizeMode mode, std::uint64_t seed) {
    SignalView view;
    view.mode_ = mode;
    view.p1_.assign(ds.num_records(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < ds.num_records(); ++r) {
        const auto& rec = ds.record(r);
        const auto& ev = ds.event(rec.event);
        if (!ev.space.is_binary()) continue;
        const double p = ForecastDataset::binary_p(rec);
        if (mode == BinarizeMode::analytic) {
            view.p1_[r] = p;
        } else {
            // One draw per record, keyed by the event id and the agent's
            // record content, so sampled signals survive reordering and
            // relabeling unchanged.
            const double u = prf_uniform(seed, 0x62696e7aULL, fnv1a64(ev.id),
                                         ds.agent_draw_key(rec.agent));
            view.p1_[r] = u < p ? 1.0 : 0.0;
        }
    }
    return view;
}

std::vector<std::int8_t> threshold_labels(const ForecastDataset& ds) {
    std::vector<std::int8_t> labels(ds.num_records(), -1);
    for (std::size_t r = 0; r < ds.num_records(); ++r) {
        const auto& rec = ds.record(r);
        if (!ds.event(rec.event).space.is_binary()) continue;
        labels[r] = ForecastDataset::binary_p(rec) >= 0.5 ? 1 : 0;
    }
    return labels;
}

std::vector<std::int8_t> sampled_labels(const ForecastDataset& ds, const SignalView& signals) {
    if (signals.mode() != BinarizeMode::sampled)
        throw usage_error("sampled_labels requires a sampled SignalView");
    std::vector<std::int8_t> labels(ds.num_records(), -1);
    for (std::size_t r = 0; r < ds.num_records(); ++r) {
        const auto& rec = ds.record(r);
        if (!ds.event(rec.event).space.is_binary()) continue;
        labels[r] = static_cast<std::int8_t>(signals.signal(r));
    }
    return labels;
}

} // namespace peereval
