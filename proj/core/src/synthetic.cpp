#include "peereval/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "peereval/rng.hpp"

namespace peereval {

namespace {

std::string padded_id(char prefix, int k, int count) {
    int width = 1;
    for (int c = count - 1; c >= 10; c /= 10) ++width;
    std::string digits = std::to_string(k);
    std::string out(1, prefix);
    out.append(static_cast<std::size_t>(width) - digits.size(), '0');
    out += digits;
    return out;
}

} // namespace

ForecastDataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.num_events <= 0 || spec.num_agents <= 0)
        throw usage_error("synthetic spec requires positive event and agent counts");
    if (!(spec.answer_density > 0.0 && spec.answer_density <= 1.0))
        throw usage_error("answer_density must be in (0, 1]");

    const int ne = spec.num_events;
    const int na = spec.num_agents;
    const auto* an = std::get_if<AdditiveNoiseModel>(&spec.model);
    const auto* cs = std::get_if<ConditionalSignalModel>(&spec.model);

    if (an) {
        if (static_cast<int>(an->event_probs.size()) != ne)
            throw usage_error("event_probs length must equal num_events");
        if (static_cast<int>(an->agent_sigma.size()) != na)
            throw usage_error("agent_sigma length must equal num_agents");
        for (double q : an->event_probs)
            if (!(q >= 0.0 && q <= 1.0)) throw usage_error("event probability out of [0,1]");
        for (double s : an->agent_sigma)
            if (!(s >= 0.0)) throw usage_error("agent sigma must be nonnegative");
    } else {
        if (static_cast<int>(cs->agents.size()) != na)
            throw usage_error("conditional model must describe every agent");
        if (!(cs->prior_p1 >= 0.0 && cs->prior_p1 <= 1.0))
            throw usage_error("prior out of [0,1]");
        for (const auto& row : cs->agents)
            if (!(row.p1_given_y0 >= 0.0 && row.p1_given_y0 <= 1.0) ||
                !(row.p1_given_y1 >= 0.0 && row.p1_given_y1 <= 1.0))
                throw usage_error("conditional signal probabilities out of [0,1]");
    }

    // Independent substreams per purpose keep the three draw layers
    // (outcomes, answer pattern, reports) decoupled.
    Rng outcome_rng = make_rng(spec.seed, 0x6f7574ULL);
    Rng answer_rng = make_rng(spec.seed, 0x616e73ULL);
    Rng report_rng = make_rng(spec.seed, 0x726570ULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<int> outcome(static_cast<std::size_t>(ne));
    for (int i = 0; i < ne; ++i) {
        const double q = an ? an->event_probs[static_cast<std::size_t>(i)] : cs->prior_p1;
        outcome[static_cast<std::size_t>(i)] = unif(outcome_rng) < q ? 1 : 0;
    }

    std::vector<char> answers(static_cast<std::size_t>(ne) * static_cast<std::size_t>(na));
    for (auto& a : answers) a = unif(answer_rng) < spec.answer_density ? 1 : 0;

    DatasetBuilder builder;
    for (int i = 0; i < ne; ++i)
        builder.add_event(padded_id('e', i, ne), OutcomeSpace{2}, outcome[static_cast<std::size_t>(i)]);
    for (int j = 0; j < na; ++j) builder.add_agent(padded_id('a', j, na));

    for (int i = 0; i < ne; ++i) {
        for (int j = 0; j < na; ++j) {
            if (!answers[static_cast<std::size_t>(i) * static_cast<std::size_t>(na) + static_cast<std::size_t>(j)])
                continue;
            double p;
            if (an) {
                const double eps = gauss(report_rng) * an->agent_sigma[static_cast<std::size_t>(j)];
                p = std::clamp(an->event_probs[static_cast<std::size_t>(i)] + eps, 0.0, 1.0);
            } else {
                const auto& row = cs->agents[static_cast<std::size_t>(j)];
                const double g = outcome[static_cast<std::size_t>(i)] == 1 ? row.p1_given_y1 : row.p1_given_y0;
                p = unif(report_rng) < g ? 1.0 : 0.0;
            }
            builder.add_record(i, j, {p});
        }
    }
    return builder.build();
}

namespace {

// Expands an explicit array or a {"uniform": [lo, hi]} / {"beta": [a, b]}
// shorthand into `count` values, deterministically from (seed, tag).
std::vector<double> expand_values(const nlohmann::json& node, int count, std::uint64_t seed,
                                  std::uint64_t tag, const char* what) {
    if (node.is_array()) {
        auto v = node.get<std::vector<double>>();
        if (static_cast<int>(v.size()) != count)
            throw usage_error(std::string(what) + " array must have " + std::to_string(count) +
                              " entries");
        return v;
    }
    if (!node.is_object()) throw usage_error(std::string(what) + " must be an array or distribution");
    Rng rng = make_rng(seed, tag);
    std::vector<double> v(static_cast<std::size_t>(count));
    if (node.contains("uniform")) {
        const auto range = node.at("uniform").get<std::vector<double>>();
        if (range.size() != 2 || range[0] > range[1])
            throw usage_error(std::string(what) + ": uniform needs [lo, hi]");
        std::uniform_real_distribution<double> dist(range[0], range[1]);
        for (auto& x : v) x = dist(rng);
        return v;
    }
    if (node.contains("beta")) {
        const auto ab = node.at("beta").get<std::vector<double>>();
        if (ab.size() != 2 || !(ab[0] > 0.0) || !(ab[1] > 0.0))
            throw usage_error(std::string(what) + ": beta needs positive [a, b]");
        std::gamma_distribution<double> ga(ab[0], 1.0), gb(ab[1], 1.0);
        for (auto& x : v) {
            const double u = ga(rng);
            const double w = gb(rng);
            x = u / (u + w);
        }
        return v;
    }
    throw usage_error(std::string(what) + ": unknown distribution (use uniform or beta)");
}

} // namespace

SyntheticSpec synthetic_spec_from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw usage_error(std::string("invalid synthetic spec JSON: ") + e.what());
    }
    try {
        SyntheticSpec spec;
        spec.num_events = doc.at("num_events").get<int>();
        spec.num_agents = doc.at("num_agents").get<int>();
        spec.answer_density = doc.value("answer_density", 1.0);
        spec.seed = doc.value("seed", std::uint64_t{0});
        const std::string model = doc.at("model").get<std::string>();
        if (model == "additive_noise") {
            AdditiveNoiseModel an;
            an.event_probs = expand_values(doc.at("q"), spec.num_events, spec.seed, 0x71ULL, "q");
            an.agent_sigma =
                expand_values(doc.at("sigma"), spec.num_agents, spec.seed, 0x736967ULL, "sigma");
            spec.model = std::move(an);
        } else if (model == "conditional_signal") {
            ConditionalSignalModel cs;
            cs.prior_p1 = doc.value("prior_p1", 0.5);
            const auto g0 = expand_values(doc.at("p1_given_y0"), spec.num_agents, spec.seed,
                                          0x673059ULL, "p1_given_y0");
            const auto g1 = expand_values(doc.at("p1_given_y1"), spec.num_agents, spec.seed,
                                          0x673159ULL, "p1_given_y1");
            cs.agents.resize(static_cast<std::size_t>(spec.num_agents));
            for (int j = 0; j < spec.num_agents; ++j) {
                cs.agents[static_cast<std::size_t>(j)] = {g0[static_cast<std::size_t>(j)],
                                                          g1[static_cast<std::size_t>(j)]};
            }
            spec.model = std::move(cs);
        } else {
            throw usage_error("unknown synthetic model '" + model + "'");
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw usage_error(std::string("invalid synthetic spec: ") + e.what());
    }
}

} // namespace peereval
