#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "peereval/csv.hpp"
#include "peereval/synthetic.hpp"

using namespace peereval;

TEST_SUITE_BEGIN("synthetic");

TEST_CASE("zero noise reproduces the event probabilities") {
    SyntheticSpec spec;
    spec.num_events = 20;
    spec.num_agents = 5;
    spec.seed = 3;
    AdditiveNoiseModel an;
    an.event_probs.assign(20, 0.0);
    for (int i = 0; i < 20; ++i) an.event_probs[static_cast<std::size_t>(i)] = (i + 1) / 21.0;
    an.agent_sigma.assign(5, 0.0);
    spec.model = an;
    const auto ds = generate_synthetic(spec);
    for (const auto& rec : ds.records())
        CHECK(rec.probs[0] == an.event_probs[static_cast<std::size_t>(rec.event)]);
}

TEST_CASE("perfect conditional signals reproduce the outcome") {
    SyntheticSpec spec;
    spec.num_events = 50;
    spec.num_agents = 4;
    spec.seed = 5;
    ConditionalSignalModel cs;
    cs.prior_p1 = 0.4;
    cs.agents.assign(4, {0.0, 1.0}); // report 1 iff y = 1
    spec.model = cs;
    const auto ds = generate_synthetic(spec);
    for (const auto& rec : ds.records())
        CHECK(rec.probs[0] == static_cast<double>(*ds.event(rec.event).outcome));
}

TEST_CASE("same seed gives byte-identical datasets") {
    SyntheticSpec spec;
    spec.num_events = 30;
    spec.num_agents = 8;
    spec.answer_density = 0.7;
    spec.seed = 99;
    AdditiveNoiseModel an;
    an.event_probs.assign(30, 0.5);
    an.agent_sigma.assign(8, 0.2);
    spec.model = an;

    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    REQUIRE(a.num_records() == b.num_records());
    for (std::size_t r = 0; r < a.num_records(); ++r) {
        CHECK(a.record(r).event == b.record(r).event);
        CHECK(a.record(r).agent == b.record(r).agent);
        CHECK(a.record(r).probs == b.record(r).probs);
    }
    for (int i = 0; i < a.num_events(); ++i) CHECK(a.event(i).outcome == b.event(i).outcome);
}

TEST_CASE("per-agent noise variance matches sigma for interior q") {
    SyntheticSpec spec;
    spec.num_events = 2000;
    spec.num_agents = 5;
    spec.seed = 11;
    AdditiveNoiseModel an;
    an.event_probs.assign(2000, 0.5); // interior, clipping negligible
    an.agent_sigma = {0.05, 0.1, 0.2, 0.3, 0.4};
    spec.model = an;
    const auto ds = generate_synthetic(spec);

    std::vector<double> ss(5, 0.0);
    std::vector<int> n(5, 0);
    for (const auto& rec : ds.records()) {
        const double d = rec.probs[0] - 0.5;
        ss[static_cast<std::size_t>(rec.agent)] += d * d;
        ++n[static_cast<std::size_t>(rec.agent)];
    }
    for (int j = 0; j < 5; ++j) {
        const double var = ss[static_cast<std::size_t>(j)] / n[static_cast<std::size_t>(j)];
        const double target = an.agent_sigma[static_cast<std::size_t>(j)] * an.agent_sigma[static_cast<std::size_t>(j)];
        CHECK(var == doctest::Approx(target).epsilon(0.15));
    }
}

TEST_CASE("answer density thins the record matrix") {
    SyntheticSpec spec;
    spec.num_events = 100;
    spec.num_agents = 50;
    spec.answer_density = 0.3;
    spec.seed = 21;
    AdditiveNoiseModel an;
    an.event_probs.assign(100, 0.5);
    an.agent_sigma.assign(50, 0.1);
    spec.model = an;
    const auto ds = generate_synthetic(spec);
    const double fill = static_cast<double>(ds.num_records()) / (100.0 * 50.0);
    CHECK(fill == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("conditional signals factorize given the outcome") {
    // chi-square independence check of two agents' signals within each
    // outcome class; 10^4 events
    SyntheticSpec spec;
    spec.num_events = 10000;
    spec.num_agents = 2;
    spec.seed = 31;
    ConditionalSignalModel cs;
    cs.prior_p1 = 0.5;
    cs.agents = {{0.2, 0.8}, {0.3, 0.7}};
    spec.model = cs;
    const auto ds = generate_synthetic(spec);

    for (int y = 0; y < 2; ++y) {
        double n[2][2] = {{0, 0}, {0, 0}};
        for (int i = 0; i < ds.num_events(); ++i) {
            if (*ds.event(i).outcome != y) continue;
            const auto* r0 = ds.find(i, 0);
            const auto* r1 = ds.find(i, 1);
            REQUIRE(r0 != nullptr);
            REQUIRE(r1 != nullptr);
            n[r0->probs[0] >= 0.5 ? 1 : 0][r1->probs[0] >= 0.5 ? 1 : 0] += 1.0;
        }
        const double total = n[0][0] + n[0][1] + n[1][0] + n[1][1];
        double chi2 = 0.0;
        for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v) {
                const double expect = (n[u][0] + n[u][1]) * (n[0][v] + n[1][v]) / total;
                chi2 += (n[u][v] - expect) * (n[u][v] - expect) / expect;
            }
        CHECK(chi2 < 6.63); // df = 1, p = 0.01 critical value
    }
}

TEST_CASE("json spec parses arrays and distribution shorthands") {
    const char* text = R"({
        "model": "additive_noise", "num_events": 4, "num_agents": 3, "seed": 9,
        "q": [0.1, 0.4, 0.6, 0.9], "sigma": {"uniform": [0.05, 0.4]}
    })";
    const auto spec = synthetic_spec_from_json(text);
    const auto& an = std::get<AdditiveNoiseModel>(spec.model);
    CHECK(an.event_probs == std::vector<double>{0.1, 0.4, 0.6, 0.9});
    REQUIRE(an.agent_sigma.size() == 3);
    for (double s : an.agent_sigma) CHECK((s >= 0.05 && s <= 0.4));
    // deterministic expansion
    const auto spec2 = synthetic_spec_from_json(text);
    CHECK(std::get<AdditiveNoiseModel>(spec2.model).agent_sigma == an.agent_sigma);

    CHECK_THROWS_AS(synthetic_spec_from_json("{\"model\": \"nope\"}"), Error);
    CHECK_THROWS_AS(synthetic_spec_from_json("not json"), Error);
}

TEST_CASE("empty dimensions are rejected") {
    SyntheticSpec spec;
    spec.num_events = 0;
    spec.num_agents = 3;
    spec.model = AdditiveNoiseModel{};
    CHECK_THROWS_AS(generate_synthetic(spec), Error);
}

TEST_SUITE_END();
