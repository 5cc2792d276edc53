// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each check pins its tolerance in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "peereval/aggregate.hpp"
#include "peereval/eval.hpp"
#include "peereval/mechanisms.hpp"
#include "peereval/scoring.hpp"
#include "peereval/stats.hpp"
#include "peereval/synthetic.hpp"

using namespace peereval;

namespace {

// ---------------------------------------------------------------------------
// helpers

struct CheckContext {
    std::ostringstream detail;
    bool ok = true;

    void require(bool condition, const std::string& msg) {
        if (!condition && ok) {
            ok = false;
            detail << msg;
        }
    }
};

ForecastDataset bathtub_noise_crowd(int agents, int events, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::gamma_distribution<double> g(0.15, 1.0);
    SyntheticSpec spec;
    spec.num_events = events;
    spec.num_agents = agents;
    spec.seed = seed;
    AdditiveNoiseModel an;
    an.event_probs.resize(static_cast<std::size_t>(events));
    for (auto& q : an.event_probs) {
        const double x = g(rng), y = g(rng);
        q = x / (x + y); // Beta(0.15, 0.15): most events near-certain
    }
    an.agent_sigma.resize(static_cast<std::size_t>(agents));
    for (auto& s : an.agent_sigma) s = 0.05 + 0.35 * unif(rng);
    spec.model = an;
    return generate_synthetic(spec);
}

double mean_brier(const AggregateOutput& out, const ForecastDataset& ds) {
    return evaluate(out, ds, Metric::brier).mean;
}

// ---------------------------------------------------------------------------
// 1. SSR unbiasedness: sum_z P(z|y) R(p, z) == S(p, y) exactly

bool crit_ssr_unbiasedness(CheckContext& ctx) {
    double worst = 0.0;
    for (int i0 = 0; i0 <= 18; ++i0) {
        const double e0 = 0.05 * i0;
        for (int i1 = 0; i1 + i0 <= 18; ++i1) {
            const double e1 = 0.05 * i1;
            for (int pi = 0; pi <= 10; ++pi) {
                const double p = 0.1 * pi;
                for (int y = 0; y <= 1; ++y) {
                    for (Spsr rule : {Spsr::brier, Spsr::log}) {
                        const double pz1 = y == 1 ? 1.0 - e1 : e0;
                        const double expect = pz1 * ssr_debias(rule, p, 1, e0, e1) +
                                              (1.0 - pz1) * ssr_debias(rule, p, 0, e0, e1);
                        const double target = spsr_binary(rule, p, y);
                        worst = std::max(worst, std::abs(expect - target));
                    }
                }
            }
        }
    }
    ctx.detail << "max deviation " << worst;
    return worst < 1e-12;
}

// ---------------------------------------------------------------------------
// 2. SSR error-rate recovery: exact moment inversion and sampled estimation

bool crit_ssr_recovery(CheckContext& ctx) {
    double worst_exact = 0.0;
    for (double p1 : {0.3, 0.45, 0.6, 0.75})
        for (double e0 : {0.05, 0.1, 0.2, 0.3})
            for (double e1 : {0.05, 0.1, 0.2, 0.3}) {
                const double c1 = p1 * (1 - e1) + (1 - p1) * e0;
                const double c2 = p1 * (1 - e1) * (1 - e1) + (1 - p1) * e0 * e0;
                const double c3 = p1 * std::pow(1 - e1, 3) + (1 - p1) * std::pow(e0, 3);
                const auto rates = ssr_invert_moments(c1, c2, c3);
                if (rates.degenerate) {
                    ctx.detail << "unexpected degenerate inversion";
                    return false;
                }
                worst_exact = std::max({worst_exact, std::abs(rates.e0 - e0), std::abs(rates.e1 - e1)});
            }
    if (worst_exact >= 1e-9) {
        ctx.detail << "analytic inversion off by " << worst_exact;
        return false;
    }

    double worst_sampled = 0.0;
    for (int s = 0; s < 20; ++s) {
        SyntheticSpec spec;
        spec.num_events = 10000;
        spec.num_agents = 10;
        spec.seed = 8800 + static_cast<std::uint64_t>(s);
        ConditionalSignalModel cs;
        cs.prior_p1 = 0.6;
        cs.agents.assign(10, {0.2, 0.9}); // e0 = 0.2, e1 = 0.1
        spec.model = cs;
        const auto ds = generate_synthetic(spec);
        const auto rates = ssr_estimate_error_rates(ds, 0, 17 + static_cast<std::uint64_t>(s));
        worst_sampled = std::max({worst_sampled, std::abs(rates.e0 - 0.2), std::abs(rates.e1 - 0.1)});
    }
    ctx.detail << "analytic " << worst_exact << ", sampled " << worst_sampled;
    return worst_sampled <= 0.02;
}

// ---------------------------------------------------------------------------
// 3. Theorem-1 rankings against generative-model oracles

bool crit_theorem1_rankings(CheckContext& ctx) {
    const int agents = 50, events = 2000;
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> unif(0.05, 0.45);
    ConditionalSignalModel cs;
    cs.prior_p1 = 0.5;
    cs.agents.resize(agents);
    for (auto& row : cs.agents) row = {0.5 - unif(rng), 0.5 + unif(rng)};
    SyntheticSpec spec;
    spec.num_events = events;
    spec.num_agents = agents;
    spec.answer_density = 0.5;
    spec.seed = 4242;
    spec.model = cs;
    const auto ds = generate_synthetic(spec);

    // Oracles from the known model: let g_y = P(report 1 | y).
    std::vector<double> det_mi(agents), det_mi_sq(agents), pts_oracle(agents);
    const double q1 = cs.prior_p1, q0 = 1 - q1;
    double dbar[2][2] = {{0, 0}, {0, 0}}; // dbar[u][y] = mean_j P(report u, y)
    for (const auto& row : cs.agents) {
        dbar[1][0] += q0 * row.p1_given_y0 / agents;
        dbar[0][0] += q0 * (1 - row.p1_given_y0) / agents;
        dbar[1][1] += q1 * row.p1_given_y1 / agents;
        dbar[0][1] += q1 * (1 - row.p1_given_y1) / agents;
    }
    const double pbar0 = dbar[0][0] + dbar[0][1];
    const double pbar1 = dbar[1][0] + dbar[1][1];
    // weighted 0-1 loss coefficients from the asymptotic expansion of the
    // peer-truth-serum reward
    const double coefA = (dbar[0][0] / pbar0 - dbar[1][0] / pbar1) / q0; // on P(report 1, y=0)
    const double coefB = (dbar[1][1] / pbar1 - dbar[0][1] / pbar0) / q1; // on P(report 0, y=1)
    for (int j = 0; j < agents; ++j) {
        const auto& row = cs.agents[static_cast<std::size_t>(j)];
        const double det = q0 * q1 * (row.p1_given_y1 - row.p1_given_y0);
        det_mi[static_cast<std::size_t>(j)] = std::abs(det);
        det_mi_sq[static_cast<std::size_t>(j)] = det * det;
        pts_oracle[static_cast<std::size_t>(j)] =
            -(coefA * q0 * row.p1_given_y0 + coefB * q1 * (1 - row.p1_given_y1));
    }

    PasConfig cfg; // analytic binarization
    auto scores_of = [&](Mechanism m) {
        const auto pas = compute_pas(ds, m, cfg);
        std::vector<double> v(agents);
        for (int j = 0; j < agents; ++j) v[static_cast<std::size_t>(j)] = *pas.scores[static_cast<std::size_t>(j)];
        return v;
    };
    const double s_dmi = spearman(scores_of(Mechanism::dmi), det_mi_sq);
    const double s_ca = spearman(scores_of(Mechanism::ca), det_mi);
    const double s_pts = spearman(scores_of(Mechanism::pts), pts_oracle);
    ctx.detail << "spearman dmi " << s_dmi << ", ca " << s_ca << ", pts " << s_pts;
    return s_dmi >= 0.9 && s_ca >= 0.9 && s_pts >= 0.9;
}

// ---------------------------------------------------------------------------
// 4. AUC / rank-sum identity on tie-free instances

bool crit_auc_identity(CheckContext& ctx) {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    int checked = 0;
    while (checked < 500) {
        const int n = 4 + static_cast<int>(rng() % 47);
        std::vector<double> preds(static_cast<std::size_t>(n));
        std::vector<int> ys(static_cast<std::size_t>(n));
        for (auto& p : preds) p = unif(rng);
        int n0 = 0, n1 = 0;
        for (auto& y : ys) {
            y = unif(rng) < 0.5 ? 1 : 0;
            (y ? n1 : n0) += 1;
        }
        if (n0 == 0 || n1 == 0) continue;
        const double lhs = 0.5 - rank_sum(preds, ys) / (2.0 * n0 * n1);
        worst = std::max(worst, std::abs(lhs - auc_roc(preds, ys)));
        ++checked;
    }
    ctx.detail << "max deviation " << worst << " over 500 instances";
    return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// 5. Weighted-mean swap property under the additive-noise closed form

bool crit_theorem3_swap(CheckContext& ctx) {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int instances = 0, pairs_checked = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 3 + static_cast<int>(rng() % 8);
        std::vector<double> u(static_cast<std::size_t>(n)), sigma(static_cast<std::size_t>(n));
        double total = 0.0;
        for (auto& x : u) {
            x = unif(rng) + 1e-6;
            total += x;
        }
        for (auto& x : u) x /= total;
        for (auto& s : sigma) s = 0.05 + 0.45 * unif(rng);
        const double q = unif(rng);
        const double base = q * (1 - q);
        auto closed_form = [&](const std::vector<double>& w) {
            double acc = base;
            for (int j = 0; j < n; ++j)
                acc += w[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(j)] *
                       sigma[static_cast<std::size_t>(j)] * sigma[static_cast<std::size_t>(j)];
            return acc;
        };
        const double before = closed_form(u);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                // mis-ordered: strictly less noisy agent carries strictly less weight
                if (!(sigma[static_cast<std::size_t>(a)] < sigma[static_cast<std::size_t>(b)] &&
                      u[static_cast<std::size_t>(a)] < u[static_cast<std::size_t>(b)]))
                    continue;
                auto swapped = u;
                std::swap(swapped[static_cast<std::size_t>(a)], swapped[static_cast<std::size_t>(b)]);
                ++pairs_checked;
                if (!(closed_form(swapped) < before)) {
                    ctx.detail << "swap failed to decrease the closed form";
                    return false;
                }
            }
        ++instances;
    }
    ctx.detail << instances << " instances, " << pairs_checked << " mis-ordered pairs";
    return pairs_checked > 0;
}

// ---------------------------------------------------------------------------
// 6. Selection by true accuracy and by SSR beats the full crowd

bool crit_selection_beats_crowd(CheckContext& ctx) {
    const int seeds = 50;
    int true_wins = 0, ssr_wins = 0, significant = 0;
    for (int s = 0; s < seeds; ++s) {
        const auto ds = bathtub_noise_crowd(100, 200, 9900 + static_cast<std::uint64_t>(s));
        const auto bench = aggregate_all(ds, BaseAggregator::mean);
        const auto bench_eval = evaluate(bench, ds, Metric::brier);

        const auto truth = true_score_pas(ds, Spsr::brier);
        const auto aided = pas_aided_aggregate(ds, truth, BaseAggregator::mean, RankSelect{0.10, 10});
        const auto aided_eval = evaluate(aided, ds, Metric::brier);
        if (aided_eval.mean < bench_eval.mean) ++true_wins;
        const auto test = pairwise_test("true-mean", aided_eval, "mean", bench_eval);
        if (test.p < 0.05 && aided_eval.mean < bench_eval.mean) ++significant;

        PasConfig cfg;
        cfg.seed = 5100 + static_cast<std::uint64_t>(s);
        const auto ssr = compute_pas(ds, Mechanism::ssr, cfg);
        const auto ssr_aided = pas_aided_aggregate(ds, ssr, BaseAggregator::mean, RankSelect{0.10, 10});
        if (mean_brier(ssr_aided, ds) < bench_eval.mean) ++ssr_wins;
    }
    ctx.detail << "true-score wins " << true_wins << "/50 (need 48), ssr wins " << ssr_wins
               << "/50 (need 40), significant " << significant << "/50 (need 26)";
    return true_wins >= 48 && ssr_wins >= 40 && significant >= 26;
}

// ---------------------------------------------------------------------------
// 7. Sweep curve: oracle selection dips below half the crowd and reduces to
// the benchmark at fraction 1

bool crit_sweep_shape(CheckContext& ctx) {
    const std::vector<double> grid{0.05, 0.10, 0.15, 0.20, 0.30, 0.50, 0.75, 1.0};
    for (int s = 0; s < 5; ++s) {
        const auto ds = bathtub_noise_crowd(100, 200, 2700 + static_cast<std::uint64_t>(s));
        PasConfig cfg;
        const std::vector<Mechanism> none{};
        const std::vector<BaseAggregator> bases{BaseAggregator::mean};
        const auto sweep = sweep_top_k(ds, none, bases, grid, cfg, Metric::brier);
        const auto& curve = sweep.curves.at(0); // true-mean
        double bench = 0.0;
        for (const auto& [name, value] : sweep.baselines)
            if (name == "mean") bench = value;
        const auto min_it = std::min_element(curve.values.begin(), curve.values.end());
        const double min_fraction = grid[static_cast<std::size_t>(min_it - curve.values.begin())];
        if (!(min_fraction < 0.5)) {
            ctx.detail << "seed " << s << ": minimizing fraction " << min_fraction;
            return false;
        }
        if (!(std::abs(curve.values.back() - bench) <= 1e-12)) {
            ctx.detail << "seed " << s << ": fraction-1.0 point off benchmark by "
                       << std::abs(curve.values.back() - bench);
            return false;
        }
    }
    ctx.detail << "minimizing fraction < 0.5 and exact full-crowd reduction on 5 seeds";
    return true;
}

// ---------------------------------------------------------------------------
// 8. Two-coin variational inference at least matches majority vote

bool crit_vi_sanity(CheckContext& ctx) {
    const int seeds = 50;
    int vi_wins = 0;
    for (int s = 0; s < seeds; ++s) {
        std::mt19937_64 rng(6600 + static_cast<std::uint64_t>(s));
        std::gamma_distribution<double> g4(4.0, 1.0), g2(2.0, 1.0);
        ConditionalSignalModel cs;
        cs.prior_p1 = 0.5;
        cs.agents.resize(30);
        for (auto& row : cs.agents) {
            const double c0 = g4(rng) / 1.0;
            const double d0 = g2(rng);
            const double c1 = g4(rng);
            const double d1 = g2(rng);
            row = {1.0 - c0 / (c0 + d0), c1 / (c1 + d1)};
        }
        SyntheticSpec spec;
        spec.num_events = 200;
        spec.num_agents = 30;
        spec.seed = 7700 + static_cast<std::uint64_t>(s);
        spec.model = cs;
        const auto ds = generate_synthetic(spec);

        const auto out = vi_agg(ds);
        int vi_correct = 0, mv_correct = 0;
        for (int i = 0; i < ds.num_events(); ++i) {
            const int y = *ds.event(i).outcome;
            const auto recs = ds.records_on_event(i);
            double votes = 0.0;
            for (auto r : recs) votes += ds.record(static_cast<std::size_t>(r)).probs[0];
            mv_correct += (votes / static_cast<double>(recs.size()) >= 0.5 ? 1 : 0) == y;
            vi_correct += (out.binary_prob(i) >= 0.5 ? 1 : 0) == y;
        }
        if (vi_correct >= mv_correct) ++vi_wins;
    }

    // bitwise determinism of a rerun
    const auto ds = bathtub_noise_crowd(30, 100, 123);
    ViState s1, s2;
    const auto a = vi_agg(ds, {}, &s1);
    const auto b = vi_agg(ds, {}, &s2);
    bool identical = s1.iterations == s2.iterations;
    for (int i = 0; identical && i < ds.num_events(); ++i)
        identical = a.binary_prob(i) == b.binary_prob(i);

    ctx.detail << "vi >= majority in " << vi_wins << "/50 (need 45), rerun "
               << (identical ? "bit-identical" : "DIVERGED");
    return vi_wins >= 45 && identical;
}

// ---------------------------------------------------------------------------
// 9. Paired t-test against an independent reference implementation

struct TTestFixture {
    std::vector<double> diffs;
    double t;
    double p;
};

// Pre-tabulated by an independent reference statistical package.
static const TTestFixture kTTestFixtures[] = {
    {{-0.038696899538123164, 0.74036603838312121}, 0.90065783480503592, 0.53324411633540547},
    {{0.08956630614733771, -0.90049011330396878, -0.15353007115487111}, -1.0792177502480267, 0.3933446182227156},
    {{-0.85386115837962839, 2.93569097489158, -2.0173750467078992, -2.5027267419543477}, -0.49504261218228074, 0.65455781123538426},
    {{-1.4180958433797111, -2.10216267461603, -2.1657892830634093, -1.1667235745888989, -1.3256733562351037}, -7.87888645955542, 0.0014029218784045922},
    {{-2.3594012993958886, -2.0280411352514118, -1.7153862597825094, -3.141943957264524, 0.0092195617030101373, 2.8720175429843326, -0.49173076717422737, 0.72312863837448849}, -1.1078780589181367, 0.30452409681689624},
    {{0.029880562823942525, 1.0837698807545102, -0.79218090815958775, -0.15850330188541334, 0.12708786957527818, 1.8397862522698278, 0.47466366849492669, -1.1840255031137015, 1.3395881484945225, -1.7836279576228424}, 0.27039056318993615, 0.79295812561181522},
    {{0.57286277663295948, 0.40262884930678522, -0.93353636151911534, 3.5069685824371648, 0.0448935552734685, 0.45383983120724125, 0.68090061858099515, -1.9348423217622464, 0.25009378898343548, 2.3608786937951551, -4.4878065029953538, 2.8097528747040466}, 0.50163807742872191, 0.62581020759144967},
    {{-0.52440819767700853, -0.99808442102254691, -0.54824463992088002, 0.2074367842509951, -0.36451885467527245, -0.26130289597012718, -0.44674979994929093, 0.77088284654436245, -0.38249316881042322, -0.10614929655159894, -0.19608312235130632, -0.60450131224048198, -0.7916368955122175, -0.80343043585574514, -0.57356327881160052}, -3.3277978165851665, 0.0049791318030752308},
    {{0.8093811000910458, 0.89883415885519602, 0.67029108654533909, 0.57481821662349986, 0.2893196994642222, 1.3074954024528826, 0.15093463873614807, -0.15664407580399486, 0.13666844102207931, 0.28187742161730722, -0.60012117557056732, 0.37746984247286536, 0.50902815083162367, 1.0773724910889804, -0.17770624323086948, -0.0065783082029413076, 0.20876638395181443, 0.21813583871236852, -0.0392469769416674, -0.083241368300326024}, 3.0818929179145309, 0.0061377692487228777},
    {{-0.97917231906471447, -0.94529453039359379, 0.1979343046803157, -0.25926067937608599, 0.1122068065885341, -2.7057272629900719, -3.4867115667067239, -2.1793374904282699, -0.92116086467528335, 1.7870797411630599, -0.58635274698618334, 0.8027305101852511, -1.0204981137729681, 1.0785999988833712, 0.23929901059540037, 0.63262744706944307, 0.97687907108650118, 1.7426661154257592, 1.2182602112237959, 0.2188601190906696, -0.68150499185687585, -2.8601395109494137, 2.0844302844604066, -2.2590348951205654, -2.9043640344360169, -4.2239339137163476, -2.0709839739252764, 0.025585281864566878, -0.97818678849999652, -1.300454853202077}, -2.137281046347935, 0.041135783990471395},
    {{-0.16509697791529526, 0.62474432287008241, 1.5101027307079942, -0.061484308896341544, 0.088333416693550382, -0.15947047128019587}, 1.1378135421379414, 0.3067653056044935},
    {{-0.67574429332128805, -0.98214676406646118, -0.93800962079418793, -0.70236083902845758, -0.94742061519723575, -0.4987829683866376, -0.93312848286105043}, -11.566581018123136, 2.5120715149610209e-05},
    {{-1.1091943450843365, -0.45157658067902118, -0.1680873524530449, -0.89074620785589953, -0.41906484265471788, -1.2430235211564096, -0.0039954666737491706, -0.25187044304472128, -0.71051485112302482}, -4.0607706494671669, 0.0036295588871609712},
    {{-0.0005244141727367424, -0.084292814712118358, -0.1256668873012966, -0.095517236665844399, -0.024915875382195321, -0.18604559766398865, -0.25277484398043143, 0.15726309671953081, 0.036568132234914619, -0.092880401218975228, -0.080295831192049624}, -2.0508571689230677, 0.067411502648695332},
    {{-1.6758307610847356, 1.6117600176745899, 0.79357467556751315, -1.7934579963501627, 0.3555956541678344, 1.1130442454154423, 0.29446441747020846, 0.52006895343295834, -1.1076389080415425, 0.35172814849754108, 2.6673426036754426, -1.3969293780930196, -0.88255695902818809, -1.1120267638380863, 0.96775669078791215, -0.027240090592649313, 0.068982481395647638, -0.66550415338841473, 0.69876362737547293, -0.28559705605748709, 1.725470312506693, 1.5416596195384891, -0.20138457622807288, -0.71294911403424899, -1.0103814449702477}, 0.31772896401565626, 0.75343850177550986},
    {{0.69770858153591497, -0.32464108555313104, 0.65052519119605157, -0.54614481936696824, -0.2478530495354026, 2.1554118525783381, 0.30221551857305895, -1.3421267203196465, 1.0693562147167652, 0.60747131495547402, 0.83904780617797581, -0.03281615270567094, -2.4422874431005295, -0.84174238495933495, 1.9116811082485117, 1.1264227169133676, -0.8536839174112173, 0.92395550577383811, -0.041528727943371063, 0.86905899821567523, 2.8935323024671429, 3.3697726554336644, 1.1864433794492411, -2.1796894037871564, 0.077680608497420964, -0.20044629960135277, 0.82694167645889216, -2.4054338902080143, 0.28999555831170215, -1.8328858066852751, -1.5537689571518762, -0.53236004330448616, -2.7172881433325031, -1.5434848221763229, 1.0388650024881292, -0.11081559587916608, 0.92868135781602423, -0.9418002414544191, -1.0268636739689732, -1.1140611986229336}, -0.11968477512978312, 0.90534728627223138},
    {{1.4055085531064413, 0.76815620243778782, 1.2703898246218543, -0.47611211878061566, 0.58529883848451458, 1.199764548285829, 4.1296588355044008, 1.7428954227061202, 0.19233962122233805, -0.43283664670978861, 1.7738061549270416, -0.40282651775355061, 0.44266542906882778, -1.0777849344869868, -0.58474010219557027, 0.33892960528072552, 1.0156314930979247, 1.213976309152911, -0.6495937294091132, -1.1537496545677457, 0.8712279518788042, 1.7962744161209998, 1.4958085003164894, 0.96824214105808437, 3.112380021585162, 0.27315702275958598, -0.20533874116196027, 1.7575811887895481, 0.084414685103600839, 0.96624958392545512, 0.083952630823642682, 0.84271880532563537, 0.70280370707745021, -1.3316817640558309, 0.26233340235298358, 0.9266442000816093, 1.6190600819590726, 0.28491619945052837, 0.22920889352599333, 1.9371354938109493, 1.2736082273818721, 0.20491166657995707, 0.93248528600215608, 2.2098367290976069, 1.7580138700206709, 1.954245420448925, 2.1189050796391675, -0.86104857517279587, 2.2754196597280729, 1.3922319619777253}, 5.2718018516777301, 3.0266799955935987e-06},
    {{-0.69296711317960991, 1.5643775958466501, -0.49353985248205745, -0.35342697586345984, 0.38115624151755245, -0.7298816650457346, 1.9611294162600774, -0.24174674219668457, -0.74466375392621909, 0.34476676717987842, -0.46520181525552373, -1.4554598770770442, -0.020455475737681805}, -0.27630747296829911, 0.78701314015643775},
    {{-0.23340327790078896, 1.6823227664266873, -1.1634584468858635, -2.1372101683132687, -1.8990916822333161, -2.141528435275049, 1.8002040591689628, -1.1920651728406564, 2.513423415353131, -1.6999166828122683, -2.741809978996443, 0.46904910344092654, 0.29377419871821897, -1.3442087628265806, -0.7580236838877189, 0.50759540357900623, 2.6880924267830331}, -0.75902399535884368, 0.45887507537945316},
    {{-1.7619645380270565, 0.39970556377933075, -2.2078150285401583, -2.6096044206300428, 1.6042317422398926, -2.7303362963796816, -1.7562446005619314, -0.66521734063816484, 0.47371328433049686, -0.79111676352539351, -1.4665757943013549, -1.217993008889632, -0.73088761905965938, -1.2320803840541688, -2.0297475656370194, -0.12211581340226824, -0.34237152268405635, 0.11197634348664809, 1.468068032745149, -1.5448550024605412, -2.0669151465356981}, -3.394224349001802, 0.002879449700806789},
};

bool crit_ttest_oracle(CheckContext& ctx) {
    double worst_t = 0.0, worst_p = 0.0;
    for (const auto& fx : kTTestFixtures) {
        const std::vector<double> zeros(fx.diffs.size(), 0.0);
        const auto r = paired_t_test(fx.diffs, zeros);
        worst_t = std::max(worst_t, std::abs(r.t - fx.t));
        worst_p = std::max(worst_p, std::abs(r.p - fx.p));
    }
    ctx.detail << "20 fixtures, max |dt| " << worst_t << ", max |dp| " << worst_p;
    return worst_t < 1e-6 && worst_p < 1e-6;
}

// ---------------------------------------------------------------------------
// 10. Full selection reproduces the base aggregator on random datasets

bool crit_pipeline_reduction(CheckContext& ctx) {
    double worst_logit = 0.0;
    int datasets = 0;
    std::mt19937_64 rng2(909);
    while (datasets < 100) {
        const int ne = 5 + static_cast<int>(rng2() % 26);
        const int na = 3 + static_cast<int>(rng2() % 18);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        DatasetBuilder b;
        std::vector<int> spaces(static_cast<std::size_t>(ne));
        for (int i = 0; i < ne; ++i) {
            spaces[static_cast<std::size_t>(i)] = u01(rng2) < 0.2 ? 3 + static_cast<int>(rng2() % 2) : 2;
            b.add_event("e" + std::to_string(i), OutcomeSpace{spaces[static_cast<std::size_t>(i)]});
        }
        for (int j = 0; j < na; ++j) b.add_agent("a" + std::to_string(j));
        bool any = false;
        for (int i = 0; i < ne; ++i) {
            for (int j = 0; j < na; ++j) {
                if (u01(rng2) > 0.8) continue;
                const int C = spaces[static_cast<std::size_t>(i)];
                if (C == 2) {
                    b.add_record(i, j, {u01(rng2)});
                } else {
                    std::vector<double> probs(static_cast<std::size_t>(C));
                    double total = 0.0;
                    for (auto& p : probs) {
                        p = u01(rng2) + 1e-3;
                        total += p;
                    }
                    for (auto& p : probs) p /= total;
                    b.add_record(i, j, probs);
                }
                any = true;
            }
        }
        if (!any) continue;
        const auto ds = b.build();
        ++datasets;

        PasScores pas;
        pas.mechanism = Mechanism::ca;
        pas.agent_ids = ds.agent_ids();
        for (int j = 0; j < na; ++j) {
            pas.scores.push_back(u01(rng2) < 0.85 ? std::optional<double>(u01(rng2)) : std::nullopt);
            pas.eligible.push_back(1);
        }

        const RankSelect full{1.0, na};
        const auto base_mean = aggregate_all(ds, BaseAggregator::mean);
        const auto aided_mean = pas_aided_aggregate(ds, pas, BaseAggregator::mean, full);
        const auto base_logit = aggregate_all(ds, BaseAggregator::logit);
        const auto aided_logit = pas_aided_aggregate(ds, pas, BaseAggregator::logit, full);
        for (int i = 0; i < ds.num_events(); ++i) {
            const auto& bm = base_mean.predictions[static_cast<std::size_t>(i)];
            if (!bm) continue;
            const auto& am = aided_mean.predictions[static_cast<std::size_t>(i)];
            for (std::size_t c = 0; c < bm->size(); ++c)
                if ((*am)[c] != (*bm)[c]) {
                    ctx.detail << "mean reduction differs on dataset " << datasets;
                    return false;
                }
            const auto& bl = base_logit.predictions[static_cast<std::size_t>(i)];
            const auto& al = aided_logit.predictions[static_cast<std::size_t>(i)];
            for (std::size_t c = 0; c < bl->size(); ++c)
                worst_logit = std::max(worst_logit, std::abs((*al)[c] - (*bl)[c]));
        }
    }
    ctx.detail << "100 datasets, mean bitwise, logit max deviation " << worst_logit;
    return worst_logit <= 1e-12;
}

struct Criterion {
    const char* name;
    bool (*fn)(CheckContext&);
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {"1. SSR unbiasedness (de-bias identity, 1e-12)", crit_ssr_unbiasedness},
        {"2. SSR error-rate recovery (1e-9 analytic, +-0.02 sampled)", crit_ssr_recovery},
        {"3. DMI/CA/PTS rank correlation vs oracles (Spearman >= 0.9)", crit_theorem1_rankings},
        {"4. AUC / rank-sum identity (exact, 500 instances)", crit_auc_identity},
        {"5. Weighted-mean swap property (analytic, 1000 instances)", crit_theorem3_swap},
        {"6. Top-10% selection beats the crowd (true >= 48/50, ssr >= 40/50)", crit_selection_beats_crowd},
        {"7. Sweep optimum below 0.5, exact reduction at 1.0", crit_sweep_shape},
        {"8. VI >= majority vote (>= 45/50 seeds, bitwise rerun)", crit_vi_sanity},
        {"9. Paired t-test matches reference fixtures (1e-6)", crit_ttest_oracle},
        {"10. RankSelect(1.0) reduces to base aggregators (bitwise / 1e-12)", crit_pipeline_reduction},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        CheckContext ctx;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        std::string error;
        try {
            ok = c.fn(ctx);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %s: %s (%.2fs)\n", ok ? "PASS" : "FAIL", c.name,
                    error.empty() ? ctx.detail.str().c_str() : error.c_str(), secs);
        if (!ok) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures;
}
