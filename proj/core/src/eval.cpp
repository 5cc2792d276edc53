#include "peereval/eval.hpp"

#include <algorithm>
#include <cmath>

#include "peereval/stats.hpp"

namespace peereval {

const char* metric_name(Metric m) {
    switch (m) {
        case Metric::brier: return "brier";
        case Metric::log: return "log";
        case Metric::auc: return "auc";
    }
    return "?";
}

std::optional<Metric> metric_from_name(const std::string& name) {
    if (name == "brier") return Metric::brier;
    if (name == "log") return Metric::log;
    if (name == "auc") return Metric::auc;
    return std::nullopt;
}

Orientation metric_orientation(Metric m) {
    return m == Metric::auc ? Orientation::reward : Orientation::loss;
}

EvalEntry evaluate(const AggregateOutput& output, const ForecastDataset& ds, Metric metric) {
    EvalEntry entry;
    entry.metric = metric;

    if (metric == Metric::auc) {
        std::vector<double> preds;
        std::vector<int> ys;
        for (int i = 0; i < ds.num_events(); ++i) {
            const auto& pred = output.predictions[static_cast<std::size_t>(i)];
            if (!pred || !ds.event(i).space.is_binary()) continue;
            if (!ds.event(i).outcome)
                throw data_error("unresolved event '" + ds.event(i).id + "' in evaluation");
            preds.push_back((*pred)[1]);
            ys.push_back(*ds.event(i).outcome);
        }
        entry.mean = auc_roc(preds, ys);
        entry.n_events = static_cast<int>(preds.size());
        return entry;
    }

    double total = 0.0;
    for (int i = 0; i < ds.num_events(); ++i) {
        const auto& pred = output.predictions[static_cast<std::size_t>(i)];
        if (!pred) continue;
        const auto& ev = ds.event(i);
        if (!ev.outcome) throw data_error("unresolved event '" + ev.id + "' in evaluation");
        const double s = metric == Metric::brier ? brier(*pred, *ev.outcome)
                                                 : log_score(*pred, *ev.outcome);
        entry.per_event.emplace_back(i, s);
        total += s;
    }
    if (entry.per_event.empty()) throw data_error("no evaluable events in aggregator output");
    entry.n_events = static_cast<int>(entry.per_event.size());
    entry.mean = total / entry.n_events;
    return entry;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw usage_error("paired t-test needs aligned score vectors");
    const int n = static_cast<int>(a.size());
    if (n < 2) throw data_error("paired t-test needs at least 2 paired scores");

    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    mean /= n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)] - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1));

    TTestResult result;
    result.n = n;
    if (sd == 0.0) {
        result.degenerate = true;
        result.t = 0.0;
        result.p = 1.0;
        return result;
    }
    result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    result.p = student_t_two_sided_p(result.t, static_cast<double>(n - 1));
    return result;
}

PairwiseTest pairwise_test(const std::string& name_a, const EvalEntry& a,
                           const std::string& name_b, const EvalEntry& b) {
    // Align on common events.
    std::vector<double> sa, sb;
    std::size_t ia = 0, ib = 0;
    while (ia < a.per_event.size() && ib < b.per_event.size()) {
        if (a.per_event[ia].first < b.per_event[ib].first) {
            ++ia;
        } else if (b.per_event[ib].first < a.per_event[ia].first) {
            ++ib;
        } else {
            sa.push_back(a.per_event[ia].second);
            sb.push_back(b.per_event[ib].second);
            ++ia;
            ++ib;
        }
    }
    const auto t = paired_t_test(sa, sb);
    return {name_a, name_b, t.t, t.p, t.n, t.degenerate};
}

// ---------------------------------------------------------------------------
// Sweep

SweepResult sweep_top_k(const ForecastDataset& ds, std::span<const Mechanism> mechanisms,
                        std::span<const BaseAggregator> bases, std::span<const double> grid,
                        const PasConfig& cfg, Metric metric, bool include_true_curve) {
    SweepResult result;
    result.metric = metric;
    result.grid.assign(grid.begin(), grid.end());

    for (const char* bench : {"mean", "logit", "vi"}) {
        AggregateOutput out;
        if (bench == std::string("mean")) out = aggregate_all(ds, BaseAggregator::mean);
        else if (bench == std::string("logit")) out = aggregate_all(ds, BaseAggregator::logit);
        else {
            ViOptions opts;
            opts.seed = cfg.seed;
            out = vi_agg(ds, opts);
        }
        for (const auto& w : out.warnings) result.warnings.push_back(w);
        result.baselines.emplace_back(bench, evaluate(out, ds, metric).mean);
    }

    std::vector<std::pair<std::string, PasScores>> scored;
    for (Mechanism m : mechanisms)
        scored.emplace_back(mechanism_name(m), compute_pas(ds, m, cfg));
    if (include_true_curve) scored.emplace_back("true", true_score_pas(ds, cfg.spsr));

    for (const auto& [name, pas] : scored) {
        for (const auto& w : pas.warnings) result.warnings.push_back(w);
        for (BaseAggregator base : bases) {
            SweepCurve curve;
            curve.mechanism = name;
            curve.base = base_aggregator_name(base);
            for (double f : grid) {
                // floor 1 rather than 10 so small crowds sweep below 10 agents
                const auto out = pas_aided_aggregate(ds, pas, base, RankSelect{f, 1});
                curve.values.push_back(evaluate(out, ds, metric).mean);
            }
            result.curves.push_back(std::move(curve));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Overlap

OverlapResult overlap_analysis(std::span<const PasScores> pas_list,
                               std::span<const double> levels,
                               const ForecastDataset* ds_for_truth) {
    if (pas_list.empty()) throw usage_error("overlap analysis needs at least one score set");
    const auto& ids = pas_list[0].agent_ids;
    for (const auto& pas : pas_list)
        if (pas.agent_ids != ids) throw data_error("mismatched agent sets in overlap analysis");
    const int n = static_cast<int>(ids.size());

    std::vector<std::vector<int>> rankings;
    rankings.reserve(pas_list.size());
    for (const auto& pas : pas_list) rankings.push_back(pas.ranked_all());

    std::optional<PasScores> truth;
    if (ds_for_truth) truth = true_score_pas(*ds_for_truth, Spsr::brier);

    OverlapResult result;
    result.levels.assign(levels.begin(), levels.end());
    for (std::size_t m = 0; m < pas_list.size(); ++m)
        result.top_group_mean_true_brier.emplace_back(mechanism_name(pas_list[m].mechanism),
                                                      std::vector<double>{});

    for (double f : levels) {
        if (!(f > 0.0 && f <= 1.0)) throw usage_error("overlap levels must be in (0, 1]");
        const int k = std::min(n, std::max(1, static_cast<int>(std::floor(f * n + 0.5))));
        std::vector<int> in_all(static_cast<std::size_t>(n), 0);
        for (std::size_t m = 0; m < rankings.size(); ++m) {
            for (int r = 0; r < k; ++r) ++in_all[static_cast<std::size_t>(rankings[m][static_cast<std::size_t>(r)])];
            if (truth) {
                double loss = 0.0;
                int counted = 0;
                for (int r = 0; r < k; ++r) {
                    const auto& s = truth->scores[static_cast<std::size_t>(rankings[m][static_cast<std::size_t>(r)])];
                    if (s) {
                        loss += -*s;
                        ++counted;
                    }
                }
                result.top_group_mean_true_brier[m].second.push_back(counted ? loss / counted : 0.0);
            }
        }
        int common = 0;
        for (int c : in_all)
            if (c == static_cast<int>(rankings.size())) ++common;
        result.overlap.push_back(static_cast<double>(common) / k);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Comparison tables

ComparisonReport comparison_table(std::span<const ForecastDataset> datasets,
                                  std::span<const Mechanism> mechanisms,
                                  std::span<const BaseAggregator> bases,
                                  std::span<const std::string> benchmarks, Metric metric,
                                  const PasConfig& cfg) {
    if (datasets.empty()) throw usage_error("comparison needs at least one dataset");
    ComparisonReport report;
    report.metric = metric;

    std::vector<WinLossCell> tallies;
    const bool significance = metric != Metric::auc;
    if (!significance)
        report.warnings.push_back("auc has no per-event decomposition; tallies skipped");

    for (const auto& ds : datasets) {
        EvalReport er;
        er.metric = metric;

        std::vector<std::pair<std::string, EvalEntry>> bench_entries;
        for (const auto& bench : benchmarks) {
            AggregateOutput out;
            if (bench == "mean") out = aggregate_all(ds, BaseAggregator::mean);
            else if (bench == "logit") out = aggregate_all(ds, BaseAggregator::logit);
            else if (bench == "vi") {
                ViOptions opts;
                opts.seed = cfg.seed;
                out = vi_agg(ds, opts);
            } else if (bench == "mp") out = mp_aggregate(ds);
            else if (bench == "sp") out = sp_aggregate(ds);
            else throw usage_error("unknown benchmark '" + bench + "'");
            for (const auto& w : out.warnings) er.warnings.push_back(w);
            bench_entries.emplace_back(bench, evaluate(out, ds, metric));
        }

        std::vector<std::pair<std::string, EvalEntry>> pas_entries;
        for (Mechanism m : mechanisms) {
            const auto pas = compute_pas(ds, m, cfg);
            for (const auto& w : pas.warnings) er.warnings.push_back(w);
            for (BaseAggregator base : bases) {
                const auto out = pas_aided_aggregate(ds, pas, base, RankSelect{});
                pas_entries.emplace_back(out.aggregator, evaluate(out, ds, metric));
            }
        }

        for (const auto& [name, entry] : pas_entries) {
            for (const auto& [bname, bentry] : bench_entries) {
                if (!significance) continue;
                const auto test = pairwise_test(name, entry, bname, bentry);
                er.pairwise.push_back(test);

                WinLossCell* cell = nullptr;
                for (auto& c : tallies)
                    if (c.pas_aggregator == name && c.benchmark == bname) cell = &c;
                if (!cell) {
                    tallies.push_back({name, bname, 0, 0});
                    cell = &tallies.back();
                }
                if (test.p < 0.05 && !test.degenerate) {
                    // loss metrics: smaller mean wins
                    if (entry.mean < bentry.mean) ++cell->wins;
                    else if (bentry.mean < entry.mean) ++cell->losses;
                }
            }
        }
        for (auto& e : bench_entries) er.per_aggregator.push_back(std::move(e));
        for (auto& e : pas_entries) er.per_aggregator.push_back(std::move(e));
        report.per_dataset.push_back(std::move(er));
    }
    report.tallies = std::move(tallies);
    return report;
}

} // namespace peereval
