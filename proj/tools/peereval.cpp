// Command-line front end: reproducible peer-assessment scoring, aggregation
// and evaluation runs driven by a JSON config plus flag overrides.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric degeneracy.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "peereval/aggregate.hpp"
#include "peereval/csv.hpp"
#include "peereval/dataset.hpp"
#include "peereval/error.hpp"
#include "peereval/eval.hpp"
#include "peereval/mechanisms.hpp"
#include "peereval/serialize.hpp"
#include "peereval/synthetic.hpp"

namespace {

using json = nlohmann::json;
using namespace peereval;

struct Flags {
    std::string config_path;
    std::vector<std::string> inputs;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string metric;
    std::vector<std::string> mechanisms;
    std::string base;
    std::optional<double> fraction;
    std::optional<int> floor_count;
    std::vector<std::string> benchmarks;
    std::vector<std::string> agg_files;
    bool no_filter = false;
};

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw data_error("config file not found: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::exception& e) {
        throw usage_error("invalid config JSON: " + std::string(e.what()));
    }
}

// Flags override config fields; the merged document is canonical for the
// provenance digest.
json effective_config(const Flags& f) {
    json cfg = load_config_file(f.config_path);
    if (!cfg.is_object()) throw usage_error("config root must be a JSON object");
    if (!f.inputs.empty()) {
        if (f.inputs.size() == 1) cfg["input"] = f.inputs[0];
        else cfg["input"] = f.inputs;
        cfg.erase("synth");
    }
    if (f.seed) cfg["seed"] = *f.seed;
    if (!f.out_dir.empty()) cfg["out"] = f.out_dir;
    if (!f.metric.empty()) cfg["metric"] = f.metric;
    if (!f.mechanisms.empty()) cfg["pas"]["mechanisms"] = f.mechanisms;
    if (!f.base.empty()) cfg["aggregate"]["base"] = f.base;
    if (f.fraction) cfg["aggregate"]["scheme"]["fraction"] = *f.fraction;
    if (f.floor_count) cfg["aggregate"]["scheme"]["floor"] = *f.floor_count;
    if (!f.benchmarks.empty()) cfg["aggregate"]["benchmarks"] = f.benchmarks;
    if (f.no_filter) cfg.erase("filter");
    return cfg;
}

std::string out_dir(const json& cfg) { return cfg.value("out", std::string("out")); }

// The output directory does not influence any computed value, so it stays
// out of the provenance digest: the same config and seed give byte-identical
// artifacts wherever they are written.
std::string digest_of(json cfg) {
    cfg.erase("out");
    return config_digest(cfg.dump());
}

bool seed_given(const json& cfg) { return cfg.contains("seed"); }

std::uint64_t seed_of(const json& cfg) { return cfg.value("seed", std::uint64_t{0}); }

std::vector<std::string> input_paths(const json& cfg) {
    if (!cfg.contains("input")) return {};
    if (cfg.at("input").is_string()) return {cfg.at("input").get<std::string>()};
    return cfg.at("input").get<std::vector<std::string>>();
}

ForecastDataset apply_filter(const json& cfg, ForecastDataset ds) {
    if (!cfg.contains("filter")) return ds;
    const auto& fl = cfg.at("filter");
    auto result = filter_dataset(ds, fl.value("min_answers", 10), fl.value("min_questions", 15));
    if (!result.removed_events.empty() || !result.removed_agents.empty())
        std::cerr << "filter: removed " << result.removed_events.size() << " events, "
                  << result.removed_agents.size() << " agents (" << result.rounds << " rounds)\n";
    return std::move(result.dataset);
}

ForecastDataset load_one_input(const json& cfg, const std::string& path) {
    return apply_filter(cfg, load_csv(path));
}

// Exactly one input source: a dataset path or an inline synthetic spec.
ForecastDataset load_input(const json& cfg) {
    const auto paths = input_paths(cfg);
    const bool has_synth = cfg.contains("synth");
    if (paths.empty() && !has_synth)
        throw usage_error("no input: give --input PATH or a config with \"input\" or \"synth\"");
    if (!paths.empty() && has_synth)
        throw usage_error("config must name exactly one input source (input or synth)");
    if (has_synth) {
        json synth = cfg.at("synth");
        if (!synth.contains("seed") && cfg.contains("seed")) synth["seed"] = cfg.at("seed");
        return apply_filter(cfg, generate_synthetic(synthetic_spec_from_json(synth.dump())));
    }
    if (paths.size() != 1) throw usage_error("this command takes a single input dataset");
    return load_one_input(cfg, paths[0]);
}

PasConfig pas_config_of(const json& cfg) {
    PasConfig pc;
    pc.seed = seed_of(cfg);
    if (!cfg.contains("pas")) return pc;
    const auto& p = cfg.at("pas");
    const std::string binarize = p.value("binarize", std::string("analytic"));
    if (binarize == "analytic") pc.binarize = BinarizeMode::analytic;
    else if (binarize == "sampled") pc.binarize = BinarizeMode::sampled;
    else throw usage_error("pas.binarize must be analytic or sampled");
    if (p.contains("peer_policy")) {
        const auto& pol = p.at("peer_policy");
        if (pol.is_string() && pol.get<std::string>() == "all") {
            pc.peer_policy.kind = PeerPolicy::Kind::all_eligible;
        } else if (pol.is_object() && pol.contains("k_random")) {
            pc.peer_policy.kind = PeerPolicy::Kind::k_random;
            pc.peer_policy.count = pol.at("k_random").get<int>();
        } else {
            throw usage_error("pas.peer_policy must be \"all\" or {\"k_random\": N}");
        }
    }
    pc.min_overlap = p.value("min_overlap", 2);
    const std::string split = p.value("dmi_split", std::string("even_odd"));
    if (split == "even_odd") pc.dmi_split = DmiSplit::even_odd;
    else if (split == "random") pc.dmi_split = DmiSplit::seeded_random;
    else throw usage_error("pas.dmi_split must be even_odd or random");
    const std::string spsr = p.value("spsr", std::string("brier"));
    if (spsr == "brier") pc.spsr = Spsr::brier;
    else if (spsr == "log") pc.spsr = Spsr::log;
    else if (spsr == "normalized_rank_sum") pc.spsr = Spsr::normalized_rank_sum;
    else throw usage_error("pas.spsr must be brier, log or normalized_rank_sum");
    const std::string proxy = p.value("psr_proxy", std::string("vi"));
    if (proxy == "vi") pc.psr_proxy = PsrProxy::vi;
    else if (proxy == "logit") pc.psr_proxy = PsrProxy::logit;
    else throw usage_error("pas.psr_proxy must be vi or logit");
    return pc;
}

std::vector<Mechanism> mechanisms_of(const json& cfg, bool default_all) {
    std::vector<std::string> names;
    if (cfg.contains("pas")) {
        const auto& p = cfg.at("pas");
        if (p.contains("mechanisms")) names = p.at("mechanisms").get<std::vector<std::string>>();
        else if (p.contains("mechanism")) names = {p.at("mechanism").get<std::string>()};
    }
    if (names.empty() && default_all) names = {"dmi", "ca", "pts", "ssr", "psr"};
    std::vector<Mechanism> out;
    for (const auto& n : names) {
        const auto m = mechanism_from_name(n);
        if (!m) throw usage_error("unknown mechanism '" + n + "'");
        out.push_back(*m);
    }
    return out;
}

std::vector<BaseAggregator> bases_of(const json& cfg) {
    std::vector<std::string> names;
    if (cfg.contains("aggregate")) {
        const auto& a = cfg.at("aggregate");
        if (a.contains("bases")) names = a.at("bases").get<std::vector<std::string>>();
        else if (a.contains("base")) names = {a.at("base").get<std::string>()};
    }
    if (names.empty()) names = {"mean"};
    std::vector<BaseAggregator> out;
    for (const auto& n : names) {
        if (n == "mean") out.push_back(BaseAggregator::mean);
        else if (n == "logit") out.push_back(BaseAggregator::logit);
        else throw usage_error("base aggregator must be mean or logit");
    }
    return out;
}

WeightScheme scheme_of(const json& cfg) {
    if (cfg.contains("aggregate") && cfg.at("aggregate").contains("scheme")) {
        const auto& s = cfg.at("aggregate").at("scheme");
        if (s.contains("softmax")) {
            const auto& sm = s.at("softmax");
            return SoftmaxWeights{sm.value("shift", 0.0), sm.value("scale", 1.0)};
        }
        return RankSelect{s.value("fraction", 0.10), s.value("floor", 10)};
    }
    return RankSelect{};
}

Metric metric_of(const json& cfg) {
    const std::string name = cfg.value("metric", std::string("brier"));
    const auto m = metric_from_name(name);
    if (!m) throw usage_error("metric must be brier, log or auc");
    return *m;
}

// The sampled code paths must be seeded explicitly for the run to be
// reproducible by construction.
void require_seed_for_sampling(const json& cfg, const std::vector<Mechanism>& mechanisms) {
    if (seed_given(cfg)) return;
    const PasConfig pc = pas_config_of(cfg);
    std::string reason;
    if (pc.binarize == BinarizeMode::sampled) reason = "sampled binarization";
    if (pc.dmi_split == DmiSplit::seeded_random) reason = "random DMI split";
    if (pc.peer_policy.kind == PeerPolicy::Kind::k_random) reason = "random peer selection";
    for (Mechanism m : mechanisms)
        if (m == Mechanism::ssr) reason = "SSR signal draws";
    if (!reason.empty())
        throw usage_error("--seed is required when " + reason + " is enabled");
}

void report_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

AggregateOutput benchmark_output(const ForecastDataset& ds, const std::string& name,
                                 std::uint64_t seed) {
    if (name == "mean") return aggregate_all(ds, BaseAggregator::mean);
    if (name == "logit") return aggregate_all(ds, BaseAggregator::logit);
    if (name == "vi") {
        ViOptions opts;
        opts.seed = seed;
        return vi_agg(ds, opts);
    }
    if (name == "mp") return mp_aggregate(ds);
    if (name == "sp") return sp_aggregate(ds);
    throw usage_error("unknown benchmark '" + name + "'");
}

void write_file(const std::string& path, const std::string& content) {
    write_atomic(path, content);
    std::cout << "wrote " << path << "\n";
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_synth(const json& cfg) {
    if (!cfg.contains("synth")) throw usage_error("synth requires a config with a \"synth\" spec");
    json synth = cfg.at("synth");
    if (!synth.contains("seed") && cfg.contains("seed")) synth["seed"] = cfg.at("seed");
    const auto ds = generate_synthetic(synthetic_spec_from_json(synth.dump()));
    const auto dir = out_dir(cfg);
    std::filesystem::create_directories(dir);
    save_csv(ds, dir + "/synthetic.csv", "config_digest=" + digest_of(cfg));
    std::cout << "wrote " << dir << "/synthetic.csv (" << ds.num_events() << " events, "
              << ds.num_agents() << " agents, " << ds.num_records() << " records)\n";
    return 0;
}

int cmd_pas(const json& cfg) {
    const auto mechanisms = mechanisms_of(cfg, /*default_all=*/false);
    if (mechanisms.empty()) throw usage_error("pas requires --mechanism or pas.mechanism(s)");
    require_seed_for_sampling(cfg, mechanisms);
    const auto ds = load_input(cfg);
    const auto pc = pas_config_of(cfg);
    const auto digest = digest_of(cfg);
    const auto dir = out_dir(cfg);
    for (Mechanism m : mechanisms) {
        const auto pas = compute_pas(ds, m, pc);
        report_warnings(pas.warnings);
        write_file(dir + "/pas_" + mechanism_name(m) + ".csv", pas_scores_csv(pas, digest));
        write_file(dir + "/pas_" + mechanism_name(m) + ".json", pas_scores_json(pas, digest));
    }
    return 0;
}

int cmd_aggregate(const json& cfg) {
    const auto mechanisms = mechanisms_of(cfg, /*default_all=*/false);
    require_seed_for_sampling(cfg, mechanisms);
    const auto ds = load_input(cfg);
    const auto pc = pas_config_of(cfg);
    const auto scheme = scheme_of(cfg);
    const auto digest = digest_of(cfg);
    const auto dir = out_dir(cfg);

    std::vector<std::string> benchmarks;
    if (cfg.contains("aggregate") && cfg.at("aggregate").contains("benchmarks"))
        benchmarks = cfg.at("aggregate").at("benchmarks").get<std::vector<std::string>>();
    if (mechanisms.empty() && benchmarks.empty())
        throw usage_error("aggregate requires a pas mechanism and/or benchmarks");

    for (const auto& name : benchmarks) {
        auto out = benchmark_output(ds, name, seed_of(cfg));
        out.config_digest = digest;
        report_warnings(out.warnings);
        write_file(dir + "/aggregate_" + name + ".csv", aggregate_csv(out, ds));
        write_file(dir + "/aggregate_" + name + ".json", aggregate_json(out, ds));
    }
    for (Mechanism m : mechanisms) {
        const auto pas = compute_pas(ds, m, pc);
        report_warnings(pas.warnings);
        for (BaseAggregator base : bases_of(cfg)) {
            auto out = pas_aided_aggregate(ds, pas, base, scheme);
            out.config_digest = digest;
            write_file(dir + "/aggregate_" + out.aggregator + ".csv", aggregate_csv(out, ds));
            write_file(dir + "/aggregate_" + out.aggregator + ".json", aggregate_json(out, ds));
        }
    }
    return 0;
}

int cmd_evaluate(const json& cfg, const std::vector<std::string>& agg_files) {
    const auto ds = load_input(cfg);
    const auto metric = metric_of(cfg);
    const auto digest = digest_of(cfg);
    const auto dir = out_dir(cfg);

    EvalReport report;
    report.metric = metric;
    if (!agg_files.empty()) {
        for (const auto& path : agg_files) {
            std::ifstream in(path);
            if (!in) throw data_error("aggregate file not found: " + path);
            std::stringstream buf;
            buf << in.rdbuf();
            const auto out = aggregate_from_json(buf.str(), ds);
            report.per_aggregator.emplace_back(out.aggregator, evaluate(out, ds, metric));
        }
    } else {
        const auto mechanisms = mechanisms_of(cfg, /*default_all=*/false);
        require_seed_for_sampling(cfg, mechanisms);
        const auto pc = pas_config_of(cfg);
        std::vector<std::string> benchmarks = {"mean", "logit"};
        if (cfg.contains("aggregate") && cfg.at("aggregate").contains("benchmarks"))
            benchmarks = cfg.at("aggregate").at("benchmarks").get<std::vector<std::string>>();
        for (const auto& name : benchmarks) {
            const auto out = benchmark_output(ds, name, seed_of(cfg));
            report.warnings.insert(report.warnings.end(), out.warnings.begin(), out.warnings.end());
            report.per_aggregator.emplace_back(name, evaluate(out, ds, metric));
        }
        for (Mechanism m : mechanisms) {
            const auto pas = compute_pas(ds, m, pc);
            for (BaseAggregator base : bases_of(cfg)) {
                const auto out = pas_aided_aggregate(ds, pas, base, scheme_of(cfg));
                report.per_aggregator.emplace_back(out.aggregator, evaluate(out, ds, metric));
            }
        }
    }
    if (metric != Metric::auc) {
        for (std::size_t a = 0; a < report.per_aggregator.size(); ++a)
            for (std::size_t b = a + 1; b < report.per_aggregator.size(); ++b)
                report.pairwise.push_back(pairwise_test(
                    report.per_aggregator[a].first, report.per_aggregator[a].second,
                    report.per_aggregator[b].first, report.per_aggregator[b].second));
    }
    report_warnings(report.warnings);
    write_file(dir + "/eval_report.csv", eval_report_csv(report, ds, digest));
    write_file(dir + "/eval_report.json", eval_report_json(report, ds, digest));
    return 0;
}

int cmd_sweep(const json& cfg) {
    const auto mechanisms = mechanisms_of(cfg, /*default_all=*/true);
    require_seed_for_sampling(cfg, mechanisms);
    const auto ds = load_input(cfg);
    const auto pc = pas_config_of(cfg);
    const auto metric = metric_of(cfg);
    const auto digest = digest_of(cfg);
    const auto dir = out_dir(cfg);

    std::vector<double> grid = {0.05, 0.10, 0.15, 0.20, 0.30, 0.50, 0.75, 1.0};
    if (cfg.contains("sweep") && cfg.at("sweep").contains("grid"))
        grid = cfg.at("sweep").at("grid").get<std::vector<double>>();
    auto bases = bases_of(cfg);
    if (!cfg.contains("aggregate"))
        bases = {BaseAggregator::mean, BaseAggregator::logit};

    const auto sweep = sweep_top_k(ds, mechanisms, bases, grid, pc, metric);
    report_warnings(sweep.warnings);
    write_file(dir + "/sweep.csv", sweep_csv(sweep, digest));
    write_file(dir + "/sweep.json", sweep_json(sweep, digest));
    for (const auto& curve : sweep.curves)
        write_file(dir + "/sweep_" + curve.mechanism + "_" + curve.base + ".dat",
                   sweep_plot_data(sweep, curve, digest));
    return 0;
}

int cmd_compare(const json& cfg) {
    const auto paths = input_paths(cfg);
    if (paths.empty()) throw usage_error("compare requires one or more --input datasets");
    const auto mechanisms = mechanisms_of(cfg, /*default_all=*/true);
    require_seed_for_sampling(cfg, mechanisms);

    std::vector<ForecastDataset> datasets;
    datasets.reserve(paths.size());
    for (const auto& p : paths) datasets.push_back(load_one_input(cfg, p));

    std::vector<std::string> benchmarks = {"mean", "logit", "vi"};
    if (cfg.contains("aggregate") && cfg.at("aggregate").contains("benchmarks"))
        benchmarks = cfg.at("aggregate").at("benchmarks").get<std::vector<std::string>>();
    auto bases = bases_of(cfg);
    if (!cfg.contains("aggregate") || !cfg.at("aggregate").contains("base"))
        bases = {BaseAggregator::mean, BaseAggregator::logit};

    const auto report = comparison_table(datasets, mechanisms, bases, benchmarks, metric_of(cfg),
                                         pas_config_of(cfg));
    report_warnings(report.warnings);
    const auto digest = digest_of(cfg);
    const auto dir = out_dir(cfg);
    write_file(dir + "/comparison.csv", comparison_csv(report, digest));
    write_file(dir + "/comparison.json", comparison_json(report, digest));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"peer-assessment scoring and forecast aggregation toolkit"};
    app.require_subcommand(1);

    Flags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "JSON config file");
        sub->add_option("--input", flags.inputs, "input dataset CSV (repeatable for compare)");
        sub->add_option("--out", flags.out_dir, "output directory (default: out)");
        sub->add_option("--seed", flags.seed, "64-bit seed for all sampled modes");
        sub->add_option("--metric", flags.metric, "brier | log | auc");
        sub->add_option("--mechanism", flags.mechanisms, "dmi | ca | pts | ssr | psr | true");
        sub->add_option("--base", flags.base, "mean | logit");
        sub->add_option("--fraction", flags.fraction, "rank-select fraction");
        sub->add_option("--floor", flags.floor_count, "rank-select floor");
        sub->add_option("--benchmark", flags.benchmarks, "mean | logit | vi | mp | sp (repeatable)");
        sub->add_flag("--no-filter", flags.no_filter, "skip threshold filtering");
    };

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
    auto* pas = app.add_subcommand("pas", "compute peer assessment scores");
    auto* aggregate = app.add_subcommand("aggregate", "run (PAS-aided) aggregators");
    auto* evaluate = app.add_subcommand("evaluate", "score aggregates against outcomes");
    auto* sweep = app.add_subcommand("sweep", "top-k selection sweep with baselines");
    auto* compare = app.add_subcommand("compare", "cross-dataset comparison tables");
    for (auto* sub : {synth, pas, aggregate, evaluate, sweep, compare}) add_common(sub);
    evaluate->add_option("--agg", flags.agg_files, "aggregate JSON file to score (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const json cfg = effective_config(flags);
        if (synth->parsed()) return cmd_synth(cfg);
        if (pas->parsed()) return cmd_pas(cfg);
        if (aggregate->parsed()) return cmd_aggregate(cfg);
        if (evaluate->parsed()) return cmd_evaluate(cfg, flags.agg_files);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (compare->parsed()) return cmd_compare(cfg);
        throw usage_error("no subcommand");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::usage: return 1;
            case ErrorKind::data: return 2;
            case ErrorKind::numeric: return 3;
        }
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: invalid config: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
