#include "peereval/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "peereval/rng.hpp"

namespace peereval {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json warnings_json(const std::vector<std::string>& warnings) {
    return json(warnings);
}

} // namespace

std::string config_digest(const std::string& canonical_config) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_config)));
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot open output file: " + tmp.string());
        out << content;
        if (!out) throw data_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
}

// ---------------------------------------------------------------------------
// PasScores

std::string pas_scores_csv(const PasScores& pas, const std::string& digest) {
    std::string out = "# config_digest=" + digest + "\n";
    out += "agent_id,mechanism,score,eligible_peers\n";
    for (std::size_t j = 0; j < pas.agent_ids.size(); ++j) {
        out += pas.agent_ids[j];
        out += ',';
        out += mechanism_name(pas.mechanism);
        out += ',';
        if (pas.scores[j]) out += fmt(*pas.scores[j]);
        out += ',';
        out += std::to_string(pas.eligible[j]);
        out += '\n';
    }
    return out;
}

std::string pas_scores_json(const PasScores& pas, const std::string& digest) {
    json scores = json::array();
    for (std::size_t j = 0; j < pas.agent_ids.size(); ++j) {
        json row;
        row["agent_id"] = pas.agent_ids[j];
        if (pas.scores[j]) row["score"] = *pas.scores[j];
        else row["score"] = nullptr;
        row["eligible_peers"] = pas.eligible[j];
        scores.push_back(std::move(row));
    }
    json doc;
    doc["mechanism"] = mechanism_name(pas.mechanism);
    doc["config_digest"] = digest;
    doc["scores"] = std::move(scores);
    doc["warnings"] = warnings_json(pas.warnings);
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// AggregateOutput

std::string aggregate_csv(const AggregateOutput& out, const ForecastDataset& ds) {
    int max_choices = 2;
    for (const auto& ev : ds.events()) max_choices = std::max(max_choices, ev.space.num_choices);

    std::string csv = "event_id,";
    for (int c = 0; c < max_choices; ++c) csv += "prob_" + std::to_string(c) + ",";
    csv += "aggregator,config_digest\n";
    for (int i = 0; i < ds.num_events(); ++i) {
        const auto& pred = out.predictions[static_cast<std::size_t>(i)];
        if (!pred) continue;
        csv += ds.event(i).id;
        csv += ',';
        for (int c = 0; c < max_choices; ++c) {
            if (c < static_cast<int>(pred->size())) csv += fmt((*pred)[static_cast<std::size_t>(c)]);
            csv += ',';
        }
        csv += out.aggregator + "," + out.config_digest + "\n";
    }
    return csv;
}

std::string aggregate_json(const AggregateOutput& out, const ForecastDataset& ds) {
    json preds = json::array();
    for (int i = 0; i < ds.num_events(); ++i) {
        const auto& pred = out.predictions[static_cast<std::size_t>(i)];
        if (!pred) continue;
        json row;
        row["event_id"] = ds.event(i).id;
        row["probs"] = *pred;
        preds.push_back(std::move(row));
    }
    json doc;
    doc["aggregator"] = out.aggregator;
    doc["config_digest"] = out.config_digest;
    doc["predictions"] = std::move(preds);
    doc["warnings"] = warnings_json(out.warnings);
    return doc.dump(2) + "\n";
}

AggregateOutput aggregate_from_json(const std::string& content, const ForecastDataset& ds) {
    json doc;
    try {
        doc = json::parse(content);
    } catch (const json::exception& e) {
        throw data_error(std::string("invalid aggregate JSON: ") + e.what());
    }
    AggregateOutput out;
    try {
        out.aggregator = doc.value("aggregator", "unknown");
        out.config_digest = doc.value("config_digest", "");
        out.predictions.resize(static_cast<std::size_t>(ds.num_events()));
        for (const auto& row : doc.at("predictions")) {
            const std::string id = row.at("event_id").get<std::string>();
            const auto idx = ds.event_index(id);
            if (!idx) throw data_error("aggregate references unknown event '" + id + "'");
            out.predictions[static_cast<std::size_t>(*idx)] = row.at("probs").get<std::vector<double>>();
        }
    } catch (const json::exception& e) {
        throw data_error(std::string("invalid aggregate JSON: ") + e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// EvalReport

std::string eval_report_csv(const EvalReport& report, const ForecastDataset& ds,
                            const std::string& digest) {
    (void)ds;
    std::string csv = "# config_digest=" + digest + "\n";
    csv += "aggregator,metric,mean,n_events\n";
    for (const auto& [name, entry] : report.per_aggregator)
        csv += name + "," + metric_name(entry.metric) + "," + fmt(entry.mean) + "," +
               std::to_string(entry.n_events) + "\n";
    if (!report.pairwise.empty()) {
        csv += "\nagg_a,agg_b,t,p,n,degenerate\n";
        for (const auto& pw : report.pairwise)
            csv += pw.agg_a + "," + pw.agg_b + "," + fmt(pw.t) + "," + fmt(pw.p) + "," +
                   std::to_string(pw.n) + "," + (pw.degenerate ? "1" : "0") + "\n";
    }
    return csv;
}

std::string eval_report_json(const EvalReport& report, const ForecastDataset& ds,
                             const std::string& digest) {
    json aggs = json::array();
    for (const auto& [name, entry] : report.per_aggregator) {
        json row;
        row["aggregator"] = name;
        row["metric"] = metric_name(entry.metric);
        row["mean"] = entry.mean;
        row["n_events"] = entry.n_events;
        json scores = json::object();
        for (const auto& [event, score] : entry.per_event) scores[ds.event(event).id] = score;
        row["per_event"] = std::move(scores);
        aggs.push_back(std::move(row));
    }
    json pairwise = json::array();
    for (const auto& pw : report.pairwise) {
        json row;
        row["agg_a"] = pw.agg_a;
        row["agg_b"] = pw.agg_b;
        row["t"] = pw.t;
        row["p"] = pw.p;
        row["n_events"] = pw.n;
        row["degenerate"] = pw.degenerate;
        pairwise.push_back(std::move(row));
    }
    json doc;
    doc["metric"] = metric_name(report.metric);
    doc["config_digest"] = digest;
    doc["per_aggregator"] = std::move(aggs);
    doc["pairwise"] = std::move(pairwise);
    doc["warnings"] = warnings_json(report.warnings);
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SweepResult

std::string sweep_csv(const SweepResult& sweep, const std::string& digest) {
    std::string csv = "# config_digest=" + digest + "\n";
    csv += "mechanism,base,fraction,mean_" + std::string(metric_name(sweep.metric)) + "\n";
    for (const auto& curve : sweep.curves)
        for (std::size_t g = 0; g < sweep.grid.size(); ++g)
            csv += curve.mechanism + "," + curve.base + "," + fmt(sweep.grid[g]) + "," +
                   fmt(curve.values[g]) + "\n";
    for (const auto& [name, value] : sweep.baselines)
        csv += name + ",benchmark,," + fmt(value) + "\n";
    return csv;
}

std::string sweep_json(const SweepResult& sweep, const std::string& digest) {
    json curves = json::array();
    for (const auto& curve : sweep.curves) {
        json row;
        row["mechanism"] = curve.mechanism;
        row["base"] = curve.base;
        row["values"] = curve.values;
        curves.push_back(std::move(row));
    }
    json baselines = json::object();
    for (const auto& [name, value] : sweep.baselines) baselines[name] = value;
    json doc;
    doc["metric"] = metric_name(sweep.metric);
    doc["config_digest"] = digest;
    doc["grid"] = sweep.grid;
    doc["curves"] = std::move(curves);
    doc["baselines"] = std::move(baselines);
    doc["warnings"] = warnings_json(sweep.warnings);
    return doc.dump(2) + "\n";
}

std::string sweep_plot_data(const SweepResult& sweep, const SweepCurve& curve,
                            const std::string& digest) {
    std::string out = "# " + curve.mechanism + "-" + curve.base + " mean_" +
                      metric_name(sweep.metric) + " config_digest=" + digest + "\n";
    for (std::size_t g = 0; g < sweep.grid.size(); ++g)
        out += fmt(sweep.grid[g]) + " " + fmt(curve.values[g]) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// ComparisonReport

std::string comparison_csv(const ComparisonReport& report, const std::string& digest) {
    std::string csv = "# config_digest=" + digest + "\n";
    csv += "pas_aggregator,benchmark,wins,losses\n";
    for (const auto& cell : report.tallies)
        csv += cell.pas_aggregator + "," + cell.benchmark + "," + std::to_string(cell.wins) +
               "," + std::to_string(cell.losses) + "\n";
    return csv;
}

std::string comparison_json(const ComparisonReport& report, const std::string& digest) {
    json tallies = json::array();
    for (const auto& cell : report.tallies) {
        json row;
        row["pas_aggregator"] = cell.pas_aggregator;
        row["benchmark"] = cell.benchmark;
        row["wins"] = cell.wins;
        row["losses"] = cell.losses;
        tallies.push_back(std::move(row));
    }
    json datasets = json::array();
    for (const auto& er : report.per_dataset) {
        json ds_doc;
        json means = json::object();
        for (const auto& [name, entry] : er.per_aggregator) means[name] = entry.mean;
        ds_doc["means"] = std::move(means);
        json pairwise = json::array();
        for (const auto& pw : er.pairwise) {
            json row;
            row["agg_a"] = pw.agg_a;
            row["agg_b"] = pw.agg_b;
            row["t"] = pw.t;
            row["p"] = pw.p;
            row["n_events"] = pw.n;
            pairwise.push_back(std::move(row));
        }
        ds_doc["pairwise"] = std::move(pairwise);
        ds_doc["warnings"] = warnings_json(er.warnings);
        datasets.push_back(std::move(ds_doc));
    }
    json doc;
    doc["metric"] = metric_name(report.metric);
    doc["config_digest"] = digest;
    doc["tallies"] = std::move(tallies);
    doc["datasets"] = std::move(datasets);
    doc["warnings"] = warnings_json(report.warnings);
    return doc.dump(2) + "\n";
}

} // namespace peereval
