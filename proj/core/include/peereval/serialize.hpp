#pragma once

#include <string>

#include "peereval/aggregate.hpp"
#include "peereval/eval.hpp"
#include "peereval/mechanisms.hpp"

namespace peereval {

// FNV-1a hex digest of a canonical config string; embedded in every output
// file for provenance.
std::string config_digest(const std::string& canonical_config);

// Writes content to path via a temp file + rename, so readers never observe
// a partially written file.
void write_atomic(const std::string& path, const std::string& content);

std::string pas_scores_csv(const PasScores& pas, const std::string& digest);
std::string pas_scores_json(const PasScores& pas, const std::string& digest);

std::string aggregate_csv(const AggregateOutput& out, const ForecastDataset& ds);
std::string aggregate_json(const AggregateOutput& out, const ForecastDataset& ds);

// Reads back an aggregate JSON document against the dataset it was computed
// for (events are matched by id; unknown ids are an error).
AggregateOutput aggregate_from_json(const std::string& content, const ForecastDataset& ds);

std::string eval_report_csv(const EvalReport& report, const ForecastDataset& ds,
                            const std::string& digest);
std::string eval_report_json(const EvalReport& report, const ForecastDataset& ds,
                             const std::string& digest);

std::string sweep_csv(const SweepResult& sweep, const std::string& digest);
std::string sweep_json(const SweepResult& sweep, const std::string& digest);
// Two-column "fraction value" plot data for one curve, with a leading
// comment line carrying the digest.
std::string sweep_plot_data(const SweepResult& sweep, const SweepCurve& curve,
                            const std::string& digest);

std::string comparison_json(const ComparisonReport& report, const std::string& digest);
std::string comparison_csv(const ComparisonReport& report, const std::string& digest);

} // namespace peereval
