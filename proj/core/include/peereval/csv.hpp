#pragma once

#include <string>

#include "peereval/dataset.hpp"

namespace peereval {

// Dataset CSV format, version 1.
//
// An optional leading comment line "# peereval-dataset v1" is written by
// save_csv and ignored (but version-checked) by load_csv. The header row then
// takes one of two forms:
//
//   binary-only:  event_id,agent_id,outcome_space,p,meta,outcome
//   general:      event_id,agent_id,outcome_space,prob_0,...,prob_{C-1},meta,outcome
//
// outcome_space is the number of choices C of the row's event (2 for binary).
// In the binary form, p is P(y=1). In the general form a binary row fills
// prob_0 = 1-p and prob_1 = p and leaves higher prob columns blank; a C-choice
// row fills prob_0..prob_{C-1}. meta is the agent's estimate of the average
// peer prediction (blank when absent, binary events only). outcome is the
// realized outcome index, blank while the event is unresolved.
//
// Every row describes one (event, agent) prediction; duplicate pairs are an
// error. Events inherit outcome_space/outcome from their first row and all
// later rows must agree.
ForecastDataset load_csv(const std::string& path);

// Writes atomically (temp file + rename). A nonempty comment is emitted as a
// second "# ..." line; load_csv ignores comment lines.
void save_csv(const ForecastDataset& ds, const std::string& path,
              const std::string& comment = "");

} // namespace peereval
