#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hidesim/adversary.hpp"
#include "hidesim/engine.hpp"
#include "hidesim/privacy.hpp"

namespace hidesim {

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);
std::string csv_row(std::span<const std::string> fields);

// Line-delimited JSON: a {"meta": ...} header, one {"round": t, "intents": [...],
// "observations": [...]} record per slot (codes from intent_code() and
// observation_code()), and a closing {"final_memories": [...]} record.
void write_trace_jsonl(std::ostream& out, const ExecutionTrace& trace, std::string_view config_hash);

// One row per slot: round (1-based), beep, count, full, then one local_<v>
// column per station in `local_subset`.
void write_feedback_csv(std::ostream& out, const ExecutionTrace& trace, std::span<const StationId> local_subset,
                        std::string_view config_hash);
void write_feedback_json(std::ostream& out, const ExecutionTrace& trace, std::span<const StationId> local_subset,
                         std::string_view config_hash);

// "channel,1,2,...": one row per trace, the states perceived by `station`.
void write_channel_states_csv(std::ostream& out, std::span<const ExecutionTrace* const> traces, StationId station,
                              std::string_view config_hash);
// "adversary,1,2,...": beep, count and full rows for one trace.
void write_adversary_views_csv(std::ostream& out, const ExecutionTrace& trace, std::string_view config_hash);

void write_histogram_csv(std::ostream& out, const ObservationHistogram& h, std::string_view config_hash);

// Data lines of a CSV file, skipping '#' comment lines.
std::vector<std::string> csv_data_lines(std::string_view text);

}  // namespace hidesim
