#include "hidesim/trace_io.hpp"

#include <ostream>

#include "json.hpp"

namespace hidesim {

using nlohmann::json;

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_row(std::span<const std::string> fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out;
}

void write_trace_jsonl(std::ostream& out, const ExecutionTrace& trace, std::string_view config_hash) {
    json meta = {
        {"config_hash", config_hash},
        {"graph_hash", trace.graph_hash()},
        {"stations", trace.graph.node_count()},
        {"channel", channel_name(trace.channel)},
        {"seed", trace.seed},
        {"algorithm", trace.algorithm},
        {"rounds", trace.length()},
    };
    out << json{{"meta", meta}}.dump() << '\n';
    for (std::size_t t = 0; t < trace.length(); ++t) {
        const auto& r = trace.rounds[t];
        json intents = json::array();
        json observations = json::array();
        for (const auto& i : r.intents) intents.push_back(intent_code(i));
        for (const auto& o : r.observations) observations.push_back(observation_code(o));
        out << json{{"round", t}, {"intents", intents}, {"observations", observations}}.dump() << '\n';
    }
    out << json{{"final_memories", trace.final_memories}}.dump() << '\n';
}

namespace {

struct FeedbackTable {
    std::vector<std::uint8_t> beep;
    std::vector<std::uint32_t> count;
    std::vector<std::vector<DirectedEdge>> full;
    std::vector<std::vector<LocalObservation>> local;
};

FeedbackTable tabulate(const ExecutionTrace& trace, std::span<const StationId> subset) {
    FeedbackTable t{feedback_beep(trace), feedback_count(trace), feedback_full(trace), {}};
    if (!subset.empty()) t.local = feedback_local(trace, subset);
    return t;
}

}  // namespace

void write_feedback_csv(std::ostream& out, const ExecutionTrace& trace, std::span<const StationId> local_subset,
                        std::string_view config_hash) {
    auto t = tabulate(trace, local_subset);
    out << "# config_hash=" << config_hash << '\n';
    std::vector<std::string> header{"round", "beep", "count", "full"};
    for (auto v : local_subset) header.push_back("local_" + std::to_string(v));
    out << csv_row(header) << '\n';
    for (std::size_t r = 0; r < trace.length(); ++r) {
        std::vector<std::string> row{std::to_string(r + 1), std::to_string(t.beep[r]), std::to_string(t.count[r]),
                                     render_edges(t.full[r])};
        for (std::size_t i = 0; i < local_subset.size(); ++i)
            row.push_back(render_local(t.local[r][i], local_subset[i]));
        out << csv_row(row) << '\n';
    }
}

void write_feedback_json(std::ostream& out, const ExecutionTrace& trace, std::span<const StationId> local_subset,
                         std::string_view config_hash) {
    auto t = tabulate(trace, local_subset);
    json rounds = json::array();
    for (std::size_t r = 0; r < trace.length(); ++r) {
        json edges = json::array();
        for (const auto& e : t.full[r]) edges.push_back({e.from, e.to});
        json row = {{"round", r + 1}, {"beep", t.beep[r]}, {"count", t.count[r]}, {"full", edges}};
        if (!local_subset.empty()) {
            json local = json::object();
            for (std::size_t i = 0; i < local_subset.size(); ++i)
                local[std::to_string(local_subset[i])] = render_local(t.local[r][i], local_subset[i]);
            row["local"] = local;
        }
        rounds.push_back(row);
    }
    out << json{{"config_hash", config_hash}, {"rounds", rounds}}.dump(2) << '\n';
}

void write_channel_states_csv(std::ostream& out, std::span<const ExecutionTrace* const> traces, StationId station,
                              std::string_view config_hash) {
    out << "# config_hash=" << config_hash << '\n';
    std::size_t len = 0;
    for (auto* t : traces) len = std::max(len, t->length());
    std::vector<std::string> header{"channel"};
    for (std::size_t r = 1; r <= len; ++r) header.push_back(std::to_string(r));
    out << csv_row(header) << '\n';
    for (auto* t : traces) {
        std::vector<std::string> row{std::string(channel_name(t->channel))};
        for (const auto& round : t->rounds) row.push_back(render_local(round.observations.at(station), station));
        out << csv_row(row) << '\n';
    }
}

void write_adversary_views_csv(std::ostream& out, const ExecutionTrace& trace, std::string_view config_hash) {
    auto t = tabulate(trace, {});
    out << "# config_hash=" << config_hash << '\n';
    std::vector<std::string> header{"adversary"};
    std::vector<std::string> beep{"beep"}, count{"count"}, full{"full"};
    for (std::size_t r = 0; r < trace.length(); ++r) {
        header.push_back(std::to_string(r + 1));
        beep.push_back(std::to_string(t.beep[r]));
        count.push_back(std::to_string(t.count[r]));
        full.push_back(render_edges(t.full[r]));
    }
    for (const auto* row : {&header, &beep, &count, &full}) out << csv_row(*row) << '\n';
}

void write_histogram_csv(std::ostream& out, const ObservationHistogram& h, std::string_view config_hash) {
    out << "# config_hash=" << config_hash << '\n';
    out << "# event_mode=" << event_mode_name(h.mode) << " total=" << h.total << '\n';
    out << "outcome,count\n";
    for (const auto& [k, c] : h.counts) out << csv_field(k) << ',' << c << '\n';
}

std::vector<std::string> csv_data_lines(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.front() != '#') out.emplace_back(line);
    }
    return out;
}

}  // namespace hidesim
