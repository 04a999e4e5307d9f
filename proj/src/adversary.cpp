#include "hidesim/adversary.hpp"

#include <algorithm>
#include <stdexcept>

namespace hidesim {

std::string_view feedback_name(FeedbackKind k) {
    switch (k) {
        case FeedbackKind::BeepDetecting: return "beep";
        case FeedbackKind::TransmissionCounting: return "count";
        case FeedbackKind::Local: return "local";
        case FeedbackKind::FullInformation: return "full";
    }
    return "?";
}

std::optional<FeedbackKind> parse_feedback(std::string_view name) {
    if (name == "beep" || name == "beep_detecting") return FeedbackKind::BeepDetecting;
    if (name == "count" || name == "transmission_counting") return FeedbackKind::TransmissionCounting;
    if (name == "local") return FeedbackKind::Local;
    if (name == "full" || name == "full_information") return FeedbackKind::FullInformation;
    return std::nullopt;
}

std::vector<std::uint8_t> feedback_beep(const ExecutionTrace& trace) {
    std::vector<std::uint8_t> out;
    out.reserve(trace.length());
    for (const auto& r : trace.rounds)
        out.push_back(std::any_of(r.intents.begin(), r.intents.end(),
                                  [](const Intent& i) { return i.transmitting(); }));
    return out;
}

std::vector<std::uint32_t> feedback_count(const ExecutionTrace& trace) {
    std::vector<std::uint32_t> out;
    out.reserve(trace.length());
    for (const auto& r : trace.rounds)
        out.push_back(static_cast<std::uint32_t>(std::count_if(
            r.intents.begin(), r.intents.end(), [](const Intent& i) { return i.transmitting(); })));
    return out;
}

std::vector<std::vector<LocalObservation>> feedback_local(const ExecutionTrace& trace,
                                                          std::span<const StationId> subset) {
    if (subset.empty()) throw std::invalid_argument("local adversary needs a nonempty station subset");
    for (auto v : subset)
        if (!trace.graph.contains(v)) throw std::invalid_argument("invalid station id " + std::to_string(v));
    std::vector<std::vector<LocalObservation>> out;
    out.reserve(trace.length());
    for (const auto& r : trace.rounds) {
        std::vector<LocalObservation> row;
        row.reserve(subset.size());
        for (auto v : subset) row.push_back(r.observations[v]);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<std::vector<DirectedEdge>> feedback_full(const ExecutionTrace& trace) {
    std::vector<std::vector<DirectedEdge>> out;
    out.reserve(trace.length());
    for (const auto& r : trace.rounds) {
        std::vector<DirectedEdge> active;
        for (StationId u = 0; u < r.intents.size(); ++u) {
            const Intent& in = r.intents[u];
            if (in.kind == Intent::Kind::Broadcast) {
                for (StationId w : trace.graph.neighbors(u)) active.push_back({u, w});
            } else if (in.kind == Intent::Kind::Direct) {
                for (const auto& e : in.envelopes) active.push_back({u, e.to});
            }
        }
        std::sort(active.begin(), active.end());
        out.push_back(std::move(active));
    }
    return out;
}

namespace {
std::string message_label(StationId from, StationId to) {
    return "m" + std::to_string(from) + "," + std::to_string(to);
}
}  // namespace

std::string render_local(const LocalObservation& obs, StationId receiver) {
    if (obs.state != Perception::Messages) return std::string(perception_name(obs.state));
    if (obs.deliveries.empty()) return "∅";
    std::string out;
    for (std::size_t i = 0; i < obs.deliveries.size(); ++i) {
        if (i) out += ' ';
        out += message_label(obs.deliveries[i].from, receiver);
    }
    return out;
}

std::string render_edges(const std::vector<DirectedEdge>& edges) {
    if (edges.empty()) return "∅";
    std::string out;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (i) out += ' ';
        out += message_label(edges[i].from, edges[i].to);
    }
    return out;
}

std::string FeedbackStream::joined() const {
    std::string out;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (i) out += '|';
        out += symbols[i];
    }
    return out;
}

FeedbackStream feedback(const ExecutionTrace& trace, const FeedbackSpec& spec) {
    FeedbackStream s{spec, {}};
    s.symbols.reserve(trace.length());
    switch (spec.kind) {
        case FeedbackKind::BeepDetecting:
            for (auto b : feedback_beep(trace)) s.symbols.push_back(b ? "1" : "0");
            break;
        case FeedbackKind::TransmissionCounting:
            for (auto c : feedback_count(trace)) s.symbols.push_back(std::to_string(c));
            break;
        case FeedbackKind::Local:
            for (const auto& row : feedback_local(trace, spec.subset)) {
                std::string sym;
                for (std::size_t i = 0; i < row.size(); ++i) {
                    if (i) sym += ';';
                    sym += observation_code(row[i]);
                }
                s.symbols.push_back(std::move(sym));
            }
            break;
        case FeedbackKind::FullInformation:
            for (const auto& edges : feedback_full(trace)) {
                std::string sym;
                for (std::size_t i = 0; i < edges.size(); ++i) {
                    if (i) sym += ';';
                    sym += std::to_string(edges[i].from) + ">" + std::to_string(edges[i].to);
                }
                s.symbols.push_back(std::move(sym));
            }
            break;
    }
    return s;
}

}  // namespace hidesim
