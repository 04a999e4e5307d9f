#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hidesim/engine.hpp"

namespace hidesim {

enum class FeedbackKind { BeepDetecting, TransmissionCounting, Local, FullInformation };

std::string_view feedback_name(FeedbackKind k);
// "beep", "count", "local", "full".
std::optional<FeedbackKind> parse_feedback(std::string_view name);

struct FeedbackSpec {
    FeedbackKind kind = FeedbackKind::BeepDetecting;
    std::vector<StationId> subset;  // Local only
    friend bool operator==(const FeedbackSpec&, const FeedbackSpec&) = default;
};

struct DirectedEdge {
    StationId from;
    StationId to;
    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
    friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

// One symbol per round: whether anybody transmitted.
std::vector<std::uint8_t> feedback_beep(const ExecutionTrace& trace);
// One symbol per round: how many stations transmitted.
std::vector<std::uint32_t> feedback_count(const ExecutionTrace& trace);
// One tuple per round: the subset's local observations, in subset order.
// Throws std::invalid_argument on an empty subset or an invalid id.
std::vector<std::vector<LocalObservation>> feedback_local(const ExecutionTrace& trace,
                                                          std::span<const StationId> subset);
// One set per round: active sender->receiver links, sorted. Broadcast
// channels count every neighbor of a transmitter whether or not the
// reception succeeded; payloads are not part of the view.
std::vector<std::vector<DirectedEdge>> feedback_full(const ExecutionTrace& trace);

// Human-readable renderings:
// local states as "Beep"/"Silence"/.../"None", a direct-messaging listener
// as "m2,0 m3,0" (or "∅"), a full-information set as "m2,0 m2,3".
std::string render_local(const LocalObservation& obs, StationId receiver);
std::string render_edges(const std::vector<DirectedEdge>& edges);

// Canonically serialized feedback, one string per round. Two traces give the
// adversary the same view iff their symbol vectors are equal.
struct FeedbackStream {
    FeedbackSpec spec;
    std::vector<std::string> symbols;

    std::size_t length() const { return symbols.size(); }
    std::string joined() const;
    friend bool operator==(const FeedbackStream&, const FeedbackStream&) = default;
};

FeedbackStream feedback(const ExecutionTrace& trace, const FeedbackSpec& spec);

}  // namespace hidesim
