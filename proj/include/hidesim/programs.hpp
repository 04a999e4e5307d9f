#pragma once

// Workload programs: the algorithms that the hiding wrappers hide.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hidesim/engine.hpp"

namespace hidesim {

// Flooding broadcast from `source`.
//
// Direct messaging: a station forwards on first reception to every neighbor
// that did not send it the message, then stops; with nothing to forward it
// stops silently. Broadcast channels: a station retransmits once on its
// first successful reception (Transmission, or Beep under Beeping).
ProgramFactory flooding_broadcast(StationId source, Payload message);

// Replays a fixed intent schedule and ignores the channel otherwise. Silent
// once the schedule is exhausted. Never terminates on its own unless
// `terminate_at_end` is set, in which case it stops after its last entry
// (immediately, silently, for an empty schedule).
class ScriptedProgram final : public StationProgram {
public:
    explicit ScriptedProgram(std::vector<Intent> schedule, bool terminate_at_end = false)
        : schedule_(std::move(schedule)), terminate_at_end_(terminate_at_end) {}
    StepResult step(const StepContext& ctx, const std::optional<LocalObservation>& last) override;
    std::string memory() const override;

private:
    std::vector<Intent> schedule_;
    bool terminate_at_end_;
    std::string seen_;
};

ProgramFactory scripted_programs(std::vector<std::vector<Intent>> schedules, bool terminate_at_end = false);

// Parses a schedule string of per-slot symbols: 'T' or 'B' transmit
// (broadcast `payload`), '-' or 'S' silent. Whitespace and ',' are ignored.
std::vector<Intent> schedule_from_symbols(std::string_view symbols, const Payload& payload);

// Silent for `rounds` slots, then stops.
ProgramFactory silent_programs(std::size_t rounds);

// Every slot, with probability p, a station sends `payload` to one uniformly
// chosen neighbor (direct messaging) or broadcasts it. Stops after `rounds`.
ProgramFactory random_chatter(std::size_t rounds, double p, Payload payload);

}  // namespace hidesim
