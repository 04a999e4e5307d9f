#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hidesim/topology.hpp"

namespace hidesim {

enum class ChannelModel { Beeping, NoCdMac, CdMac, DirectMessaging };

std::string_view channel_name(ChannelModel m);
// Accepts "beeping", "nocd", "cd", "direct" (and the long names from channel_name()).
std::optional<ChannelModel> parse_channel(std::string_view name);
bool is_broadcast(ChannelModel m);

using Payload = std::vector<std::uint8_t>;
Payload payload_of(std::string_view text);

struct Envelope {
    StationId to;
    Payload payload;
    friend bool operator==(const Envelope&, const Envelope&) = default;
};

// What one station does in one slot.
//   Silent    - listen.
//   Broadcast - transmit `payload` to every neighbor. Under Beeping only the
//               presence of the signal matters.
//   Direct    - DirectMessaging only: one addressed message per envelope.
struct Intent {
    enum class Kind : std::uint8_t { Silent, Broadcast, Direct };

    Kind kind = Kind::Silent;
    Payload payload;
    std::vector<Envelope> envelopes;  // sorted by recipient

    static Intent silent() { return {}; }
    static Intent beep() { return broadcast({}); }
    static Intent broadcast(Payload p) { return Intent{Kind::Broadcast, std::move(p), {}}; }
    // Throws std::invalid_argument on an empty or duplicate recipient list.
    static Intent direct(std::vector<Envelope> envelopes);
    static Intent direct(const Payload& p, std::span<const StationId> recipients);

    bool transmitting() const { return kind != Kind::Silent; }
    friend bool operator==(const Intent&, const Intent&) = default;
};

using RoundIntents = std::vector<Intent>;

class IntentError : public std::runtime_error {
public:
    IntentError(StationId station, const std::string& what)
        : std::runtime_error("station " + std::to_string(station) + ": " + what), station_(station) {}
    StationId station() const { return station_; }

private:
    StationId station_;
};

// Rejects intents that cannot exist under `model` on `g`: Direct intents under
// a broadcast channel, or an envelope addressed to a non-neighbor.
void validate_intent(const NetworkGraph& g, ChannelModel model, StationId v, const Intent& intent);

enum class Perception : std::uint8_t {
    SelfTransmitting,  // rendered "None": the station itself transmitted
    Beep,
    Silence,
    Noise,
    Collision,
    Transmission,
    Messages,  // DirectMessaging listener
};

std::string_view perception_name(Perception p);

struct Delivery {
    StationId from;
    Payload payload;
    friend bool operator==(const Delivery&, const Delivery&) = default;
};

struct LocalObservation {
    Perception state = Perception::Silence;
    // Transmission: the unique transmitting neighbor and its payload.
    StationId sender = 0;
    Payload payload;
    // DirectMessaging: every message addressed to this station, sorted by sender.
    // Filled for the Messages state and, since direct links are full duplex,
    // also for SelfTransmitting.
    std::vector<Delivery> deliveries;

    static LocalObservation of(Perception p) { return LocalObservation{p, 0, {}, {}}; }
    friend bool operator==(const LocalObservation&, const LocalObservation&) = default;
};

// Per-station reference evaluators. `intents` holds one entry per station.
LocalObservation observe_beeping(const RoundIntents& intents, const NetworkGraph& g, StationId v);
LocalObservation observe_nocd(const RoundIntents& intents, const NetworkGraph& g, StationId v);
LocalObservation observe_cd(const RoundIntents& intents, const NetworkGraph& g, StationId v);
LocalObservation observe_direct(const RoundIntents& intents, const NetworkGraph& g, StationId v);
LocalObservation observe(ChannelModel model, const RoundIntents& intents, const NetworkGraph& g, StationId v);

// Whole-round evaluation for every station at once, bit-parallel over the
// adjacency matrix. Agrees with observe() station by station.
std::vector<LocalObservation> observe_all(ChannelModel model, const RoundIntents& intents,
                                          const NetworkGraph& g);

}  // namespace hidesim

namespace hidesim {

// Compact, unambiguous codes used in trace files and program memories.
//   intent:      "-" | "T:<hex>" | "D:<to>=<hex>,<to>=<hex>"
//   observation: "X" | "B" | "S" | "N" | "C" | "T<from>:<hex>" | "M{<from>=<hex>,...}",
//                with "X{...}" for a transmitting direct-messaging station.
std::string intent_code(const Intent& intent);
std::string observation_code(const LocalObservation& obs);

}  // namespace hidesim
