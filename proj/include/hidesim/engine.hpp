#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hidesim/channel.hpp"
#include "hidesim/topology.hpp"

namespace hidesim {

// Everything a station may consult when choosing its action for one slot.
struct StepContext {
    std::size_t round;
    StationId station;
    std::span<const StationId> neighbors;
    ChannelModel channel;
    std::mt19937_64& rng;  // per-station stream, see station_seed()
};

struct StepResult {
    Intent intent;
    // After this slot the station stops; the engine keeps it silent. The run
    // ends early once every station has set this flag.
    bool terminate = false;
};

// A station's local algorithm. Holds its own memory; sees only its own
// observations. `last` is empty on the first step and otherwise holds the
// observation of the previous slot.
class StationProgram {
public:
    virtual ~StationProgram() = default;
    virtual StepResult step(const StepContext& ctx, const std::optional<LocalObservation>& last) = 0;
    // Canonical rendering of the local memory, compared across runs.
    virtual std::string memory() const = 0;
};

using ProgramFactory =
    std::function<std::unique_ptr<StationProgram>(StationId station, const NetworkGraph& g)>;

struct SimulationConfig {
    NetworkGraph graph;
    ChannelModel channel = ChannelModel::Beeping;
    ProgramFactory programs;
    std::size_t max_rounds = 1;
    std::uint64_t master_seed = 0;
    std::string algorithm = "custom";
};

struct TraceRound {
    RoundIntents intents;
    std::vector<LocalObservation> observations;
    friend bool operator==(const TraceRound&, const TraceRound&) = default;
};

struct ExecutionTrace {
    NetworkGraph graph;
    ChannelModel channel = ChannelModel::Beeping;
    std::uint64_t seed = 0;
    std::string algorithm;
    std::vector<TraceRound> rounds;
    std::vector<std::string> final_memories;

    std::size_t length() const { return rounds.size(); }
    std::string graph_hash() const { return graph.fingerprint(); }
};

class SimulationError : public std::runtime_error {
public:
    SimulationError(StationId station, std::size_t round, const std::string& what)
        : std::runtime_error("station " + std::to_string(station) + ", round " + std::to_string(round) +
                             ": " + what),
          station_(station), round_(round) {}
    StationId station() const { return station_; }
    std::size_t round() const { return round_; }

private:
    StationId station_;
    std::size_t round_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Runs the synchronous slot loop. Deterministic in the config.
ExecutionTrace run(const SimulationConfig& config);

struct EnergyTime {
    std::size_t time;    // executed slots
    std::size_t energy;  // max over stations of transmitting slots
    friend bool operator==(const EnergyTime&, const EnergyTime&) = default;
};

EnergyTime energy_and_time(const ExecutionTrace& trace);
std::vector<std::size_t> transmissions_per_station(const ExecutionTrace& trace);

}  // namespace hidesim
