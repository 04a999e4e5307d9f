#include "hidesim/engine.hpp"

#include <algorithm>

#include "hidesim/digest.hpp"

namespace hidesim {

ExecutionTrace run(const SimulationConfig& config) {
    if (config.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    if (!config.programs) throw ConfigError("no station programs supplied");

    const NetworkGraph& g = config.graph;
    const std::size_t n = g.node_count();

    std::vector<std::unique_ptr<StationProgram>> programs;
    std::vector<std::mt19937_64> rngs;
    programs.reserve(n);
    rngs.reserve(n);
    for (StationId v = 0; v < n; ++v) {
        programs.push_back(config.programs(v, g));
        if (!programs.back()) throw ConfigError("no program for station " + std::to_string(v));
        rngs.emplace_back(station_seed(config.master_seed, v));
    }

    ExecutionTrace trace{g, config.channel, config.master_seed, config.algorithm, {}, {}};
    std::vector<bool> done(n, false);
    std::size_t remaining = n;

    for (std::size_t t = 0; t < config.max_rounds && remaining > 0; ++t) {
        RoundIntents intents(n);
        for (StationId v = 0; v < n; ++v) {
            if (done[v]) continue;
            std::optional<LocalObservation> last;
            if (t > 0) last = trace.rounds.back().observations[v];
            StepContext ctx{t, v, g.neighbors(v), config.channel, rngs[v]};
            StepResult res;
            try {
                res = programs[v]->step(ctx, last);
                validate_intent(g, config.channel, v, res.intent);
            } catch (const SimulationError&) {
                throw;
            } catch (const std::exception& e) {
                throw SimulationError(v, t, e.what());
            }
            intents[v] = std::move(res.intent);
            if (res.terminate) {
                done[v] = true;
                --remaining;
            }
        }
        auto observations = observe_all(config.channel, intents, g);
        trace.rounds.push_back(TraceRound{std::move(intents), std::move(observations)});
    }

    trace.final_memories.reserve(n);
    for (const auto& p : programs) trace.final_memories.push_back(p->memory());
    return trace;
}

std::vector<std::size_t> transmissions_per_station(const ExecutionTrace& trace) {
    std::vector<std::size_t> count(trace.graph.node_count(), 0);
    for (const auto& r : trace.rounds)
        for (std::size_t v = 0; v < r.intents.size(); ++v)
            if (r.intents[v].transmitting()) ++count[v];
    return count;
}

EnergyTime energy_and_time(const ExecutionTrace& trace) {
    auto count = transmissions_per_station(trace);
    std::size_t energy = count.empty() ? 0 : *std::max_element(count.begin(), count.end());
    return EnergyTime{trace.length(), energy};
}

}  // namespace hidesim
