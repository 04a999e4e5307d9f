#include "hidesim/programs.hpp"

#include <algorithm>
#include <random>

#include "hidesim/digest.hpp"

namespace hidesim {

namespace {

class FloodingProgram final : public StationProgram {
public:
    FloodingProgram(bool is_source, Payload message)
        : is_source_(is_source), message_(is_source ? std::move(message) : Payload{}) {}

    StepResult step(const StepContext& ctx, const std::optional<LocalObservation>& last) override {
        if (is_source_ && ctx.round == 0) {
            informed_ = true;
            return {send(ctx, ctx.neighbors), true};
        }
        if (!last) return {Intent::silent(), false};

        if (ctx.channel == ChannelModel::DirectMessaging) {
            if (last->deliveries.empty()) return {Intent::silent(), false};
            informed_ = true;
            informed_round_ = ctx.round;
            message_ = last->deliveries.front().payload;
            std::vector<StationId> targets;
            for (StationId u : ctx.neighbors) {
                bool sent_to_us = std::any_of(last->deliveries.begin(), last->deliveries.end(),
                                              [u](const Delivery& d) { return d.from == u; });
                if (!sent_to_us) targets.push_back(u);
            }
            if (targets.empty()) return {Intent::silent(), true};
            return {send(ctx, targets), true};
        }

        bool heard = last->state == Perception::Transmission ||
                     (ctx.channel == ChannelModel::Beeping && last->state == Perception::Beep);
        if (!heard) return {Intent::silent(), false};
        informed_ = true;
        informed_round_ = ctx.round;
        if (last->state == Perception::Transmission) message_ = last->payload;
        return {Intent::broadcast(message_), true};
    }

    std::string memory() const override {
        std::string at = is_source_ ? "source" : informed_round_ ? std::to_string(*informed_round_) : "-";
        return std::string("informed=") + (informed_ ? "1" : "0") + ";at=" + at + ";msg=" + to_hex(message_);
    }

private:
    Intent send(const StepContext& ctx, std::span<const StationId> targets) const {
        if (ctx.channel == ChannelModel::DirectMessaging) return Intent::direct(message_, targets);
        return Intent::broadcast(message_);
    }

    bool is_source_;
    Payload message_;
    bool informed_ = false;
    std::optional<std::size_t> informed_round_;
};

class SilentProgram final : public StationProgram {
public:
    explicit SilentProgram(std::size_t rounds) : rounds_(rounds) {}
    StepResult step(const StepContext& ctx, const std::optional<LocalObservation>&) override {
        return {Intent::silent(), ctx.round + 1 >= rounds_};
    }
    std::string memory() const override { return "silent"; }

private:
    std::size_t rounds_;
};

class ChatterProgram final : public StationProgram {
public:
    ChatterProgram(std::size_t rounds, double p, Payload payload)
        : rounds_(rounds), p_(p), payload_(std::move(payload)) {}

    StepResult step(const StepContext& ctx, const std::optional<LocalObservation>& last) override {
        if (last) {
            received_ += last->deliveries.size();
            if (last->state == Perception::Transmission || last->state == Perception::Beep) ++received_;
        }
        bool stop = ctx.round + 1 >= rounds_;
        // Draw as a 53-bit fraction so the stream is portable across standard libraries.
        double u = static_cast<double>(ctx.rng() >> 11) * 0x1.0p-53;
        if (u >= p_ || ctx.neighbors.empty()) return {Intent::silent(), stop};
        ++sent_;
        if (ctx.channel == ChannelModel::DirectMessaging) {
            StationId to = ctx.neighbors[ctx.rng() % ctx.neighbors.size()];
            return {Intent::direct({Envelope{to, payload_}}), stop};
        }
        return {Intent::broadcast(payload_), stop};
    }

    std::string memory() const override {
        return "sent=" + std::to_string(sent_) + ";received=" + std::to_string(received_);
    }

private:
    std::size_t rounds_;
    double p_;
    Payload payload_;
    std::size_t sent_ = 0;
    std::size_t received_ = 0;
};

}  // namespace

ProgramFactory flooding_broadcast(StationId source, Payload message) {
    return [source, message = std::move(message)](StationId v, const NetworkGraph& g) {
        if (!g.contains(source)) throw ConfigError("flooding source " + std::to_string(source) + " out of range");
        return std::make_unique<FloodingProgram>(v == source, message);
    };
}

StepResult ScriptedProgram::step(const StepContext& ctx, const std::optional<LocalObservation>& last) {
    if (last) seen_ += observation_code(*last) + ' ';
    bool at_end = ctx.round + 1 >= schedule_.size();
    Intent intent = ctx.round < schedule_.size() ? schedule_[ctx.round] : Intent::silent();
    return {std::move(intent), terminate_at_end_ && at_end};
}

std::string ScriptedProgram::memory() const { return "seen=" + seen_; }

ProgramFactory scripted_programs(std::vector<std::vector<Intent>> schedules, bool terminate_at_end) {
    return [schedules = std::move(schedules), terminate_at_end](StationId v, const NetworkGraph&) {
        std::vector<Intent> mine = v < schedules.size() ? schedules[v] : std::vector<Intent>{};
        return std::make_unique<ScriptedProgram>(std::move(mine), terminate_at_end);
    };
}

std::vector<Intent> schedule_from_symbols(std::string_view symbols, const Payload& payload) {
    std::vector<Intent> out;
    for (char c : symbols) {
        switch (c) {
            case 'T': case 'B': out.push_back(Intent::broadcast(payload)); break;
            case '-': case 'S': out.push_back(Intent::silent()); break;
            case ' ': case ',': case '\t': break;
            default: throw ConfigError(std::string("unknown schedule symbol '") + c + "'");
        }
    }
    return out;
}

ProgramFactory silent_programs(std::size_t rounds) {
    return [rounds](StationId, const NetworkGraph&) { return std::make_unique<SilentProgram>(rounds); };
}

ProgramFactory random_chatter(std::size_t rounds, double p, Payload payload) {
    return [rounds, p, payload = std::move(payload)](StationId, const NetworkGraph&) {
        return std::make_unique<ChatterProgram>(rounds, p, payload);
    };
}

}  // namespace hidesim
