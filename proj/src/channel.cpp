#include "hidesim/channel.hpp"

#include <algorithm>

namespace hidesim {

std::string_view channel_name(ChannelModel m) {
    switch (m) {
        case ChannelModel::Beeping: return "beeping";
        case ChannelModel::NoCdMac: return "nocd";
        case ChannelModel::CdMac: return "cd";
        case ChannelModel::DirectMessaging: return "direct";
    }
    return "?";
}

std::optional<ChannelModel> parse_channel(std::string_view name) {
    if (name == "beeping") return ChannelModel::Beeping;
    if (name == "nocd" || name == "nocd_mac" || name == "no-cd") return ChannelModel::NoCdMac;
    if (name == "cd" || name == "cd_mac") return ChannelModel::CdMac;
    if (name == "direct" || name == "direct_messaging") return ChannelModel::DirectMessaging;
    return std::nullopt;
}

bool is_broadcast(ChannelModel m) { return m != ChannelModel::DirectMessaging; }

Payload payload_of(std::string_view text) { return Payload(text.begin(), text.end()); }

Intent Intent::direct(std::vector<Envelope> envelopes) {
    if (envelopes.empty()) throw std::invalid_argument("direct intent needs at least one recipient");
    std::sort(envelopes.begin(), envelopes.end(),
              [](const Envelope& a, const Envelope& b) { return a.to < b.to; });
    for (std::size_t i = 1; i < envelopes.size(); ++i)
        if (envelopes[i].to == envelopes[i - 1].to)
            throw std::invalid_argument("duplicate recipient " + std::to_string(envelopes[i].to));
    return Intent{Kind::Direct, {}, std::move(envelopes)};
}

Intent Intent::direct(const Payload& p, std::span<const StationId> recipients) {
    std::vector<Envelope> env;
    env.reserve(recipients.size());
    for (auto r : recipients) env.push_back(Envelope{r, p});
    return direct(std::move(env));
}

void validate_intent(const NetworkGraph& g, ChannelModel model, StationId v, const Intent& intent) {
    if (intent.kind != Intent::Kind::Direct) return;
    if (is_broadcast(model))
        throw IntentError(v, "addressed messages are only available under direct messaging");
    for (const auto& e : intent.envelopes)
        if (!g.adjacent(v, e.to))
            throw IntentError(v, "message addressed to non-neighbor " + std::to_string(e.to));
}

std::string_view perception_name(Perception p) {
    switch (p) {
        case Perception::SelfTransmitting: return "None";
        case Perception::Beep: return "Beep";
        case Perception::Silence: return "Silence";
        case Perception::Noise: return "Noise";
        case Perception::Collision: return "Collision";
        case Perception::Transmission: return "Transmission";
        case Perception::Messages: return "Messages";
    }
    return "?";
}

namespace {

// Transmitting neighbors of v, ascending.
std::vector<StationId> transmitting_neighbors(const RoundIntents& intents, const NetworkGraph& g,
                                              StationId v) {
    std::vector<StationId> out;
    for (StationId u : g.neighbors(v))
        if (intents[u].transmitting()) out.push_back(u);
    return out;
}

LocalObservation transmission_from(const RoundIntents& intents, StationId sender) {
    LocalObservation obs = LocalObservation::of(Perception::Transmission);
    obs.sender = sender;
    obs.payload = intents[sender].payload;
    return obs;
}

std::vector<Delivery> deliveries_to(const RoundIntents& intents, const NetworkGraph& g, StationId v) {
    std::vector<Delivery> out;
    for (StationId u : g.neighbors(v)) {
        const Intent& in = intents[u];
        if (in.kind == Intent::Kind::Broadcast) {
            out.push_back(Delivery{u, in.payload});
        } else if (in.kind == Intent::Kind::Direct) {
            auto it = std::lower_bound(in.envelopes.begin(), in.envelopes.end(), v,
                                       [](const Envelope& e, StationId t) { return e.to < t; });
            if (it != in.envelopes.end() && it->to == v) out.push_back(Delivery{u, it->payload});
        }
    }
    return out;
}

}  // namespace

LocalObservation observe_beeping(const RoundIntents& intents, const NetworkGraph& g, StationId v) {
    if (intents[v].transmitting()) return LocalObservation::of(Perception::SelfTransmitting);
    return LocalObservation::of(transmitting_neighbors(intents, g, v).empty() ? Perception::Silence
                                                                               : Perception::Beep);
}

LocalObservation observe_nocd(const RoundIntents& intents, const NetworkGraph& g, StationId v) {
    if (intents[v].transmitting()) return LocalObservation::of(Perception::SelfTransmitting);
    auto tx = transmitting_neighbors(intents, g, v);
    if (tx.size() == 1) return transmission_from(intents, tx.front());
    return LocalObservation::of(Perception::Noise);
}

LocalObservation observe_cd(const RoundIntents& intents, const NetworkGraph& g, StationId v) {
    if (intents[v].transmitting()) return LocalObservation::of(Perception::SelfTransmitting);
    auto tx = transmitting_neighbors(intents, g, v);
    if (tx.empty()) return LocalObservation::of(Perception::Silence);
    if (tx.size() == 1) return transmission_from(intents, tx.front());
    return LocalObservation::of(Perception::Collision);
}

LocalObservation observe_direct(const RoundIntents& intents, const NetworkGraph& g, StationId v) {
    LocalObservation obs = LocalObservation::of(intents[v].transmitting() ? Perception::SelfTransmitting
                                                                          : Perception::Messages);
    obs.deliveries = deliveries_to(intents, g, v);
    return obs;
}

LocalObservation observe(ChannelModel model, const RoundIntents& intents, const NetworkGraph& g,
                         StationId v) {
    switch (model) {
        case ChannelModel::Beeping: return observe_beeping(intents, g, v);
        case ChannelModel::NoCdMac: return observe_nocd(intents, g, v);
        case ChannelModel::CdMac: return observe_cd(intents, g, v);
        case ChannelModel::DirectMessaging: return observe_direct(intents, g, v);
    }
    return {};
}

std::vector<LocalObservation> observe_all(ChannelModel model, const RoundIntents& intents,
                                          const NetworkGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<LocalObservation> out(n);
    if (model == ChannelModel::DirectMessaging) {
        for (StationId v = 0; v < n; ++v) out[v] = observe_direct(intents, g, v);
        return out;
    }

    kernels::BitMask tx(n);
    for (StationId v = 0; v < n; ++v)
        if (intents[v].transmitting()) tx.set(v);
    std::vector<std::uint32_t> counts(n);
    kernels::masked_row_popcount(g.adjacency_bits(), tx, counts);

    for (StationId v = 0; v < n; ++v) {
        if (tx.test(v)) {
            out[v] = LocalObservation::of(Perception::SelfTransmitting);
            continue;
        }
        const std::uint32_t c = counts[v];
        if (model == ChannelModel::Beeping) {
            out[v] = LocalObservation::of(c == 0 ? Perception::Silence : Perception::Beep);
        } else if (c == 1) {
            auto sender = kernels::first_common_bit(g.adjacency_bits().row(v), tx.words());
            out[v] = transmission_from(intents, static_cast<StationId>(sender));
        } else if (model == ChannelModel::NoCdMac) {
            out[v] = LocalObservation::of(Perception::Noise);
        } else {
            out[v] = LocalObservation::of(c == 0 ? Perception::Silence : Perception::Collision);
        }
    }
    return out;
}

}  // namespace hidesim

#include "hidesim/digest.hpp"

namespace hidesim {

std::string intent_code(const Intent& intent) {
    switch (intent.kind) {
        case Intent::Kind::Silent: return "-";
        case Intent::Kind::Broadcast: return "T:" + to_hex(intent.payload);
        case Intent::Kind::Direct: {
            std::string out = "D:";
            for (std::size_t i = 0; i < intent.envelopes.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(intent.envelopes[i].to) + '=' + to_hex(intent.envelopes[i].payload);
            }
            return out;
        }
    }
    return "?";
}

namespace {
std::string deliveries_code(const std::vector<Delivery>& d) {
    std::string out = "{";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(d[i].from) + '=' + to_hex(d[i].payload);
    }
    return out + "}";
}
}  // namespace

std::string observation_code(const LocalObservation& obs) {
    switch (obs.state) {
        case Perception::SelfTransmitting:
            return obs.deliveries.empty() ? "X" : "X" + deliveries_code(obs.deliveries);
        case Perception::Beep: return "B";
        case Perception::Silence: return "S";
        case Perception::Noise: return "N";
        case Perception::Collision: return "C";
        case Perception::Transmission: return "T" + std::to_string(obs.sender) + ":" + to_hex(obs.payload);
        case Perception::Messages: return "M" + deliveries_code(obs.deliveries);
    }
    return "?";
}

}  // namespace hidesim
