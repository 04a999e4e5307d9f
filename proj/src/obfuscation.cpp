#include "hidesim/obfuscation.hpp"

#include <algorithm>
#include <stdexcept>

#include "hidesim/digest.hpp"

namespace hidesim {

SharedSecret SharedSecret::from_hex(std::string_view hex) {
    std::vector<std::uint8_t> raw;
    try {
        raw = hidesim::from_hex(hex);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("shared secret: ") + e.what());
    }
    if (raw.size() != kSize) throw ConfigError("shared secret must be exactly 64 hex digits");
    std::array<std::uint8_t, kSize> bytes{};
    std::copy(raw.begin(), raw.end(), bytes.begin());
    return SharedSecret(bytes);
}

SharedSecret SharedSecret::derive(std::uint64_t seed) {
    std::vector<std::uint8_t> msg{'h', 'i', 'd', 'e', 's', 'i', 'm', '/', 's', 'e', 'c', 'r', 'e', 't'};
    append_le64(msg, seed);
    return SharedSecret(sha256(msg));
}

std::uint32_t BoxSchedule::beep_dummies() const {
    return static_cast<std::uint32_t>(std::count(dummy_kinds.begin(), dummy_kinds.end(), DummyKind::Beep));
}

namespace {

class HashStream {
public:
    explicit HashStream(const Sha256Digest& key) : key_(key.begin(), key.end()) {}

    std::uint64_t next_word() {
        if (offset_ + 8 > block_.size()) refill();
        std::uint64_t w = 0;
        for (int i = 0; i < 8; ++i) w |= static_cast<std::uint64_t>(block_[offset_ + i]) << (8 * i);
        offset_ += 8;
        return w;
    }

    bool next_bit() {
        if (bits_left_ == 0) {
            bits_ = next_word();
            bits_left_ = 64;
        }
        bool b = bits_ & 1ULL;
        bits_ >>= 1;
        --bits_left_;
        return b;
    }

private:
    void refill() {
        std::vector<std::uint8_t> msg = key_;
        append_le32(msg, counter_++);
        block_ = sha256(msg);
        offset_ = 0;
    }

    std::vector<std::uint8_t> key_;
    Sha256Digest block_{};
    std::size_t offset_ = 32;
    std::uint32_t counter_ = 0;
    std::uint64_t bits_ = 0;
    int bits_left_ = 0;
};

}  // namespace

BoxSchedule bba_schedule(const SharedSecret& secret, std::uint64_t box_index, std::uint32_t dummy_slots) {
    if (dummy_slots < 1) throw ConfigError("BBA needs at least one dummy slot per box");
    std::vector<std::uint8_t> key_msg{'h', 'i', 'd', 'e', 's', 'i', 'm', '/', 'b', 'b', 'a'};
    key_msg.insert(key_msg.end(), secret.bytes().begin(), secret.bytes().end());
    append_le64(key_msg, box_index);
    append_le32(key_msg, dummy_slots);
    HashStream stream(sha256(key_msg));

    const std::uint64_t box = static_cast<std::uint64_t>(dummy_slots) + 1;
    const std::uint64_t limit = (~0ULL / box) * box;
    std::uint64_t word = stream.next_word();
    while (word >= limit) word = stream.next_word();

    BoxSchedule s;
    s.true_slot = static_cast<std::uint32_t>(word % box);
    s.dummy_kinds.reserve(dummy_slots);
    for (std::uint32_t i = 0; i < dummy_slots; ++i)
        s.dummy_kinds.push_back(stream.next_bit() ? DummyKind::Beep : DummyKind::Silent);
    return s;
}

namespace {

class SecretSchedule final : public ScheduleSource {
public:
    SecretSchedule(SharedSecret secret, std::uint32_t dummy_slots)
        : secret_(std::move(secret)), dummy_slots_(dummy_slots) {
        if (dummy_slots_ < 1) throw ConfigError("BBA needs at least one dummy slot per box");
    }
    BoxSchedule box(std::uint64_t index) const override { return bba_schedule(secret_, index, dummy_slots_); }
    std::uint32_t dummy_slots() const override { return dummy_slots_; }

private:
    SharedSecret secret_;
    std::uint32_t dummy_slots_;
};

class FixedSchedule final : public ScheduleSource {
public:
    explicit FixedSchedule(std::vector<BoxSchedule> boxes) : boxes_(std::move(boxes)) {
        if (boxes_.empty()) throw ConfigError("fixed schedule needs at least one box");
        for (const auto& b : boxes_) {
            if (b.dummy_slots() != boxes_.front().dummy_slots() || b.dummy_slots() < 1)
                throw ConfigError("fixed schedule boxes must share one positive size");
            if (b.true_slot > b.dummy_slots()) throw ConfigError("true slot outside its box");
        }
    }
    BoxSchedule box(std::uint64_t index) const override {
        if (index >= boxes_.size()) throw std::out_of_range("fixed schedule has no box " + std::to_string(index));
        return boxes_[index];
    }
    std::uint32_t dummy_slots() const override { return boxes_.front().dummy_slots(); }

private:
    std::vector<BoxSchedule> boxes_;
};

class NaiveObliviousProgram final : public StationProgram {
public:
    NaiveObliviousProgram(std::unique_ptr<StationProgram> inner, NaiveObliviousParams params)
        : inner_(std::move(inner)), params_(params) {}

    StepResult step(const StepContext& ctx, const std::optional<LocalObservation>& last) override {
        if (ctx.channel != ChannelModel::DirectMessaging)
            throw ConfigError("naive oblivious requires the direct messaging channel");
        if (ctx.round >= params_.rounds) throw std::logic_error("naive oblivious stepped past N");

        std::optional<LocalObservation> inner_last;
        if (last) inner_last = strip(*last);

        Intent real = Intent::silent();
        if (!inner_done_) {
            StepResult res = inner_->step(ctx, inner_last);
            inner_done_ = res.terminate;
            real = std::move(res.intent);
        }
        inner_transmitted_ = real.transmitting();

        std::vector<Envelope> out;
        out.reserve(ctx.neighbors.size());
        for (StationId u : ctx.neighbors) {
            const Payload* m = addressed_to(real, u);
            Payload wire;
            if (m) {
                if (m->size() != params_.message_length)
                    throw ConfigError("inner message of " + std::to_string(m->size()) +
                                      " bytes, expected exactly l = " + std::to_string(params_.message_length));
                wire.reserve(m->size() + 1);
                wire.push_back(kRealFlag);
                wire.insert(wire.end(), m->begin(), m->end());
            } else {
                wire.assign(params_.message_length + 1, kDummyFlag);
            }
            out.push_back(Envelope{u, std::move(wire)});
        }

        bool final_slot = ctx.round + 1 == params_.rounds;
        if (final_slot && !inner_done_)
            throw ConfigError("inner algorithm runs longer than N = " + std::to_string(params_.rounds));
        return {Intent::direct(std::move(out)), final_slot};
    }

    std::string memory() const override { return inner_->memory(); }

private:
    static const Payload* addressed_to(const Intent& in, StationId u) {
        if (in.kind == Intent::Kind::Broadcast) return &in.payload;
        if (in.kind == Intent::Kind::Direct)
            for (const auto& e : in.envelopes)
                if (e.to == u) return &e.payload;
        return nullptr;
    }

    // The inner algorithm sees exactly the real traffic it would see unwrapped.
    LocalObservation strip(const LocalObservation& wire) const {
        LocalObservation obs = LocalObservation::of(inner_transmitted_ ? Perception::SelfTransmitting
                                                                       : Perception::Messages);
        for (const auto& d : wire.deliveries) {
            if (d.payload.empty() || d.payload.front() != kRealFlag) continue;
            obs.deliveries.push_back(Delivery{d.from, Payload(d.payload.begin() + 1, d.payload.end())});
        }
        return obs;
    }

    std::unique_ptr<StationProgram> inner_;
    NaiveObliviousParams params_;
    bool inner_done_ = false;
    bool inner_transmitted_ = false;
};

class BbaProgram final : public StationProgram {
public:
    BbaProgram(std::unique_ptr<StationProgram> inner, BbaParams params)
        : inner_(std::move(inner)), params_(std::move(params)),
          box_size_(params_.schedule->dummy_slots() + 1) {}

    StepResult step(const StepContext& ctx, const std::optional<LocalObservation>& last) override {
        if (ctx.channel == ChannelModel::DirectMessaging)
            throw ConfigError("binomial boxes requires the beeping or a MAC channel");

        if (previous_was_true_ && last) pending_ = *last;

        const std::size_t box = ctx.round / box_size_;
        const auto slot = static_cast<std::uint32_t>(ctx.round % box_size_);
        if (slot == 0 || !current_) current_ = params_.schedule->box(box);
        const bool final_slot = ctx.round + 1 >= params_.boxes * box_size_;

        if (slot == current_->true_slot) {
            previous_was_true_ = true;
            if (inner_done_) return {Intent::silent(), final_slot};
            StepContext inner_ctx{box, ctx.station, ctx.neighbors, ctx.channel, ctx.rng};
            StepResult res = inner_->step(inner_ctx, pending_);
            pending_.reset();
            inner_done_ = res.terminate;
            return {std::move(res.intent), final_slot};
        }
        previous_was_true_ = false;
        if (current_->dummy_at(slot) == DummyKind::Beep) return {Intent::broadcast(kBbaDummyPayload), final_slot};
        return {Intent::silent(), final_slot};
    }

    std::string memory() const override { return inner_->memory(); }

private:
    std::unique_ptr<StationProgram> inner_;
    BbaParams params_;
    std::size_t box_size_;
    std::optional<BoxSchedule> current_;
    std::optional<LocalObservation> pending_;
    bool previous_was_true_ = false;
    bool inner_done_ = false;
};

}  // namespace

std::shared_ptr<const ScheduleSource> secret_schedule(SharedSecret secret, std::uint32_t dummy_slots) {
    return std::make_shared<SecretSchedule>(std::move(secret), dummy_slots);
}

std::shared_ptr<const ScheduleSource> fixed_schedule(std::vector<BoxSchedule> boxes) {
    return std::make_shared<FixedSchedule>(std::move(boxes));
}

ProgramFactory naive_oblivious_wrap(ProgramFactory inner, NaiveObliviousParams params) {
    if (params.rounds < 1) throw ConfigError("naive oblivious needs N >= 1");
    return [inner = std::move(inner), params](StationId v, const NetworkGraph& g) {
        return std::make_unique<NaiveObliviousProgram>(inner(v, g), params);
    };
}

ProgramFactory bba_wrap(ProgramFactory inner, BbaParams params) {
    if (!params.schedule) throw ConfigError("binomial boxes needs a schedule");
    if (params.boxes < 1) throw ConfigError("binomial boxes needs k >= 1");
    return [inner = std::move(inner), params](StationId v, const NetworkGraph& g) {
        return std::make_unique<BbaProgram>(inner(v, g), params);
    };
}

ExecutionTrace bba_unwrap(const ExecutionTrace& trace, const ScheduleSource& schedule) {
    const std::size_t box_size = schedule.dummy_slots() + 1;
    if (trace.length() % box_size != 0)
        throw std::invalid_argument("trace length " + std::to_string(trace.length()) +
                                    " is not a multiple of the box size " + std::to_string(box_size));
    ExecutionTrace out{trace.graph, trace.channel, trace.seed, trace.algorithm, {}, trace.final_memories};
    const std::size_t boxes = trace.length() / box_size;
    out.rounds.reserve(boxes);
    for (std::size_t b = 0; b < boxes; ++b)
        out.rounds.push_back(trace.rounds[b * box_size + schedule.box(b).true_slot]);
    return out;
}

}  // namespace hidesim
