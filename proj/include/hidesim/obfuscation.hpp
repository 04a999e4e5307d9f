#pragma once

// Execution-hiding wrappers.
//
// Naive Oblivious: under direct messaging every station sends exactly one
// (l+1)-byte message to every neighbor in each of N slots. Real messages
// carry a 0x01 prefix byte; dummies are all zero. A beep-detecting adversary
// sees 1^N whatever the inner algorithm does.
//
// Binomial Boxes (BBA): every slot of the inner algorithm becomes a box of
// B+1 slots. One slot per box, chosen from a secret shared by all stations,
// runs the inner slot; each of the other B slots is a beep dummy (everybody
// transmits) or a silent dummy (nobody does), each with probability 1/2.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hidesim/engine.hpp"

namespace hidesim {

// Key material known to every station and never to the adversary. Not
// printable: traces, feedback files and manifests never contain it.
class SharedSecret {
public:
    static constexpr std::size_t kSize = 32;

    explicit SharedSecret(const std::array<std::uint8_t, kSize>& bytes) : bytes_(bytes) {}
    // Exactly 64 hex digits. Throws ConfigError otherwise.
    static SharedSecret from_hex(std::string_view hex);
    // SHA-256("hidesim/secret" || le64(seed)).
    static SharedSecret derive(std::uint64_t seed);

    std::span<const std::uint8_t> bytes() const { return bytes_; }
    friend bool operator==(const SharedSecret&, const SharedSecret&) = default;

private:
    std::array<std::uint8_t, kSize> bytes_;
};

enum class DummyKind : std::uint8_t { Silent, Beep };

struct BoxSchedule {
    std::uint32_t true_slot = 0;
    // One entry per non-true slot, in increasing slot order.
    std::vector<DummyKind> dummy_kinds;

    std::uint32_t dummy_slots() const { return static_cast<std::uint32_t>(dummy_kinds.size()); }
    std::uint32_t box_size() const { return dummy_slots() + 1; }
    // Kind of slot `slot` (must differ from true_slot).
    DummyKind dummy_at(std::uint32_t slot) const {
        return dummy_kinds[slot < true_slot ? slot : slot - 1];
    }
    std::uint32_t beep_dummies() const;
    friend bool operator==(const BoxSchedule&, const BoxSchedule&) = default;
};

// Deterministic schedule of box `box_index` with B dummy slots.
//
// Key K = SHA-256("hidesim/bba" || secret || le64(box_index) || le32(B)); the
// byte stream is SHA-256(K || le32(0)) || SHA-256(K || le32(1)) || ...,
// read as little-endian 64-bit words. The true slot is the first word below
// the largest multiple of B+1, reduced mod B+1 (rejection keeps it exactly
// uniform); the B dummy kinds are the following bits, LSB first, 1 = Beep.
BoxSchedule bba_schedule(const SharedSecret& secret, std::uint64_t box_index, std::uint32_t dummy_slots);

class ScheduleSource {
public:
    virtual ~ScheduleSource() = default;
    virtual BoxSchedule box(std::uint64_t index) const = 0;
    virtual std::uint32_t dummy_slots() const = 0;
};

std::shared_ptr<const ScheduleSource> secret_schedule(SharedSecret secret, std::uint32_t dummy_slots);
// Replays given boxes; asking for a box past the end throws std::out_of_range.
std::shared_ptr<const ScheduleSource> fixed_schedule(std::vector<BoxSchedule> boxes);

struct NaiveObliviousParams {
    std::size_t rounds = 1;          // N: public bound on the inner execution length
    std::size_t message_length = 1;  // l: every real message is exactly l bytes
};

struct BbaParams {
    std::shared_ptr<const ScheduleSource> schedule;
    std::size_t boxes = 1;  // k: inner execution length
};

inline constexpr std::uint8_t kRealFlag = 0x01;
inline constexpr std::uint8_t kDummyFlag = 0x00;

// Public constant carried by beep-dummy transmissions under MAC channels.
inline const Payload kBbaDummyPayload{};

ProgramFactory naive_oblivious_wrap(ProgramFactory inner, NaiveObliviousParams params);
ProgramFactory bba_wrap(ProgramFactory inner, BbaParams params);

// Restricts a BBA-wrapped trace to its true slots, re-indexed 0..k-1.
// Throws std::invalid_argument when the length is not a multiple of B+1.
ExecutionTrace bba_unwrap(const ExecutionTrace& trace, const ScheduleSource& schedule);

}  // namespace hidesim
