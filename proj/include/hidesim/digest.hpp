#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hidesim {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> data);
Sha256Digest sha256(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
// Throws std::invalid_argument on odd length or non-hex characters.
std::vector<std::uint8_t> from_hex(std::string_view hex);

// First 16 hex characters of the SHA-256 of `text`; used for config and graph fingerprints.
std::string short_hash(std::string_view text);

// SplitMix64 finalizer. Used for seed derivation only, never for protocol secrets.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of station `station` within a run seeded by `master`: master XOR mix64(station).
constexpr std::uint64_t station_seed(std::uint64_t master, std::uint64_t station) {
    return master ^ mix64(station);
}

// Seed of the `index`-th independent run of an experiment seeded by `experiment_seed`.
constexpr std::uint64_t run_seed(std::uint64_t experiment_seed, std::uint64_t index) {
    return mix64(experiment_seed ^ mix64(index + 1));
}

void append_le64(std::vector<std::uint8_t>& out, std::uint64_t value);
void append_le32(std::vector<std::uint8_t>& out, std::uint32_t value);

}  // namespace hidesim
