#pragma once

#include <cstdint>

namespace ddk {

// Counter-based generator: output i is the SplitMix64 finalizer applied to
// key + (i + 1) * 0x9E3779B97F4A7C15, with key = mix(mix(seed) + stream * 0x9E3779B97F4A7C15).
// Given (seed, stream) the sequence is fixed on every platform; distinct
// streams give independent sequences for per-day or per-seed work.
class SeededGenerator {
public:
    static constexpr const char* kAlgorithm = "splitmix64-ctr";

    explicit SeededGenerator(std::uint64_t seed, std::uint64_t stream = 0);

    // Generator whose key is given directly; reproduces the reference
    // SplitMix64 sequence started from state `key`.
    static SeededGenerator from_key(std::uint64_t key);

    std::uint64_t next_u64();

    double uniform();       // [0, 1), 53-bit resolution
    double uniform_open();  // (0, 1)
    std::uint64_t uniform_index(std::uint64_t n);  // [0, n), unbiased
    double normal();        // standard normal, Box-Muller
    double exponential();   // unit rate

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t counter() const { return counter_; }

private:
    SeededGenerator() = default;

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace ddk
