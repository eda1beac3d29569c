#include "ddk/random.hpp"

#include <cmath>
#include <numbers>

namespace ddk {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SeededGenerator::SeededGenerator(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(mix64(mix64(seed) + stream * kGamma)) {}

SeededGenerator SeededGenerator::from_key(std::uint64_t key) {
    SeededGenerator g;
    g.key_ = key;
    return g;
}

std::uint64_t SeededGenerator::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

double SeededGenerator::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double SeededGenerator::uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t SeededGenerator::uniform_index(std::uint64_t n) {
    // Lemire's multiply-and-reject
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double SeededGenerator::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double SeededGenerator::exponential() { return -std::log(uniform_open()); }

}  // namespace ddk
