#include "prioritymac/rng.hpp"

#include <stdexcept>

namespace pmac {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {
    std::uint64_t mix = seed;
    const std::uint64_t salt = splitmix64(mix);
    std::uint64_t x = salt ^ (stream_id * 0xD1B54A32D192ED03ULL + 0x2545F4914F6CDD1DULL);
    for (auto& word : state_) {
        word = splitmix64(x);
    }
    // xoshiro must not start from the all-zero state.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
        state_[0] = 1;
    }
}

std::uint64_t RngStream::next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

std::uint64_t RngStream::uniform(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("RngStream::uniform: bound must be positive");
    }
    // Reject the low tail so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

double RngStream::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

}  // namespace pmac
