#ifndef ULTRADIFF_RNG_HPP
#define ULTRADIFF_RNG_HPP

#include <array>
#include <cstdint>

namespace ultradiff {

/// SplitMix64; expands a 64-bit seed into xoshiro state.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

/// xoshiro256** 1.0 (Blackman & Vigna). jump() advances 2^128 steps, giving
/// non-overlapping per-path substreams from one master seed.
class Xoshiro256StarStar {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256StarStar(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm.next();
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

    void jump() {
        static constexpr std::array<std::uint64_t, 4> kJump = {
            0x180ec6d33cfd0abaull, 0xd5a61266f0c9392cull,
            0xa9582618e03fc9aaull, 0x39abdc4529b1661cull};
        std::array<std::uint64_t, 4> acc{};
        for (std::uint64_t word : kJump) {
            for (int b = 0; b < 64; ++b) {
                if (word & (1ull << b)) {
                    for (std::size_t i = 0; i < s_.size(); ++i) acc[i] ^= s_[i];
                }
                operator()();
            }
        }
        s_ = acc;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace ultradiff

#endif
