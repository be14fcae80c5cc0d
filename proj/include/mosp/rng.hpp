#pragma once

// Portable random numbers. Everything here is defined bit-for-bit so that a
// seed produces the same experiment on every platform and standard library;
// std::uniform_*_distribution and std::shuffle do not give that guarantee.
//
// Stream splitting: a master seed is never used directly. Each purpose
// (topology, costs, endpoint pairs, exploration) gets its own substream seed
// from derive_seed(master, stream, index), so adding draws to one purpose
// never perturbs another.

#include <bit>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace mosp {

/// SplitMix64: seeds the main generator and mixes substream keys.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        return mix(z);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** seeded through SplitMix64. Satisfies
/// UniformRandomBitGenerator, but prefer the member helpers for
/// reproducibility.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit constexpr Rng(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto& word : s_) word = sm.next();
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept { return next_u64(); }

    constexpr std::uint64_t next_u64() noexcept {
        const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [low, high); returns low when low == high.
    constexpr double uniform(double low, double high) noexcept {
        return low + (high - low) * uniform();
    }

    /// Unbiased integer in [0, n), n > 0 (Lemire's multiply-and-reject).
    std::uint64_t below(std::uint64_t n) noexcept {
        __extension__ using u128 = unsigned __int128;
        u128 m = static_cast<u128>(next_u64()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<u128>(next_u64()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t s_[4]{};
};

enum class Stream : std::uint64_t {
    kTopology = 1,
    kCosts = 2,
    kPairs = 3,
    kExploration = 4,
};

/// Seed of substream (stream, index) under a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index = 0) noexcept {
    std::uint64_t h = SplitMix64::mix(master ^ 0x6A09E667F3BCC909ULL);
    h = SplitMix64::mix(h + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(stream));
    h = SplitMix64::mix(h ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return h;
}

}  // namespace mosp
