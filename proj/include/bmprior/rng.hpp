#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace bmprior {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for stream `stream` (and optional sub-stream) of a run seeded by `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t substream = 0) noexcept;

/// 64-bit Mersenne Twister with platform-independent conversions to doubles,
/// indices and spins. std::uniform_*_distribution is implementation-defined,
/// so the conversions are done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) {
        return Rng(derive_seed(seed, stream, substream));
    }

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        const unsigned __int128 product = static_cast<unsigned __int128>(engine_()) * n;
        return static_cast<std::size_t>(product >> 64);
    }

    std::int8_t spin() { return (engine_() >> 63) != 0 ? std::int8_t{1} : std::int8_t{-1}; }

    // Standard normal via Box-Muller (one value per call).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace bmprior
