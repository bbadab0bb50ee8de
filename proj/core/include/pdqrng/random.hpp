#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace pdqrng {

/// Pipeline stages that consume randomness. The numeric value is part of the
/// substream derivation and must never be reordered.
enum class Stage : std::uint64_t {
    pulse_phases = 1,
    arm_powers = 2,
    detector_noise = 3,
    synthetic = 4,
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Seed for substream `index` of `stage` derived from the run seed.
///
/// The scheme is counter based: the 64-bit run seed, the stage id and the
/// chunk index are folded through SplitMix64, so chunk k of a stage produces
/// the same numbers no matter how many workers process the stage.
std::uint64_t substream_seed(std::uint64_t run_seed, Stage stage, std::uint64_t index) noexcept;

/// xoshiro256++ engine; satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256pp(std::uint64_t seed = 1) noexcept;
    Xoshiro256pp(std::uint64_t run_seed, Stage stage, std::uint64_t index) noexcept
        : Xoshiro256pp(substream_seed(run_seed, stage, index)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::array<std::uint64_t, 4> s_{};
};

/// Number of pulses generated from one RNG substream.
inline constexpr std::size_t kChunkSize = 1u << 16;

} // namespace pdqrng
