#pragma once

#include "pdqrng/mzi/interferometer.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace pdqrng::mzi {

struct AdcConfig {
    int resolution_bits = 14;          // b
    double dynamic_range = 5e-3;       // A_ADC, W
    double noise_variance = 1.45e-10;  // var(u_noise), W^2
    double sample_offset = 13e-12;     // s after the pulse peak

    double bin_size() const noexcept { return dynamic_range / static_cast<double>(1u << resolution_bits); }
    std::uint32_t levels() const noexcept { return 1u << resolution_bits; }
    /// Requires 1 <= b <= 16 (samples are stored as 16-bit words) and A_ADC > 0.
    void validate() const;
};

/// floor(u / bin), clamped to [0, 2^b - 1].
std::uint16_t digitize(double power, const AdcConfig& adc) noexcept;

/// One code per record.
std::vector<std::uint16_t> sample_and_digitize(std::span<const PulseRecord> records, const AdcConfig& adc);

/// Picks one value per pulse from a filtered waveform: the sample taken
/// `adc.sample_offset` after the peak of each period.
std::vector<double> sample_waveform(std::span<const double> waveform, std::size_t samples_per_period, double dt,
                                    const AdcConfig& adc);

/// Code midpoint in W.
double code_to_power(std::uint16_t code, const AdcConfig& adc) noexcept;

/// Binary sample format: little-endian unsigned 16-bit words, low b bits significant.
void write_samples(const std::filesystem::path& path, std::span<const std::uint16_t> codes);
std::vector<std::uint16_t> read_samples(const std::filesystem::path& path);

} // namespace pdqrng::mzi
