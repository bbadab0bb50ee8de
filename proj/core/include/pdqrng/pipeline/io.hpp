#pragma once

#include "pdqrng/bits.hpp"
#include "pdqrng/laser/fit.hpp"
#include "pdqrng/laser/rate_equations.hpp"
#include "pdqrng/mzi/adc.hpp"
#include "pdqrng/mzi/interferometer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdqrng::pipeline {

/// time_s,photons,carriers,rsp_per_s,phase_var_rad2,power_w; every `stride`-th row.
void write_trajectory_csv(const std::filesystem::path& path, const laser::Trajectory& traj, std::size_t stride = 1);

/// j,u1_w,u2_w,theta_rad,uout_w,bin for the first `max_rows` records.
void write_pulses_csv(const std::filesystem::path& path, std::span<const mzi::PulseRecord> records,
                      std::span<const std::uint16_t> codes, std::size_t max_rows);

/// Two-column CSV time_s,power_w; one header line and lines starting with # are skipped.
laser::ObservedTrace read_observed_trace(const std::filesystem::path& path);
void write_observed_trace(const std::filesystem::path& path, const laser::ObservedTrace& trace);

std::vector<std::uint64_t> code_histogram(std::span<const std::uint16_t> codes, std::size_t levels);

/// bin,lower_w,upper_w,count; with `model` also a model_probability column.
void write_histogram_csv(const std::filesystem::path& path, std::span<const std::uint64_t> counts,
                         const mzi::AdcConfig& adc, std::span<const double> model = {});

/// lag,r
void write_autocorrelation_csv(const std::filesystem::path& path, std::span<const double> r);

/// Packed MSB-first bytes; the tail byte is zero padded.
void write_bits(const std::filesystem::path& path, const BitBuffer& bits);
/// Reads packed bits; `bit_count` trims the padding when known.
BitBuffer read_bits(const std::filesystem::path& path, std::optional<std::size_t> bit_count = std::nullopt);
/// One '0'/'1' character per bit, 64 per line.
void write_bits_text(const std::filesystem::path& path, BitView bits);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
std::string sha256_file(const std::filesystem::path& path);

} // namespace pdqrng::pipeline
