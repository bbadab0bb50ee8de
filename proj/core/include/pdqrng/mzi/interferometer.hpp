#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pdqrng::mzi {

/// Field transmission coefficients of one polarization-maintaining coupler.
struct Coupler {
    double through = 0.70710678118654752; // eps_11
    double cross = 0.70710678118654752;   // eps_12 (first coupler) / eps_21 (second)
};

/// Unbalanced Mach-Zehnder interferometer.
struct InterferometerConfig {
    Coupler coupler1;
    Coupler coupler2;
    double arm1_delay = 0.0;              // t1, s
    double arm2_delay = 1.0 / 5.825e9;    // t2, s
    double static_phase = 0.0;            // delta phi, rad
    double visibility = 0.9;              // |g|
    double detector_bandwidth = 12.5e9;   // Hz

    /// Throws ConfigError on lossy-beyond-unity couplers or |g| outside [0, 1].
    /// When `prf` is given, also requires t2 - t1 = 1/prf (relative 1e-3).
    void validate(std::optional<double> prf = std::nullopt) const;

    /// |eps_11^(1) eps_11^(2)|^2: fraction of laser power reaching the output via arm 1.
    double arm1_transmission() const noexcept;
    /// |eps_12^(1) eps_21^(2)|^2.
    double arm2_transmission() const noexcept;
};

struct PulseRecord {
    std::size_t index = 0;    // j
    double arm1_power = 0;    // u1, W
    double arm2_power = 0;    // u2, W
    double phase = 0;         // theta_j, rad
    double output_power = 0;  // u_out, W, after noise and clamping at 0
    double noise = 0;         // u_noise, W
};

/// Gaussian fluctuation model of the per-pulse arm powers.
struct ArmPowerModel {
    double mean1 = 0.97e-3;  // W
    double mean2 = 0.90e-3;  // W
    double sigma1 = 45e-6;   // W
    double sigma2 = 45e-6;   // W
};

/// Draws per-pulse (u1, u2), each clamped at 0, from substreams of Stage::arm_powers.
struct ArmPowers {
    std::vector<double> arm1;
    std::vector<double> arm2;
};
ArmPowers sample_arm_powers(const ArmPowerModel& model, std::size_t count, std::uint64_t seed);

/// Interferes each pulse with its predecessor:
///   u_out = u1 + u2 + 2|g| sqrt(u1 u2) cos(theta_j - theta_{j-1} + delta phi) + u_noise
/// with zero-mean Gaussian noise of variance `noise_variance` drawn from
/// substreams of Stage::detector_noise. Record 0 has no predecessor and is
/// omitted, so N pulses yield N - 1 records.
///
/// Throws ConfigError on length mismatch or fewer than two pulses.
std::vector<PulseRecord> interfere_pulse_train(std::span<const double> u1, std::span<const double> u2,
                                               std::span<const double> phases, const InterferometerConfig& cfg,
                                               double noise_variance, std::uint64_t seed);

/// Moments entering the visibility estimate.
struct VisibilityInputs {
    double var_out = 0;    // W^2
    double var_u1 = 0;     // W^2
    double var_u2 = 0;     // W^2
    double var_noise = 0;  // W^2
    double mean_sqrt_u1_sq = 0; // E[sqrt(u1)]^2, W
    double mean_sqrt_u2_sq = 0; // E[sqrt(u2)]^2, W
};

struct VisibilityEstimate {
    double value = 0;     // |g| in [0, 1]
    double raw = 0;       // unclamped estimate (NaN-free; 0 when degenerate)
    bool clamped = false; // raw value exceeded 1
    bool degenerate = false; // numerator was negative
};

/// |g| = sqrt((var_out - var_u1 - var_u2 - var_noise) / (2 E[sqrt u1]^2 E[sqrt u2]^2)).
/// Throws PreconditionError when the denominator is not positive.
VisibilityEstimate estimate_visibility(const VisibilityInputs& in);

/// Full-waveform interference: the output waveform is the sum of the laser
/// field delayed by each arm, with the carrier phase of pulse j applied to the
/// samples of period j. Powers are sampled on a uniform grid of
/// `samples_per_period` points per pulse.
std::vector<double> interfere_waveforms(std::span<const double> laser_power, std::size_t samples_per_period,
                                        std::span<const double> phases, const InterferometerConfig& cfg);

} // namespace pdqrng::mzi
