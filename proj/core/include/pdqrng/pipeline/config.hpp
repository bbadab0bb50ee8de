#pragma once

#include "pdqrng/extractor.hpp"
#include "pdqrng/laser/fit.hpp"
#include "pdqrng/laser/params.hpp"
#include "pdqrng/laser/rate_equations.hpp"
#include "pdqrng/mzi/adc.hpp"
#include "pdqrng/mzi/interferometer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pdqrng::pipeline {

struct LaserSection {
    laser::LaserDevice device;
    double photon_saturation = 7.7e5;
    double carriers_threshold = 5.62e7;
    double spont_coupling = 8.8e-4;
    double gain_per_carrier = 2.3e4;
    double photon_floor = 1.0;
    double s_init = 1.0;
    double n_init = 0.0;
    bool fit_mode = false;
    std::filesystem::path reference_trace;  // observed pulse trace, time_s,power_w

    laser::LaserParams params() const;
};

struct DriveSection {
    double dc_bias = 15e-3;                    // A
    std::optional<double> rf_amplitude;        // A; derived from the reverse-bias fraction when unset
    double reverse_bias_fraction = 0.4;
    double prf = 5.825e9;                      // Hz
    std::size_t periods = 20;
    std::size_t steps_per_period = 1000;
    std::filesystem::path shape_trace;         // one-column normalized RF period; sinusoid when empty

    laser::DriveWaveform waveform() const;
};

struct InterferometerSection {
    mzi::InterferometerConfig mzi;
    mzi::ArmPowerModel arms;
};

struct RunSection {
    std::size_t pulses = 1000000;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";
    std::optional<double> phase_variance;  // rad^2 per interval; from the trajectory when unset
    std::size_t pulse_csv_rows = 10000;
    std::size_t trajectory_stride = 1;
    std::size_t autocorrelation_lags = 50;
};

struct ExtractionSection {
    std::string hash = "whirlpool";
    std::size_t block_bits = 512;
    std::optional<double> reduction_factor;  // from the entropy report when unset
    bool text_output = false;
};

struct StatsSection {
    std::size_t seq_len = 1000000;
    std::size_t sequences = 0;  // 0 uses every full sequence
    double alpha = 0.01;
    int symbol_bits = 7;
    std::size_t max_lag = 50;
};

struct CertifySection {
    double min_entropy_threshold = 1.0;  // bits
    bool explicit_statistics = false;    // use the values below instead of samples + manifest
    double var_out = 0;          // W^2
    double var_u1 = 0;           // W^2
    double var_u2 = 0;           // W^2
    double var_noise = 0;        // W^2
    double mean_sqrt_u1_sq = 0;  // W
    double mean_sqrt_u2_sq = 0;  // W
};

struct FitSection {
    std::vector<double> candidate_lengths{500e-6};
    double initial_photon_saturation = 7.7e5;
    double threshold_current = 10e-3;
    double threshold_power = 0.3e-3;
    laser::FitOptions options;
};

struct PipelineConfig {
    LaserSection laser;
    DriveSection drive;
    InterferometerSection interferometer;
    mzi::AdcConfig adc;
    RunSection run;
    ExtractionSection extraction;
    StatsSection stats;
    CertifySection certify;
    FitSection fit;

    /// Checks every section against its module invariants and that referenced
    /// files exist. Throws ConfigError.
    void validate() const;
};

/// Reference configuration.
PipelineConfig default_config();

/// Reads an INI file. Keys not present keep their defaults; unknown sections
/// or keys are rejected. Relative paths resolve against the file's directory.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});

/// Canonical INI text: every key, fixed order, round-trip precision.
std::string to_ini(const PipelineConfig& cfg);

} // namespace pdqrng::pipeline
