#pragma once

#include "pdqrng/entropy.hpp"
#include "pdqrng/errors.hpp"
#include "pdqrng/laser/filter.hpp"
#include "pdqrng/laser/fit.hpp"
#include "pdqrng/mzi/interferometer.hpp"
#include "pdqrng/pipeline/config.hpp"
#include "pdqrng/stats.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pdqrng::pipeline {

enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 1,
    exit_stage_failure = 2,
    exit_below_threshold = 3,
};

/// A stage failed; the message names the stage and the cause.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& cause, int exit_code);
    const std::string& stage() const noexcept { return stage_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

/// Maps an exception to a process exit code: configuration, validation and
/// precondition errors are 1, everything else is a stage failure (2).
int exit_code_for(const std::exception& e) noexcept;

struct RunOptions {
    unsigned threads = 1;
    std::ostream* log = nullptr;
};

std::string config_sha256(const PipelineConfig& cfg);

struct ArmStatistics {
    double mean_u1 = 0;          // W
    double mean_u2 = 0;          // W
    double var_u1 = 0;           // W^2
    double var_u2 = 0;           // W^2
    double mean_sqrt_u1_sq = 0;  // E[sqrt u1]^2, W
    double mean_sqrt_u2_sq = 0;  // E[sqrt u2]^2, W
};
ArmStatistics arm_statistics(std::span<const double> u1, std::span<const double> u2);

struct SimulateResult {
    std::filesystem::path samples;
    std::size_t pulses = 0;
    std::size_t records = 0;
    laser::LaserParams params;
    double phase_variance = 0;       // from the trajectory, rad^2 per interval
    double phase_variance_used = 0;  // drives the pulse phases
    laser::PulseShape pulse;         // last filtered pulse
    ArmStatistics arms;
    std::vector<std::filesystem::path> files;
};

/// Integrates the laser, draws the pulse train, interferes, digitizes and
/// writes trajectory.csv, pulses.csv, samples.bin, histograms.csv,
/// raw_autocorrelation.csv, config.ini and manifest.json into run.out_dir.
/// With laser.fit_mode the rate-equation parameters come from a fit first.
SimulateResult cmd_simulate(const PipelineConfig& cfg, const RunOptions& opt = {});

struct CertifyResult {
    entropy::EntropyReport report;
    mzi::VisibilityEstimate visibility;
    std::filesystem::path report_path;
    bool passed = false;  // h_exact >= threshold
};

/// Estimates the visibility from the samples and the arm statistics of the
/// run manifest next to them (or the explicit [certify] statistics, in which
/// case the samples are not read) and writes
/// the entropy report. A zero span or an entropy below the threshold yields a
/// report with passed = false.
CertifyResult cmd_certify(const std::filesystem::path& samples, const PipelineConfig& cfg,
                          const std::filesystem::path& report_path, const RunOptions& opt = {});

struct ExtractResult {
    std::filesystem::path output;
    std::size_t output_bits = 0;
    std::size_t blocks = 0;
    std::size_t dropped_bits = 0;
    std::size_t dropped_samples = 0;
    double reduction_factor = 0;
};

/// Hashes the samples at the report's reduction factor (or the configured
/// override). Refuses with ConfigError when RF < 1.
ExtractResult cmd_extract(const std::filesystem::path& samples, const std::filesystem::path& report,
                          const std::filesystem::path& output, const PipelineConfig& cfg,
                          const RunOptions& opt = {});

struct TestResult {
    stats::BatterySummary battery;
    std::size_t bits = 0;
    std::size_t symbols = 0;
    double max_deviation_sigmas = 0;  // max |delta_i| / sigma
    double autocorrelation_rms = 0;
    double autocorrelation_max = 0;
    double autocorrelation_bound = 0; // 3 / sqrt(symbols)
    bool all_pass = false;
    std::vector<std::string> warnings;
};

/// Runs the battery, the symbol uniformity and the autocorrelation analysis on
/// a packed bit file and writes battery_report.json, battery.csv, pvalues.csv,
/// uniformity.csv and autocorrelation.csv into `out_dir`. Without
/// `bit_count` the count recorded by cmd_extract is used when available.
TestResult cmd_test(const std::filesystem::path& bits, const PipelineConfig& cfg,
                    const std::filesystem::path& out_dir, std::optional<std::size_t> bit_count = std::nullopt,
                    const RunOptions& opt = {});

/// Fits the rate-equation parameters to laser.reference_trace and writes
/// fit_report.json and fit_trace.csv into `out_dir`.
laser::FitResult cmd_fit(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                         const RunOptions& opt = {});

struct RunAllResult {
    SimulateResult simulate;
    CertifyResult certify;
    std::optional<ExtractResult> extract;
    std::optional<TestResult> test;
    int exit_code = exit_ok;
};

/// simulate, certify, extract, test in run.out_dir; stops with exit code 3
/// when certification fails.
RunAllResult cmd_run_all(const PipelineConfig& cfg, const RunOptions& opt = {});

} // namespace pdqrng::pipeline
