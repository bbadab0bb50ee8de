#pragma once

#include "pdqrng/laser/params.hpp"
#include "pdqrng/laser/rate_equations.hpp"

#include <map>
#include <string>
#include <vector>

namespace pdqrng::laser {

/// Detected optical power versus time, in the drive's time frame (t = 0 at
/// drive phase zero, as when the scope is triggered by the system clock).
struct ObservedTrace {
    std::vector<double> times; // s
    std::vector<double> power; // W
};

/// Everything the fit holds fixed.
struct FitSetup {
    LaserDevice device;              // cavity_length and mirror_loss are replaced per candidate
    DriveWaveform drive;             // duration is replaced to cover the trace
    double threshold_current = 10e-3; // I_th', A
    double threshold_power = 0.3e-3;  // measured CW power at I_th', W
    double detector_bandwidth = 12.5e9;
    double s_init = 1.0;
    double n_init = 0.0;
};

struct FitOptions {
    double s_sat_min = 1e4;
    double s_sat_max = 1e7;
    int s_sat_points = 30;
    /// Allowed undershoot of the simulated power, as a fraction of the observed
    /// peak. Zero is the strict envelope; a small margin keeps the feasible set
    /// non-degenerate when the model reproduces the trace exactly.
    double envelope_tolerance = 0.01;
    int gain_grid_points = 48;
    /// Gain search range in units of the smallest admissible gain gamma / n_th.
    double gain_span = 1000.0;
    int refine_iterations = 40;
    unsigned threads = 1;
};

struct FitCandidate {
    double cavity_length = 0;
    double photon_saturation = 0;
    bool feasible = false;
    double gain_per_carrier = 0;
    double rms_deviation = 0; // W
    double max_violation = 0; // fraction of observed peak
    std::string note;
};

struct FitResult {
    LaserParams params;
    double rms_deviation = 0;
    std::vector<FitCandidate> candidates;
    std::map<std::string, std::string> provenance;
};

/// Envelope of a simulated trajectory as seen by the detector, sampled at the
/// observed times.
std::vector<double> simulated_detection(const LaserParams& params, const FitSetup& setup,
                                        const std::vector<double>& times);

/// Recursive parameter extraction.
///
/// For every cavity length in `candidate_lengths` and every s_sat on a
/// logarithmic grid (which always contains `initial_s_sat`): solve the
/// near-threshold steady state for (n_th, R0), choose the largest G_N whose
/// filtered simulation stays above the observed power at every sample, and
/// score the candidate by RMS deviation. The best-scoring candidate wins.
///
/// Throws ConfigError for traces shorter than two drive periods or empty
/// candidate lists, and InfeasibleFitError when no candidate satisfies the
/// envelope constraint.
FitResult fit_parameters(const ObservedTrace& observed, const std::vector<double>& candidate_lengths,
                         double initial_s_sat, const FitSetup& setup, const FitOptions& options = {});

} // namespace pdqrng::laser
