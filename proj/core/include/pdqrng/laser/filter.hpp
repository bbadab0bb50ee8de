#pragma once

#include <span>
#include <vector>

namespace pdqrng::laser {

/// Detector time constant 0.35 / bandwidth.
double filter_time_constant(double bandwidth);

/// Causal single-pole recursive low-pass filter of a uniformly sampled signal
/// (unit DC gain, state initialised to the first sample).
std::vector<double> low_pass_filter(std::span<const double> signal, double dt, double bandwidth);

/// Peak and full width at half maximum of one pulse.
struct PulseShape {
    double peak = 0;      // same unit as the input
    double peak_time = 0; // s, relative to the start of the window
    double fwhm = 0;      // s
};

/// Measures the dominant pulse in a window (typically one drive period).
/// Half-maximum crossings are located by linear interpolation, searching
/// outward from the peak.
PulseShape measure_pulse(std::span<const double> power, double dt);

} // namespace pdqrng::laser
