#pragma once

#include "pdqrng/laser/params.hpp"

#include <cstddef>
#include <vector>

namespace pdqrng::laser {

enum class WaveShape { sinusoid, sampled };

/// Injection current I(t) = dc_bias + rf_amplitude * shape(prf * t).
///
/// For `sampled`, `trace` holds one period of the normalized RF shape on a
/// uniform grid and is interpolated linearly (periodically). I(t) may be
/// negative; the diode is then reverse biased and extracts carriers.
struct DriveWaveform {
    double dc_bias = 15e-3;       // A
    double rf_amplitude = 0;      // A
    double prf = 5.825e9;         // Hz
    WaveShape shape = WaveShape::sinusoid;
    std::vector<double> trace;    // one period, used when shape == sampled
    double duration = 0;          // s
    double dt = 0;                // s

    double period() const noexcept { return 1.0 / prf; }
    double current(double t) const;
    std::size_t steps() const;
    /// Throws ConfigError when dt does not resolve the pulse structure
    /// (dt >= 1 / (100 prf)) or the waveform is malformed.
    void validate() const;
};

/// RF amplitude that reverse biases a sinusoidal drive for `fraction` of each cycle.
double rf_amplitude_for_reverse_bias(double dc_bias, double fraction);

/// Reference gain-switching drive: 15 mA DC, sinusoidal RF at 5.825 GHz
/// reverse biasing the diode for 40% of the cycle, 1000 steps per period.
DriveWaveform reference_drive(std::size_t periods = 20);

/// Constant-current drive (rf_amplitude = 0).
DriveWaveform constant_drive(double current, double duration, double dt);

struct Trajectory {
    std::vector<double> times;          // s
    std::vector<double> photons;        // s(t)
    std::vector<double> carriers;       // n(t)
    std::vector<double> spont_rate;     // R_sp(t), 1/s
    std::vector<double> phase_variance; // cumulative <dtheta^2>, rad^2
    std::vector<double> output_power;   // W
    double dt = 0;

    std::size_t size() const noexcept { return times.size(); }
};

struct IntegratorOptions {
    /// Lower bound on the photon number; the state is clamped to it after every step.
    double photon_floor = 1.0;
};

/// Integrates the coupled photon / carrier rate equations with classic
/// fixed-step RK4 on the drive's time grid.
///
/// Carriers are clamped at zero (reverse bias cannot make n negative) and
/// photons at `photon_floor`. The cumulative phase variance is the trapezoid
/// integral of R_sp (1 + alpha^2) / (2 s) on the same grid.
Trajectory integrate_rate_equations(const LaserParams& params, const DriveWaveform& drive,
                                    double s_init, double n_init,
                                    const IntegratorOptions& options = {});

} // namespace pdqrng::laser
