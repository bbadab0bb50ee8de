#include "pdqrng/laser/rate_equations.hpp"

#include "pdqrng/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pdqrng::laser {

double DriveWaveform::current(double t) const {
    if (shape == WaveShape::sinusoid) {
        return dc_bias + rf_amplitude * std::sin(2.0 * std::numbers::pi * prf * t);
    }
    const double cycles = prf * t;
    const double phase = cycles - std::floor(cycles);
    const double x = phase * static_cast<double>(trace.size());
    const auto i = static_cast<std::size_t>(x) % trace.size();
    const std::size_t j = (i + 1) % trace.size();
    const double frac = x - std::floor(x);
    return dc_bias + rf_amplitude * (trace[i] + frac * (trace[j] - trace[i]));
}

std::size_t DriveWaveform::steps() const {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

void DriveWaveform::validate() const {
    if (!(prf > 0) || !std::isfinite(prf)) {
        throw ConfigError("DriveWaveform: prf must be > 0");
    }
    if (!(dt > 0)) {
        throw ConfigError("DriveWaveform: dt must be > 0");
    }
    if (!(dt < 1.0 / (100.0 * prf))) {
        throw ConfigError("DriveWaveform: dt must be < 1/(100 prf) to resolve the pulses");
    }
    if (!(duration >= dt)) {
        throw ConfigError("DriveWaveform: duration must cover at least one step");
    }
    if (!std::isfinite(dc_bias) || !std::isfinite(rf_amplitude)) {
        throw ConfigError("DriveWaveform: currents must be finite");
    }
    if (shape == WaveShape::sampled && trace.size() < 2) {
        throw ConfigError("DriveWaveform: sampled shape needs at least two trace points");
    }
}

double rf_amplitude_for_reverse_bias(double dc_bias, double fraction) {
    if (!(fraction > 0.0 && fraction < 0.5) || !(dc_bias > 0)) {
        throw PreconditionError("reverse-bias fraction must lie in (0, 0.5) with positive bias");
    }
    // sin(phi) < -dc/A holds for a fraction 1/2 - asin(dc/A)/pi of the cycle.
    return dc_bias / std::cos(std::numbers::pi * fraction);
}

DriveWaveform reference_drive(std::size_t periods) {
    DriveWaveform d;
    d.dc_bias = 15e-3;
    d.rf_amplitude = rf_amplitude_for_reverse_bias(d.dc_bias, 0.4);
    d.prf = 5.825e9;
    d.dt = d.period() / 1000.0;
    d.duration = static_cast<double>(periods) * d.period();
    return d;
}

DriveWaveform constant_drive(double current, double duration, double dt) {
    DriveWaveform d;
    d.dc_bias = current;
    d.rf_amplitude = 0.0;
    // Any prf with dt < 1/(100 prf) keeps the waveform valid; the drive is flat anyway.
    d.prf = 1.0 / (200.0 * dt);
    d.duration = duration;
    d.dt = dt;
    return d;
}

namespace {

struct State {
    double s;
    double n;
};

struct Rates {
    double ds;
    double dn;
};

class RateEquations {
public:
    RateEquations(const LaserParams& p, const DriveWaveform& drive)
        : p_(p), drive_(drive), gain_threshold_(p.gain_per_carrier * (p.carriers_threshold - p.carriers_transparency)) {}

    Rates operator()(double t, State y) const {
        const double s = std::max(y.s, 0.0);
        const double n = std::max(y.n, 0.0);
        const double gain = p_.gain_per_carrier * (n - p_.carriers_transparency) / std::sqrt(1.0 + s / p_.photon_saturation);
        const double spont = n * p_.carrier_decay * p_.spont_coupling;
        return {(gain - gain_threshold_) * s + spont,
                drive_.current(t) / p_.electron_charge - p_.carrier_decay * n - gain * s};
    }

private:
    const LaserParams& p_;
    const DriveWaveform& drive_;
    double gain_threshold_;
};

double diffusion_rate(double spont, double photons, double alpha) {
    return spont * (1.0 + alpha * alpha) / (2.0 * photons);
}

} // namespace

Trajectory integrate_rate_equations(const LaserParams& params, const DriveWaveform& drive,
                                    double s_init, double n_init, const IntegratorOptions& options) {
    params.validate(true);
    drive.validate();
    if (!(s_init >= 0) || !(n_init >= 0)) {
        throw PreconditionError("integrate_rate_equations: initial state must be non-negative");
    }
    if (!(options.photon_floor > 0)) {
        throw ConfigError("integrate_rate_equations: photon_floor must be > 0");
    }

    const RateEquations f(params, drive);
    const double dt = drive.dt;
    const std::size_t steps = drive.steps();
    const double alpha = params.linewidth_enhancement;

    Trajectory traj;
    traj.dt = dt;
    for (auto* v : {&traj.times, &traj.photons, &traj.carriers, &traj.spont_rate, &traj.phase_variance,
                    &traj.output_power}) {
        v->resize(steps + 1);
    }

    State y{std::max(s_init, options.photon_floor), n_init};
    double variance = 0.0;
    double prev_rate = 0.0;
    for (std::size_t i = 0;; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double spont = params.spontaneous_rate(y.n);
        const double rate = diffusion_rate(spont, y.s, alpha);
        if (i > 0) {
            variance += 0.5 * (prev_rate + rate) * dt;
        }
        prev_rate = rate;

        traj.times[i] = t;
        traj.photons[i] = y.s;
        traj.carriers[i] = y.n;
        traj.spont_rate[i] = spont;
        traj.phase_variance[i] = variance;
        traj.output_power[i] = params.output_power(y.s);

        if (i == steps) {
            break;
        }

        const Rates k1 = f(t, y);
        const Rates k2 = f(t + 0.5 * dt, {y.s + 0.5 * dt * k1.ds, y.n + 0.5 * dt * k1.dn});
        const Rates k3 = f(t + 0.5 * dt, {y.s + 0.5 * dt * k2.ds, y.n + 0.5 * dt * k2.dn});
        const Rates k4 = f(t + dt, {y.s + dt * k3.ds, y.n + dt * k3.dn});
        y.s += dt / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
        y.n += dt / 6.0 * (k1.dn + 2.0 * k2.dn + 2.0 * k3.dn + k4.dn);
        if (!std::isfinite(y.s) || !std::isfinite(y.n)) {
            throw DivergenceError(t + dt, "rate equations diverged");
        }
        y.s = std::max(y.s, options.photon_floor);
        y.n = std::max(y.n, 0.0);
    }
    return traj;
}

} // namespace pdqrng::laser
