#include "pdqrng/laser/steady_state.hpp"

#include "pdqrng/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace pdqrng::laser {

SteadyStateInputs steady_state_inputs(const LaserDevice& device, double photon_saturation) {
    SteadyStateInputs in;
    in.photon_saturation = photon_saturation;
    in.cavity_decay = device.cavity_decay();
    in.carrier_decay = device.carrier_decay;
    in.power_per_photon = device.power_per_photon_or_default();
    in.electron_charge = device.electron_charge;
    return in;
}

namespace {

// Largest photon number the current can sustain: gamma s / sqrt(1 + s/s_sat) = I/q.
double max_sustainable_photons(double injection, const SteadyStateInputs& in) {
    const double g = in.cavity_decay;
    const double k = injection / g;
    // s^2 / (1 + s/s_sat) = k^2  =>  s^2 - (k^2/s_sat) s - k^2 = 0
    const double b = k * k / in.photon_saturation;
    return 0.5 * (b + std::sqrt(b * b + 4.0 * k * k));
}

} // namespace

SteadyState steady_state_near_threshold(double current, double measured_power, const SteadyStateInputs& in) {
    if (!(measured_power > 0)) {
        throw PreconditionError("steady_state_near_threshold: measured power must be > 0");
    }
    if (!(in.photon_saturation > 0 && in.cavity_decay > 0 && in.carrier_decay > 0 && in.power_per_photon > 0)) {
        throw PreconditionError("steady_state_near_threshold: s_sat, gamma, gamma_e and conversion must be > 0");
    }
    const double injection = current / in.electron_charge;
    const double s = measured_power / in.power_per_photon;
    const double root = std::sqrt(1.0 + s / in.photon_saturation);
    const double stimulated = in.cavity_decay * s / root;
    if (!(injection > stimulated)) {
        throw NoSolutionError(0.0, max_sustainable_photons(std::max(injection, 0.0), in),
                              "steady state: measured photon number exceeds what the current sustains");
    }
    SteadyState ss;
    ss.current = current;
    ss.photons = s;
    ss.measured_power = measured_power;
    ss.carriers_threshold = (injection - stimulated) / in.carrier_decay;
    ss.spont_coupling = in.cavity_decay * (1.0 - 1.0 / root) * s / (in.carrier_decay * ss.carriers_threshold);
    return ss;
}

SteadyStateResiduals steady_state_residuals(const SteadyState& ss, const SteadyStateInputs& in) {
    const double root = std::sqrt(1.0 + ss.photons / in.photon_saturation);
    const double gain_term = in.cavity_decay * (1.0 / root - 1.0) * ss.photons;
    const double spont_term = ss.spont_coupling * in.carrier_decay * ss.carriers_threshold;
    const double injection = ss.current / in.electron_charge;
    const double recomb = in.carrier_decay * ss.carriers_threshold;
    const double stim = in.cavity_decay * ss.photons / root;
    SteadyStateResiduals r;
    r.photon = (gain_term + spont_term) / std::max(std::fabs(gain_term), std::fabs(spont_term));
    r.carrier = (injection - recomb - stim) / std::max({std::fabs(injection), std::fabs(recomb), std::fabs(stim)});
    return r;
}

double steady_state_photons(double current, const LaserParams& p) {
    p.validate();
    const double injection = current / p.electron_charge;
    if (!(injection > 0)) {
        throw PreconditionError("steady_state_photons: current must be > 0");
    }
    // Adding both stationary equations eliminates the gain term, leaving n linear in s.
    auto carriers = [&](double s) {
        return (injection - p.cavity_decay * s) / (p.carrier_decay * (1.0 - p.spont_coupling));
    };
    auto f = [&](double s) {
        const double n = carriers(s);
        const double gain = p.gain_per_carrier * (n - p.carriers_transparency) / std::sqrt(1.0 + s / p.photon_saturation);
        return gain * s - (injection - p.carrier_decay * n);
    };
    const double lo = 0.0;
    const double hi = injection / p.cavity_decay;
    const double flo = f(lo);
    const double fhi = f(hi);
    if ((flo > 0) == (fhi > 0)) {
        throw NoSolutionError(lo, hi, "steady_state_photons: no sign change");
    }
    std::uintmax_t iterations = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(52), iterations);
    return 0.5 * (r.first + r.second);
}

} // namespace pdqrng::laser
