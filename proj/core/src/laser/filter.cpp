#include "pdqrng/laser/filter.hpp"

#include "pdqrng/errors.hpp"

#include <cmath>

namespace pdqrng::laser {

double filter_time_constant(double bandwidth) {
    if (!(bandwidth > 0)) {
        throw PreconditionError("filter bandwidth must be > 0");
    }
    return 0.35 / bandwidth;
}

std::vector<double> low_pass_filter(std::span<const double> signal, double dt, double bandwidth) {
    if (!(dt > 0)) {
        throw PreconditionError("low_pass_filter: dt must be > 0");
    }
    const double tau = filter_time_constant(bandwidth);
    const double decay = std::exp(-dt / tau);
    std::vector<double> out(signal.size());
    if (signal.empty()) {
        return out;
    }
    double y = signal[0];
    out[0] = y;
    for (std::size_t i = 1; i < signal.size(); ++i) {
        y = decay * y + (1.0 - decay) * signal[i];
        out[i] = y;
    }
    return out;
}

PulseShape measure_pulse(std::span<const double> power, double dt) {
    if (power.size() < 3) {
        throw PreconditionError("measure_pulse: window too short");
    }
    std::size_t ip = 0;
    for (std::size_t i = 1; i < power.size(); ++i) {
        if (power[i] > power[ip]) ip = i;
    }
    const double half = 0.5 * power[ip];
    double left = 0.0;
    std::size_t i = ip;
    while (i > 0 && power[i - 1] >= half) --i;
    if (i == 0) {
        left = 0.0;
    } else {
        const double f = (half - power[i - 1]) / (power[i] - power[i - 1]);
        left = (static_cast<double>(i - 1) + f) * dt;
    }
    std::size_t j = ip;
    const std::size_t last = power.size() - 1;
    while (j < last && power[j + 1] >= half) ++j;
    double right = 0.0;
    if (j == last) {
        right = static_cast<double>(last) * dt;
    } else {
        const double f = (power[j] - half) / (power[j] - power[j + 1]);
        right = (static_cast<double>(j) + f) * dt;
    }
    return {power[ip], static_cast<double>(ip) * dt, right - left};
}

} // namespace pdqrng::laser
