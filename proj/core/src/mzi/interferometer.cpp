#include "pdqrng/mzi/interferometer.hpp"

#include "pdqrng/errors.hpp"
#include "pdqrng/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pdqrng::mzi {

void InterferometerConfig::validate(std::optional<double> prf) const {
    for (const Coupler* c : {&coupler1, &coupler2}) {
        if (!(c->through >= 0 && c->cross >= 0) || c->through * c->through + c->cross * c->cross > 1.0 + 1e-12) {
            throw ConfigError("InterferometerConfig: coupler must satisfy |eps_11|^2 + |eps_12|^2 <= 1");
        }
    }
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw ConfigError("InterferometerConfig: visibility must lie in [0, 1]");
    }
    if (!(detector_bandwidth > 0)) {
        throw ConfigError("InterferometerConfig: detector bandwidth must be > 0");
    }
    if (!std::isfinite(static_phase)) {
        throw ConfigError("InterferometerConfig: static phase must be finite");
    }
    if (prf) {
        const double period = 1.0 / *prf;
        if (std::fabs((arm2_delay - arm1_delay) - period) > 1e-3 * period) {
            throw ConfigError("InterferometerConfig: arm delay difference must equal 1/PRF");
        }
    }
}

double InterferometerConfig::arm1_transmission() const noexcept {
    const double e = coupler1.through * coupler2.through;
    return e * e;
}

double InterferometerConfig::arm2_transmission() const noexcept {
    const double e = coupler1.cross * coupler2.cross;
    return e * e;
}

ArmPowers sample_arm_powers(const ArmPowerModel& model, std::size_t count, std::uint64_t seed) {
    if (!(model.mean1 > 0 && model.mean2 > 0 && model.sigma1 >= 0 && model.sigma2 >= 0)) {
        throw ConfigError("ArmPowerModel: means must be > 0 and deviations >= 0");
    }
    ArmPowers out;
    out.arm1.resize(count);
    out.arm2.resize(count);
    for (std::size_t begin = 0; begin < count; begin += kChunkSize) {
        Xoshiro256pp rng(seed, Stage::arm_powers, begin / kChunkSize);
        std::normal_distribution<double> n1(model.mean1, model.sigma1);
        std::normal_distribution<double> n2(model.mean2, model.sigma2);
        const std::size_t end = std::min(count, begin + kChunkSize);
        for (std::size_t i = begin; i < end; ++i) {
            out.arm1[i] = model.sigma1 > 0 ? std::max(0.0, n1(rng)) : model.mean1;
            out.arm2[i] = model.sigma2 > 0 ? std::max(0.0, n2(rng)) : model.mean2;
        }
    }
    return out;
}

std::vector<PulseRecord> interfere_pulse_train(std::span<const double> u1, std::span<const double> u2,
                                               std::span<const double> phases, const InterferometerConfig& cfg,
                                               double noise_variance, std::uint64_t seed) {
    if (u1.size() != u2.size() || u1.size() != phases.size()) {
        throw ConfigError("interfere_pulse_train: sequence lengths differ");
    }
    if (u1.size() < 2) {
        throw ConfigError("interfere_pulse_train: need at least two pulses");
    }
    if (!(noise_variance >= 0)) {
        throw ConfigError("interfere_pulse_train: noise variance must be >= 0");
    }
    cfg.validate();

    const std::size_t count = u1.size() - 1;
    const double sigma = std::sqrt(noise_variance);
    const double g = cfg.visibility;
    std::vector<PulseRecord> records(count);
    for (std::size_t begin = 0; begin < count; begin += kChunkSize) {
        Xoshiro256pp rng(seed, Stage::detector_noise, begin / kChunkSize);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t end = std::min(count, begin + kChunkSize);
        for (std::size_t r = begin; r < end; ++r) {
            const std::size_t j = r + 1;
            if (u1[j] < 0 || u2[j] < 0) {
                throw ValidationError("interfere_pulse_train: arm powers must be non-negative");
            }
            PulseRecord& rec = records[r];
            rec.index = j;
            rec.arm1_power = u1[j];
            rec.arm2_power = u2[j];
            rec.phase = phases[j];
            rec.noise = sigma > 0 ? sigma * normal(rng) : 0.0;
            const double beat = 2.0 * g * std::sqrt(u1[j] * u2[j]) * std::cos(phases[j] - phases[j - 1] + cfg.static_phase);
            rec.output_power = std::max(0.0, u1[j] + u2[j] + beat + rec.noise);
        }
    }
    return records;
}

VisibilityEstimate estimate_visibility(const VisibilityInputs& in) {
    const double denom = 2.0 * in.mean_sqrt_u1_sq * in.mean_sqrt_u2_sq;
    if (!(denom > 0) || !std::isfinite(denom)) {
        throw PreconditionError("estimate_visibility: 2 E[sqrt u1]^2 E[sqrt u2]^2 must be > 0");
    }
    const double numer = in.var_out - in.var_u1 - in.var_u2 - in.var_noise;
    VisibilityEstimate est;
    if (numer < 0) {
        est.degenerate = true;
        return est;
    }
    est.raw = std::sqrt(numer / denom);
    est.clamped = est.raw > 1.0;
    est.value = std::min(est.raw, 1.0);
    return est;
}

std::vector<double> interfere_waveforms(std::span<const double> laser_power, std::size_t samples_per_period,
                                        std::span<const double> phases, const InterferometerConfig& cfg) {
    if (samples_per_period == 0 || laser_power.size() != samples_per_period * phases.size()) {
        throw ConfigError("interfere_waveforms: waveform must hold samples_per_period samples per phase");
    }
    cfg.validate();
    if (!(cfg.arm2_delay > cfg.arm1_delay)) {
        throw ConfigError("interfere_waveforms: arm 2 must be the long arm");
    }
    // The long arm lags by exactly one pulse period on the sample grid.
    const std::size_t delay = samples_per_period;
    const double t1 = cfg.arm1_transmission();
    const double t2 = cfg.arm2_transmission();
    const double g = cfg.visibility;

    std::vector<double> out(laser_power.size());
    for (std::size_t i = 0; i < laser_power.size(); ++i) {
        const double u1 = t1 * laser_power[i];
        if (i < delay) {
            out[i] = u1;
            continue;
        }
        const double u2 = t2 * laser_power[i - delay];
        const double dtheta = phases[i / samples_per_period] - phases[(i - delay) / samples_per_period];
        out[i] = u1 + u2 + 2.0 * g * std::sqrt(u1 * u2) * std::cos(dtheta + cfg.static_phase);
    }
    return out;
}

} // namespace pdqrng::mzi
