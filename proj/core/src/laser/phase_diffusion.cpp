#include "pdqrng/laser/phase_diffusion.hpp"

#include "pdqrng/errors.hpp"
#include "pdqrng/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace pdqrng::laser {

namespace {

double integrand(const Trajectory& traj, std::size_t i, double factor, std::optional<double> floor) {
    double s = traj.photons[i];
    if (floor) {
        s = std::max(s, *floor);
    } else if (s <= 0.0) {
        throw PreconditionError("accumulate_phase_variance: zero photon number without a photon floor");
    }
    return traj.spont_rate[i] * factor / (2.0 * s);
}

} // namespace

double accumulate_phase_variance(const Trajectory& traj, const LaserParams& params, double t_start,
                                 double t_end, std::optional<double> photon_floor) {
    if (traj.size() < 2 || !(traj.dt > 0)) {
        throw PreconditionError("accumulate_phase_variance: trajectory too short");
    }
    const double t0 = traj.times.front();
    const double t1 = traj.times.back();
    if (!(t_start < t_end) || t_start < t0 || t_end > t1 * (1.0 + 1e-12)) {
        throw PreconditionError("accumulate_phase_variance: interval outside trajectory");
    }
    if (photon_floor && !(*photon_floor > 0.0)) {
        throw ConfigError("accumulate_phase_variance: photon floor must be positive");
    }
    t_end = std::min(t_end, t1);

    const double factor = 1.0 + params.linewidth_enhancement * params.linewidth_enhancement;
    const double dt = traj.dt;
    const std::size_t last_segment = traj.size() - 2;
    auto segment_of = [&](double t) {
        const auto k = static_cast<std::size_t>(std::floor((t - t0) / dt));
        return std::min(k, last_segment);
    };

    // Exact integral of the linear interpolant over [a, b] inside segment k.
    auto partial = [&](std::size_t k, double a, double b) {
        const double ta = traj.times[k];
        const double fa = integrand(traj, k, factor, photon_floor);
        const double fb = integrand(traj, k + 1, factor, photon_floor);
        const double slope = (fb - fa) / dt;
        const double va = fa + slope * (a - ta);
        const double vb = fa + slope * (b - ta);
        return 0.5 * (va + vb) * (b - a);
    };

    const std::size_t ks = segment_of(t_start);
    const std::size_t ke = segment_of(t_end);
    if (ks == ke) {
        return partial(ks, t_start, t_end);
    }
    double sum = partial(ks, t_start, traj.times[ks + 1]);
    for (std::size_t k = ks + 1; k < ke; ++k) {
        sum += 0.5 * (integrand(traj, k, factor, photon_floor) + integrand(traj, k + 1, factor, photon_floor)) * dt;
    }
    sum += partial(ke, traj.times[ke], t_end);
    return sum;
}

double folded_gaussian_density(double theta, double variance) {
    if (!(variance > 0)) {
        throw PreconditionError("folded_gaussian_density: variance must be > 0");
    }
    constexpr double kCutoff = 1e-18;
    const double two_pi = 2.0 * std::numbers::pi;
    const double norm = 1.0 / std::sqrt(two_pi * variance);
    auto g = [&](double x) { return norm * std::exp(-x * x / (2.0 * variance)); };

    double sum = 0.0;
    for (double sign : {1.0, -1.0}) {
        const double x0 = sign * theta;
        sum += g(x0);
        // Terms decrease monotonically once |x0 + 2 pi k| grows, in both directions.
        for (int dir : {1, -1}) {
            for (long k = 1;; ++k) {
                const double term = g(x0 + dir * two_pi * static_cast<double>(k));
                sum += term;
                if (term < kCutoff && std::fabs(x0 + dir * two_pi * static_cast<double>(k)) > std::fabs(x0)) {
                    break;
                }
            }
        }
    }
    return sum;
}

double wrapped_gaussian_uniformity_error(double variance) {
    if (!(variance > 0)) {
        throw PreconditionError("wrapped_gaussian_uniformity_error: variance must be > 0");
    }
    // The folded density is even and 2 pi periodic, hence symmetric about 0 and
    // pi; its Fourier series has only cosine terms, whose extrema sit at 0 and pi
    // for the dominant harmonic. A uniform grid that includes both endpoints
    // captures the maximum.
    constexpr int kGrid = 1024;
    double worst = 0.0;
    for (int i = 0; i <= kGrid; ++i) {
        const double theta = std::numbers::pi * static_cast<double>(i) / kGrid;
        const double dev = std::fabs(folded_gaussian_density(theta, variance) - 1.0 / std::numbers::pi);
        worst = std::max(worst, dev);
    }
    return worst * std::numbers::pi;
}

std::vector<double> sample_pulse_phases(double variance, std::size_t count, std::uint64_t seed) {
    if (!(variance > 0)) {
        throw PreconditionError("sample_pulse_phases: variance must be > 0");
    }
    std::vector<double> phases(count);
    const double sigma = std::sqrt(variance);
    for (std::size_t begin = 0; begin < count; begin += kChunkSize) {
        Xoshiro256pp rng(seed, Stage::pulse_phases, begin / kChunkSize);
        std::normal_distribution<double> normal(0.0, sigma);
        const std::size_t end = std::min(count, begin + kChunkSize);
        for (std::size_t i = begin; i < end; ++i) {
            phases[i] = normal(rng);
        }
    }
    return phases;
}

} // namespace pdqrng::laser
