#pragma once

#include "pdqrng/laser/params.hpp"
#include "pdqrng/laser/rate_equations.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pdqrng::laser {

/// Linearized phase-diffusion bound over [t_start, t_end]:
///   integral of R_sp (1 + alpha^2) / (2 s) dt.
///
/// The integrand is sampled on the trajectory grid and integrated exactly as a
/// piecewise-linear function, so the result is additive over adjacent
/// intervals. Photon numbers are raised to `photon_floor` in the denominator;
/// with no floor, a zero photon number in the interval is an error.
double accumulate_phase_variance(const Trajectory& traj, const LaserParams& params,
                                 double t_start, double t_end,
                                 std::optional<double> photon_floor = 1.0);

/// Maximum fractional deviation of the phase density folded onto [0, pi)
/// from the uniform density 1/pi, for a zero-mean Gaussian phase of the given
/// variance: max_theta |G_pi(theta) - 1/pi| * pi.
double wrapped_gaussian_uniformity_error(double variance);

/// Folded density G_pi(theta) = sum over s = +-1 and integer k of G(s theta + 2 pi k),
/// truncated once terms drop below 1e-18.
double folded_gaussian_density(double theta, double variance);

/// N independent zero-mean Gaussian phases of the given variance. Chunk c of
/// kChunkSize phases is drawn from substream (seed, pulse_phases, c).
std::vector<double> sample_pulse_phases(double variance, std::size_t count, std::uint64_t seed);

} // namespace pdqrng::laser
