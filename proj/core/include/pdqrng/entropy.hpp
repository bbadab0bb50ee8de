#pragma once

#include "pdqrng/mzi/adc.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace pdqrng::entropy {

/// Arcsine law of u = c + h cos(phi) with phi uniform: the ideal interferometer
/// output when the inter-pulse phase is fully randomized.
struct ArcsineModel {
    double u_min = 0; // W
    double u_max = 0; // W

    double span() const noexcept { return u_max - u_min; }
    /// 1 / (pi sqrt((u - u_min)(u_max - u))) on the open support, 0 outside.
    double pdf(double u) const noexcept;
    /// (2/pi) asin(sqrt((u - u_min) / span)), clamped to [0, 1].
    double cdf(double u) const noexcept;
    /// Throws ConfigError unless u_max > u_min.
    void validate() const;
};

/// u_min/max = u1 + u2 -/+ 2|g| sqrt(u1 u2). |g| = 0 gives a zero-span model,
/// which downstream operations reject.
ArcsineModel arcsine_bounds(double mean_u1, double mean_u2, double visibility);

struct ArcsineMoments {
    double mean = 0;     // W
    double variance = 0; // W^2
};
ArcsineMoments arcsine_moments(const ArcsineModel& model) noexcept;

/// Arcsine mass of [u_min, u_min + bin]. Throws PreconditionError if the bin is
/// not narrower than the span.
double first_bin_probability(const ArcsineModel& model, const mzi::AdcConfig& adc);

/// Mass of every ADC code on the physical grid (edges at multiples of the bin
/// size, codes clamped to [0, 2^b - 1] like the digitizer). With
/// `noise_sd > 0` the arcsine law is convolved with zero-mean Gaussian
/// detector noise and the lower clamp at 0 W is applied before digitizing.
std::vector<double> digitized_arcsine_masses(const ArcsineModel& model, const mzi::AdcConfig& adc,
                                             double noise_sd = 0.0);

/// Masses of bins of the ADC width laid from u_min upward until u_max is covered.
std::vector<double> anchored_arcsine_masses(const ArcsineModel& model, const mzi::AdcConfig& adc);

/// -log2(max p). Throws ValidationError on empty, negative or non-normalized
/// (|sum - 1| > 1e-9) input.
double min_entropy_exact(std::span<const double> masses);

/// b/2 - log2(4 A / (pi^2 span)) / 2. Throws PreconditionError if span <= 0.
double min_entropy_closed_form(const mzi::AdcConfig& adc, double span);

/// H * prf. Throws PreconditionError if H < 0.
double randomness_rate(double min_entropy, double prf);

struct EntropyReport {
    double visibility = 0;
    double u_min = 0;             // W
    double u_max = 0;             // W
    double span = 0;              // W
    int resolution_bits = 0;
    double dynamic_range = 0;     // W
    double h_exact = 0;           // bits, certified value
    double h_closed_form = 0;     // bits
    double h_true_grid = 0;       // bits, physical grid at this u_min
    double first_bin_prob = 0;
    double reduction_factor = 0;  // b / h_exact
    double prf = 0;               // Hz
    double bit_rate = 0;          // bits/s
    std::map<std::string, std::string> provenance;
    std::vector<std::string> warnings;
};

/// Evaluates every entropy figure for one arcsine model.
///
/// The certified `h_exact` is computed on bins anchored at u_min. Among all
/// placements of the ADC grid relative to the support this one puts a full bin
/// on the density peak, so it is the smallest; `h_true_grid` reports the value
/// for the actual placement.
EntropyReport certify(const ArcsineModel& model, const mzi::AdcConfig& adc, double prf, double visibility);

} // namespace pdqrng::entropy
