#include "pdqrng/entropy.hpp"

#include "pdqrng/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace pdqrng::entropy {

using std::numbers::pi;

double ArcsineModel::pdf(double u) const noexcept {
    if (!(u > u_min && u < u_max)) {
        return 0.0;
    }
    return 1.0 / (pi * std::sqrt((u - u_min) * (u_max - u)));
}

double ArcsineModel::cdf(double u) const noexcept {
    if (u <= u_min) {
        return 0.0;
    }
    if (u >= u_max) {
        return 1.0;
    }
    return (2.0 / pi) * std::asin(std::sqrt((u - u_min) / span()));
}

void ArcsineModel::validate() const {
    if (!std::isfinite(u_min) || !std::isfinite(u_max) || !(u_max > u_min)) {
        throw ConfigError("ArcsineModel: requires u_max > u_min");
    }
}

ArcsineModel arcsine_bounds(double mean_u1, double mean_u2, double visibility) {
    if (!(mean_u1 > 0) || !(mean_u2 > 0)) {
        throw PreconditionError("arcsine_bounds: arm powers must be > 0");
    }
    if (!(visibility >= 0 && visibility <= 1)) {
        throw PreconditionError("arcsine_bounds: visibility must lie in [0, 1]");
    }
    const double c = mean_u1 + mean_u2;
    const double h = 2.0 * visibility * std::sqrt(mean_u1 * mean_u2);
    return {c - h, c + h};
}

ArcsineMoments arcsine_moments(const ArcsineModel& model) noexcept {
    const double w = model.span();
    return {0.5 * (model.u_min + model.u_max), w * w / 8.0};
}

double first_bin_probability(const ArcsineModel& model, const mzi::AdcConfig& adc) {
    const double bin = adc.bin_size();
    const double w = model.span();
    if (!(bin < w)) {
        throw PreconditionError("first_bin_probability: arcsine span is not wider than one ADC bin");
    }
    return (2.0 / pi) * std::asin(std::sqrt(bin / w));
}

namespace {

// P(clamp(u + n, 0) <= t) for the noisy arcsine law, by midpoint quadrature over
// the phase. The step keeps h * dphi well below the noise width.
class NoisyCdf {
public:
    NoisyCdf(const ArcsineModel& m, double sd) : sd_(sd) {
        const double h = 0.5 * m.span();
        c_ = 0.5 * (m.u_min + m.u_max);
        const auto points = static_cast<std::size_t>(std::ceil(16.0 * pi * h / sd)) + 64;
        offsets_.resize(points);
        for (std::size_t i = 0; i < points; ++i) {
            offsets_[i] = h * std::cos(pi * (static_cast<double>(i) + 0.5) / static_cast<double>(points));
        }
        lo_ = m.u_min - 10.0 * sd;
        hi_ = m.u_max + 10.0 * sd;
    }

    double operator()(double t) const {
        if (t < 0.0) {
            return 0.0;
        }
        if (t <= lo_) {
            return 0.0;
        }
        if (t >= hi_) {
            return 1.0;
        }
        const double scale = 1.0 / (std::numbers::sqrt2 * sd_);
        double acc = 0.0;
        for (double off : offsets_) {
            acc += 0.5 * std::erfc(-(t - c_ - off) * scale);
        }
        return acc / static_cast<double>(offsets_.size());
    }

private:
    double sd_;
    double c_ = 0;
    double lo_ = 0;
    double hi_ = 0;
    std::vector<double> offsets_;
};

template <class Cdf>
std::vector<double> masses_from_cdf(const Cdf& cdf, const mzi::AdcConfig& adc) {
    const std::size_t levels = adc.levels();
    const double bin = adc.bin_size();
    std::vector<double> masses(levels);
    double prev = 0.0;
    for (std::size_t k = 0; k + 1 < levels; ++k) {
        const double next = cdf(static_cast<double>(k + 1) * bin);
        masses[k] = next - prev;
        prev = next;
    }
    masses[levels - 1] = 1.0 - prev;
    return masses;
}

} // namespace

std::vector<double> digitized_arcsine_masses(const ArcsineModel& model, const mzi::AdcConfig& adc,
                                             double noise_sd) {
    model.validate();
    adc.validate();
    if (!(noise_sd >= 0)) {
        throw PreconditionError("digitized_arcsine_masses: noise sd must be >= 0");
    }
    if (noise_sd == 0.0) {
        return masses_from_cdf([&](double t) { return model.cdf(t); }, adc);
    }
    return masses_from_cdf(NoisyCdf(model, noise_sd), adc);
}

std::vector<double> anchored_arcsine_masses(const ArcsineModel& model, const mzi::AdcConfig& adc) {
    model.validate();
    adc.validate();
    const double bin = adc.bin_size();
    const auto count = static_cast<std::size_t>(std::ceil(model.span() / bin));
    std::vector<double> masses(count);
    double prev = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double next = k + 1 == count ? 1.0 : model.cdf(model.u_min + static_cast<double>(k + 1) * bin);
        masses[k] = next - prev;
        prev = next;
    }
    return masses;
}

double min_entropy_exact(std::span<const double> masses) {
    if (masses.empty()) {
        throw ValidationError("min_entropy_exact: empty mass function");
    }
    double sum = 0.0;
    double top = 0.0;
    for (double p : masses) {
        if (!(p >= 0) || !std::isfinite(p)) {
            throw ValidationError("min_entropy_exact: probabilities must be finite and non-negative");
        }
        sum += p;
        top = std::max(top, p);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("min_entropy_exact: probabilities do not sum to 1");
    }
    return -std::log2(top);
}

double min_entropy_closed_form(const mzi::AdcConfig& adc, double span) {
    if (!(span > 0)) {
        throw PreconditionError("min_entropy_closed_form: span must be > 0");
    }
    return 0.5 * adc.resolution_bits - 0.5 * std::log2(4.0 * adc.dynamic_range / (pi * pi * span));
}

double randomness_rate(double min_entropy, double prf) {
    if (!(min_entropy >= 0)) {
        throw PreconditionError("randomness_rate: min-entropy must be >= 0");
    }
    return min_entropy * prf;
}

EntropyReport certify(const ArcsineModel& model, const mzi::AdcConfig& adc, double prf, double visibility) {
    adc.validate();
    EntropyReport r;
    r.visibility = visibility;
    r.u_min = model.u_min;
    r.u_max = model.u_max;
    r.span = model.span();
    r.resolution_bits = adc.resolution_bits;
    r.dynamic_range = adc.dynamic_range;
    r.prf = prf;

    r.first_bin_prob = first_bin_probability(model, adc);
    r.h_closed_form = min_entropy_closed_form(adc, r.span);
    r.h_exact = min_entropy_exact(anchored_arcsine_masses(model, adc));
    r.h_true_grid = min_entropy_exact(digitized_arcsine_masses(model, adc));
    r.reduction_factor = static_cast<double>(adc.resolution_bits) / r.h_exact;
    r.bit_rate = randomness_rate(r.h_exact, prf);

    if (model.u_min < 0.0 || model.u_max > adc.dynamic_range) {
        r.warnings.emplace_back("arcsine support exceeds the ADC range");
    }
    if (visibility >= 1.0) {
        r.warnings.emplace_back("visibility at the upper bound");
    }
    return r;
}

} // namespace pdqrng::entropy
