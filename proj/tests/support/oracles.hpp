#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

/// Q(a, x) by quadrature of the defining integral.
inline double upper_gamma_by_quadrature(double a, double x) {
    boost::math::quadrature::exp_sinh<double> integrator;
    const double integral = integrator.integrate(
        [a, x](double t) { return std::exp((a - 1.0) * std::log(x + t) - (x + t) - std::lgamma(a)); });
    return integral;
}

/// Arcsine mass of [lo, hi] by tanh-sinh quadrature of the density, in units of the span.
inline double arcsine_mass_by_quadrature(double u_min, double u_max, double lo, double hi) {
    const double w = u_max - u_min;
    const double a = std::max(0.0, (lo - u_min) / w);
    const double b = std::min(1.0, (hi - u_min) / w);
    if (!(b > a)) {
        return 0.0;
    }
    boost::math::quadrature::tanh_sinh<double> integrator;
    // xc is a - x near the left end and b - x near the right end, which keeps
    // the distance to a singular endpoint exact.
    return integrator.integrate(
        [a, b](double x, double xc) {
            double left = x;
            double right = 1.0 - x;
            if (xc < 0 && a == 0.0) {
                left = -xc;
            }
            if (xc > 0 && b == 1.0) {
                right = xc;
            }
            return 1.0 / (std::numbers::pi * std::sqrt(left * right));
        },
        a, b);
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

/// Asymptotic 1% critical value of the KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

} // namespace oracle
