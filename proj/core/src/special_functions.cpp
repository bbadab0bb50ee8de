#include "pdqrng/special_functions.hpp"

#include "pdqrng/errors.hpp"

#include <cmath>
#include <limits>

namespace pdqrng {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 10000;
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

void check_domain(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a)) {
        throw PreconditionError("incomplete gamma requires a > 0 and x >= 0");
    }
}

// P(a, x) by its power series; converges quickly for x < a + 1.
double lower_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction, evaluated with modified Lentz.
double upper_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double incomplete_gamma_upper_regularized(double a, double x) {
    check_domain(a, x);
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    if (x < a + 1.0) {
        return 1.0 - lower_series(a, x);
    }
    return upper_continued_fraction(a, x);
}

double incomplete_gamma_lower_regularized(double a, double x) {
    check_domain(a, x);
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return lower_series(a, x);
    }
    return 1.0 - upper_continued_fraction(a, x);
}

} // namespace pdqrng
