#pragma once

namespace pdqrng {

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
///
/// Uses the power series for P(a, x) when x < a + 1 and a modified-Lentz
/// continued fraction for Q(a, x) otherwise; both are iterated to a relative
/// accuracy of about 1e-15, comfortably inside 1e-10.
///
/// Requires a > 0 and x >= 0; throws PreconditionError otherwise.
double incomplete_gamma_upper_regularized(double a, double x);

/// Regularized lower incomplete gamma P(a, x) = 1 - Q(a, x).
double incomplete_gamma_lower_regularized(double a, double x);

} // namespace pdqrng
