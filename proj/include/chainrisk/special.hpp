#pragma once

namespace chainrisk {

/// log Γ(x) for x > 0. Reentrant (does not touch the global `signgam`).
double log_gamma(double x);

/// Regularized lower incomplete gamma function P(a, x) = γ(a, x) / Γ(a).
///
/// Series expansion for x < a + 1, Lentz continued fraction for the
/// complement otherwise. Absolute accuracy is about 1e-14 wherever the
/// result is not saturated; once the prefactor x^a e^{-x} / Γ(a) underflows
/// the saturated limit (0 or 1) is returned.
///
/// Throws DomainError for a <= 0, x < 0 or non-finite arguments.
double regularized_lower_gamma(double a, double x);

/// Complement Q(a, x) = 1 - P(a, x), computed without cancellation.
double regularized_upper_gamma(double a, double x);

}  // namespace chainrisk
