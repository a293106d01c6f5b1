#pragma once

// Special functions used by the closed-form loss and accuracy expressions.
// Implementations target the parameter ranges those formulas reach:
// incomplete-gamma shape a = d_out/2 up to ~10^3, 0F1 arguments up to
// 16 (eta0 t)^2 lambda, and the principal Lambert W branch.

namespace grokk::special {

struct FnResult {
    double value = 0.0;
    double est_error = 0.0;
};

/// Error function. Odd, |error| <= 1e-12.
double erf(double x);

/// Regularized upper incomplete gamma Q(a, z) = Gamma(a, z) / Gamma(a).
/// Throws InvalidParameter for a <= 0 or z < 0.
double reg_upper_gamma(double a, double z);
FnResult reg_upper_gamma_e(double a, double z);

/// Regularized lower incomplete gamma P(a, z) = 1 - Q(a, z), evaluated on
/// whichever side avoids cancellation.
double reg_lower_gamma(double a, double z);

/// Unscaled Gamma(a, z) (not regularized); used by the late-time
/// generalization-loss expression with a = 1/2.
double upper_gamma(double a, double z);

/// Regularized confluent hypergeometric limit function
///   0F1~(b; z) = sum_k z^k / (k! Gamma(b + k)).
/// Throws RangeError when |z| exceeds `max_abs_z` or the value overflows.
double reg_hyp0f1(double b, double z, double max_abs_z = 1e6);
FnResult reg_hyp0f1_e(double b, double z, double max_abs_z = 1e6);

/// log(0F1~(b; z)) for z >= 0, valid for any finite z (no overflow).
double log_reg_hyp0f1(double b, double z);

/// Principal branch W0 of the Lambert W function, W e^W = z, W >= -1.
/// Throws DomainError for z < -1/e.
double lambert_w0(double z);

} // namespace grokk::special
