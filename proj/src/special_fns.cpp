#include "grokklab/special_fns.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "grokklab/errors.hpp"

namespace grokk::special {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 100000;

void check_gamma_args(double a, double z) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidParameter("incomplete gamma: shape a must be positive and finite, got " +
                               std::to_string(a));
    }
    if (!(z >= 0.0)) {
        throw InvalidParameter("incomplete gamma: argument z must be non-negative, got " +
                               std::to_string(z));
    }
}

// Series for P(a, z); converges fast for z < a + 1.
double lower_series(double a, double z, double* err) {
    double term = 1.0;
    double sum = 1.0;
    int n = 1;
    for (; n < kMaxIter; ++n) {
        term *= z / (a + n);
        sum += term;
        if (term < sum * 1e-17) {
            break;
        }
    }
    const double log_prefix = a * std::log(z) - z - std::lgamma(a + 1.0);
    const double value = std::exp(log_prefix) * sum;
    if (err != nullptr) {
        *err = value * kEps * (n + std::abs(log_prefix) + 1.0);
    }
    return value;
}

// Modified Lentz continued fraction for Q(a, z); used for z >= a + 1.
double upper_fraction(double a, double z, double* err) {
    constexpr double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    int i = 1;
    for (; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    if (i == kMaxIter) {
        throw NumericFailure("incomplete gamma: continued fraction did not converge");
    }
    const double log_prefix = a * std::log(z) - z - std::lgamma(a);
    const double value = std::exp(log_prefix) * h;
    if (err != nullptr) {
        *err = value * kEps * (i + std::abs(log_prefix) + 1.0);
    }
    return value;
}

// log of 0F1~(b; z) for z >= 0 by direct summation with periodic rescaling.
double log_hyp0f1_series(double b, double z, int* terms) {
    double log_scale = -std::lgamma(b);
    double term = 1.0;
    double sum = 1.0;
    int k = 0;
    for (; k < kMaxIter; ++k) {
        term *= z / ((k + 1.0) * (b + k));
        sum += term;
        if (sum > 1e250) {
            term /= sum;
            log_scale += std::log(sum);
            sum = 1.0;
        }
        // Terms are decreasing once z < (k+1)(b+k).
        if (term < 1e-17 * sum && z < (k + 1.0) * (b + k)) {
            break;
        }
    }
    if (terms != nullptr) {
        *terms = k + 1;
    }
    return log_scale + std::log(sum);
}

// Hankel expansion of I_nu(x) for large x, returned as log(I_nu(x)).
// Returns NaN when the series does not reach full precision before
// its terms start to grow.
double log_bessel_i_asymptotic(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(next) > std::abs(term)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

double erf(double x) { return std::erf(x); }

FnResult reg_upper_gamma_e(double a, double z) {
    check_gamma_args(a, z);
    if (z == 0.0) {
        return {1.0, 0.0};
    }
    if (std::isinf(z)) {
        return {0.0, 0.0};
    }
    double err = 0.0;
    if (z < a + 1.0) {
        const double p = lower_series(a, z, &err);
        return {1.0 - p, err + kEps};
    }
    const double q = upper_fraction(a, z, &err);
    return {q, err};
}

double reg_upper_gamma(double a, double z) { return reg_upper_gamma_e(a, z).value; }

double reg_lower_gamma(double a, double z) {
    check_gamma_args(a, z);
    if (z == 0.0) {
        return 0.0;
    }
    if (std::isinf(z)) {
        return 1.0;
    }
    if (z < a + 1.0) {
        return lower_series(a, z, nullptr);
    }
    return 1.0 - upper_fraction(a, z, nullptr);
}

double upper_gamma(double a, double z) {
    check_gamma_args(a, z);
    if (z == 0.0) {
        return std::tgamma(a);
    }
    if (z >= a + 1.0) {
        // Avoid forming Q * Gamma(a) when Q underflows before the product would.
        return std::exp(std::log(upper_fraction(a, z, nullptr)) + std::lgamma(a));
    }
    return reg_upper_gamma(a, z) * std::tgamma(a);
}

double log_reg_hyp0f1(double b, double z) {
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw InvalidParameter("0F1: parameter b must be positive, got " + std::to_string(b));
    }
    if (!(z >= 0.0) || !std::isfinite(z)) {
        throw RangeError("0F1: log form requires finite z >= 0, got " + std::to_string(z));
    }
    if (z == 0.0) {
        return -std::lgamma(b);
    }
    const double nu = b - 1.0;
    const double x = 2.0 * std::sqrt(z);
    if (x > 60.0 + 2.0 * nu * nu) {
        // 0F1~(b; z) = z^{-nu/2} I_nu(2 sqrt(z))
        const double log_i = log_bessel_i_asymptotic(nu, x);
        if (std::isfinite(log_i)) {
            return -0.5 * nu * std::log(z) + log_i;
        }
    }
    return log_hyp0f1_series(b, z, nullptr);
}

FnResult reg_hyp0f1_e(double b, double z, double max_abs_z) {
    if (!(b > 0.0) || !std::isfinite(b)) {
        throw InvalidParameter("0F1: parameter b must be positive, got " + std::to_string(b));
    }
    if (!std::isfinite(z) || std::abs(z) > max_abs_z) {
        throw RangeError("0F1: |z| = " + std::to_string(std::abs(z)) +
                         " outside supported range " + std::to_string(max_abs_z));
    }
    if (z >= 0.0) {
        const double log_value = log_reg_hyp0f1(b, z);
        if (log_value > std::log(std::numeric_limits<double>::max())) {
            throw RangeError("0F1: value overflows double at z = " + std::to_string(z) +
                             "; use log_reg_hyp0f1");
        }
        const double value = std::exp(log_value);
        return {value, value * kEps * (std::abs(log_value) + 50.0)};
    }
    const double y = -z;
    if (b >= 1.0) {
        // 0F1~(b; -y) = y^{(1-b)/2} J_{b-1}(2 sqrt(y))
        const double value = std::pow(y, 0.5 * (1.0 - b)) * std::cyl_bessel_j(b - 1.0, 2.0 * std::sqrt(y));
        return {value, 1e-14 * (std::abs(value) + std::pow(y, -0.25 * (2.0 * b - 1.0)))};
    }
    if (y > 40.0) {
        throw RangeError("0F1: negative z below -40 unsupported for b < 1");
    }
    // Alternating series; cancellation bounded by the largest term.
    double term = 1.0 / std::tgamma(b);
    double sum = term;
    double largest = std::abs(term);
    for (int k = 0; k < kMaxIter; ++k) {
        term *= z / ((k + 1.0) * (b + k));
        sum += term;
        largest = std::max(largest, std::abs(term));
        if (std::abs(term) < 1e-18 * largest && y < (k + 1.0) * (b + k)) {
            break;
        }
    }
    return {sum, largest * kEps * 10.0};
}

double reg_hyp0f1(double b, double z, double max_abs_z) { return reg_hyp0f1_e(b, z, max_abs_z).value; }

double lambert_w0(double z) {
    constexpr double inv_e = 1.0 / std::numbers::e;
    if (std::isnan(z)) {
        throw DomainError("lambert_w0: NaN argument");
    }
    if (z < -inv_e) {
        if (z > -inv_e - 4.0 * kEps) {
            return -1.0;
        }
        throw DomainError("lambert_w0: argument " + std::to_string(z) + " below -1/e");
    }
    if (z == 0.0) {
        return 0.0;
    }
    if (std::isinf(z)) {
        return z;
    }

    double w;
    if (z < -0.25) {
        // Branch-point expansion in p = sqrt(2 (e z + 1)).
        const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * z + 1.0)));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (z < 3.0) {
        w = std::log1p(z);
        w *= 1.0 - w / (2.0 + w) * 0.5;
    } else {
        const double l1 = std::log(z);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int i = 0; i < 100; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - z;
        if (f == 0.0) {
            break;
        }
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) {
            break;
        }
        const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        const double next = w - step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(next))) {
            w = next;
            break;
        }
        w = next;
    }
    return std::max(w, -1.0);
}

} // namespace grokk::special
