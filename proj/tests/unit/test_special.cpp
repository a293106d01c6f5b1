#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/lambert_w.hpp>

#include "grokklab/errors.hpp"
#include "grokklab/quadrature.hpp"
#include "grokklab/special_fns.hpp"

using namespace grokk;
namespace sp = grokk::special;

namespace {

double erf_taylor(double x) {
    // 2/sqrt(pi) sum (-1)^n x^(2n+1) / (n! (2n+1))
    long double term = x;
    long double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -static_cast<long double>(x) * x / n;
        const long double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-22L) break;
    }
    return static_cast<double>(sum * 2.0L / std::sqrt(std::numbers::pi_v<long double>));
}

double hyp0f1_series(double b, double z) {
    long double term = 1.0L / std::tgamma(static_cast<long double>(b));
    long double sum = term;
    for (int k = 0; k < 500; ++k) {
        term *= z / ((k + 1.0L) * (b + k));
        sum += term;
        if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
    }
    return static_cast<double>(sum);
}

double bessel_i1_series(double x) {
    long double term = x / 2.0L;
    long double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= (x / 2.0L) * (x / 2.0L) / (k * (k + 1.0L));
        sum += term;
        if (term < 1e-22L * sum) break;
    }
    return static_cast<double>(sum);
}

} // namespace

TEST_CASE("erf") {
    CHECK(sp::erf(0.0) == 0.0);
    CHECK(sp::erf(std::sqrt(2.0)) == doctest::Approx(0.954499736103642).epsilon(1e-13));
    CHECK(std::abs(sp::erf(1.0) - erf_taylor(1.0)) <= 1e-15);
    CHECK(std::abs(sp::erf(1.0) - 0.8427007929497149) <= 1e-15);
    for (double x = -4.0; x <= 4.0; x += 0.173) {
        CHECK(std::abs(sp::erf(x) - erf_taylor(x)) <= 1e-12);
        CHECK(sp::erf(-x) == -sp::erf(x));
    }
}

TEST_CASE("regularized upper incomplete gamma") {
    for (double x : {0.0, 0.1, 1.0, 5.0, 30.0}) {
        CHECK(std::abs(sp::reg_upper_gamma(1.0, x) - std::exp(-x)) <= 1e-12);
    }
    for (double a : {0.5, 2.5, 350.0}) CHECK(sp::reg_upper_gamma(a, 0.0) == 1.0);

    // defining integral by quadrature
    const double a = 2.5, z = 3.0;
    const auto r = quad::integrate([&](double t) { return std::exp(-t) * std::pow(t, a - 1.0); }, {z, 10.0, 40.0, 200.0});
    CHECK(std::abs(sp::reg_upper_gamma(a, z) - r.value / std::tgamma(a)) <= 1e-10);

    for (double av : {0.5, 1.0, 2.5, 25.0, 350.0}) {
        double prev = 2.0;
        for (double zz = 0.0; zz < 3.0 * av + 30.0; zz += 0.05 * av + 0.01) {
            const double q = sp::reg_upper_gamma(av, zz);
            CHECK(std::abs(q - boost::math::gamma_q(av, zz)) <= 1e-10);
            CHECK(std::abs(sp::reg_lower_gamma(av, zz) - boost::math::gamma_p(av, zz)) <= 1e-10);
            CHECK(q < prev + 1e-15);
            prev = q;
        }
    }
    CHECK(sp::upper_gamma(0.5, 2.0) == doctest::Approx(boost::math::tgamma(0.5, 2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(sp::reg_upper_gamma(0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(sp::reg_upper_gamma(-1.0, 1.0), InvalidParameter);
}

TEST_CASE("regularized 0F1") {
    CHECK(sp::reg_hyp0f1(2.0, 0.0) == 1.0);
    CHECK(sp::reg_hyp0f1(2.0, 1.0) == doctest::Approx(hyp0f1_series(2.0, 1.0)).epsilon(1e-14));
    const double z = 100.0;
    const double x = 2.0 * std::sqrt(z);
    CHECK(sp::reg_hyp0f1(2.0, z) == doctest::Approx(bessel_i1_series(x) / std::sqrt(z)).epsilon(1e-8));
    for (double zz : {0.3, 7.0, 55.0, 900.0, 4e4, 6e4}) {
        const double ref = boost::math::cyl_bessel_i(1.0, 2.0 * std::sqrt(zz)) / std::sqrt(zz);
        CHECK(sp::reg_hyp0f1(2.0, zz) == doctest::Approx(ref).epsilon(1e-10));
    }
    // log form keeps going where the value overflows
    const double big = 1e8;
    const double ref_log = 2.0 * std::sqrt(big) - 0.5 * std::log(4.0 * std::numbers::pi * std::sqrt(big)) - 0.5 * std::log(big);
    CHECK(sp::log_reg_hyp0f1(2.0, big) == doctest::Approx(ref_log).epsilon(1e-7));
    for (double zz : {-0.5, -3.0, -30.0}) {
        CHECK(sp::reg_hyp0f1(2.0, zz) == doctest::Approx(hyp0f1_series(2.0, zz)).epsilon(1e-10));
        CHECK(sp::reg_hyp0f1(0.5, zz) == doctest::Approx(hyp0f1_series(0.5, zz)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(sp::reg_hyp0f1(2.0, 2e6), RangeError);
    CHECK_THROWS_AS(sp::reg_hyp0f1(2.0, 1e6 + 1.0, 1e6), RangeError);
}

TEST_CASE("lambert W0") {
    CHECK(sp::lambert_w0(0.0) == 0.0);
    CHECK(sp::lambert_w0(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
    double lo = 1.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::exp(mid) < 10.0 ? lo : hi) = mid;
    }
    CHECK(std::abs(sp::lambert_w0(10.0) - lo) <= 1e-12);
    CHECK(sp::lambert_w0(-1.0 / std::numbers::e) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK_THROWS_AS(sp::lambert_w0(-0.5), DomainError);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0 / std::numbers::e + 1e-12, 1.0);
    std::uniform_real_distribution<double> ex(-3.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double z = i % 2 == 0 ? u(rng) : std::pow(10.0, ex(rng));
        const double w = sp::lambert_w0(z);
        CHECK(std::abs(w * std::exp(w) - z) <= 1e-10 * std::max(1.0, std::abs(z)));
        CHECK(w >= -1.0);
        CHECK(w == doctest::Approx(boost::math::lambert_w0(z)).epsilon(1e-9));
    }
}
