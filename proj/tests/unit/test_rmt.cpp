#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "grokklab/errors.hpp"
#include "grokklab/rmt_core.hpp"

using namespace grokk;

TEST_CASE("MP support and density") {
    const MPParams p(0.9);
    CHECK(p.lambda_minus() == doctest::Approx(0.002633403898972));
    CHECK(p.lambda_plus() == doctest::Approx(3.797366596101028));
    CHECK(mp_density(p, 0.0026) == 0.0);
    CHECK(mp_density(p, 3.8) == 0.0);
    CHECK(mp_density(p, 1.0) > 0.0);
    CHECK(mp_density(MPParams(1.0), 4.0001) == 0.0);
    CHECK_THROWS_AS(MPParams(0.0), InvalidParameter);
    CHECK_THROWS_AS(MPParams(-1.0), InvalidParameter);
}

TEST_CASE("zero mass") {
    CHECK(mp_zero_mass(MPParams(0.9)) == 0.0);
    CHECK(mp_zero_mass(MPParams(1.5)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(mp_zero_mass(MPParams(2.0)) == 0.5);
}

TEST_CASE("normalization, moments, inverse moments") {
    for (double lam : {0.1, 0.5, 0.9, 1.0, 1.5, 3.0}) {
        const MPParams p(lam);
        CAPTURE(lam);
        CHECK(std::abs(mp_expectation(p, [](double) { return 1.0; }) - 1.0) <= 1e-10);
        CHECK(std::abs(mp_expectation(p, [](double v) { return v; }) - 1.0) <= 1e-10);
        CHECK(std::abs(mp_expectation(p, [](double v) { return v * v; }) - (1.0 + lam)) <= 1e-9);
    }
    // E[1/nu] = 1/(1-lambda), E[1/nu^2] = 1/(1-lambda)^3
    for (double lam : {0.25, 0.5}) {
        const MPParams p(lam);
        CHECK(mp_expectation(p, [](double v) { return 1.0 / v; }) == doctest::Approx(1.0 / (1.0 - lam)).epsilon(1e-9));
        CHECK(mp_expectation(p, [](double v) { return 1.0 / (v * v); }) ==
              doctest::Approx(1.0 / std::pow(1.0 - lam, 3)).epsilon(1e-9));
    }
}

TEST_CASE("CDF") {
    const MPParams p(1.5);
    CHECK(mp_cdf(p, -1.0) == 0.0);
    CHECK(mp_cdf(p, 0.0) == doctest::Approx(1.0 / 3.0));
    CHECK(mp_cdf(p, 100.0) == doctest::Approx(1.0));
    double prev = 0.0;
    for (double x = 0.0; x < p.lambda_plus() + 0.1; x += 0.05) {
        const double c = mp_cdf(p, x);
        CHECK(c >= prev - 1e-12);
        prev = c;
    }
}

TEST_CASE("sampled Gram matrices") {
    const Eigen::MatrixXd g = sample_gram(2, 1000000, 3);
    CHECK((g - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 0.01);

    const Eigen::VectorXd ev = eigenvalues_of(sample_gram(4, 2, 1));
    CHECK((ev.array() > 1e-10).count() <= 2);

    const Eigen::VectorXd ev9 = eigenvalues_of(sample_gram(1000, 1111, 7));
    CHECK(ks_distance(ev9, MPParams(1000.0 / 1111.0)) <= 0.03);

    const Eigen::VectorXd ev15 = eigenvalues_of(sample_gram(1000, 667, 2));
    const double zf = static_cast<double>((ev15.array() < 1e-10).count()) / 1000.0;
    CHECK(std::abs(zf - 1.0 / 3.0) <= 0.02);

    CHECK(sample_gram(8, 20, 5) == sample_gram(8, 20, 5));
    CHECK(sample_gram(8, 20, 5) != sample_gram(8, 20, 6));
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("size cap") {
    ::setenv("GROKKLAB_MAX_DIM", "64", 1);
    CHECK(max_dim() == 64);
    CHECK_THROWS_AS(sample_gram(65, 10, 1), SizeLimitError);
    ::unsetenv("GROKKLAB_MAX_DIM");
    CHECK(max_dim() == 4096);
}

TEST_CASE("eigenvalue clamp") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1e-13;
    CHECK(eigenvalues_of(m)(0) == 0.0);
    m(1, 1) = -0.1;
    CHECK_THROWS_AS(eigenvalues_of(m), NumericFailure);
}

TEST_CASE("spectrum projections") {
    Eigen::MatrixXd d0(3, 2);
    d0 << 1, 2, 3, 4, 5, 6;
    const Spectrum si = spectrum_of(Eigen::MatrixXd::Identity(3, 3), d0);
    CHECK((si.eigenvalues.array() == 1.0).all());
    CHECK(si.d0_projections.sum() == doctest::Approx(d0.squaredNorm()));

    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = 2.0;
    const Spectrum s2 = spectrum_of(g, Eigen::Vector2d(1.0, 1.0));
    CHECK(s2.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(s2.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(s2.d0_projections(0) == doctest::Approx(1.0));
    CHECK(s2.d0_projections(1) == doctest::Approx(1.0));

    const Eigen::MatrixXd gram = sample_gram(64, 100, 9);
    const Eigen::MatrixXd d = gaussian_matrix(64, 3, 0.1, 4);
    const Spectrum s = spectrum_of(gram, d);
    CHECK(s.d0_projections.sum() == doctest::Approx(d.squaredNorm()).epsilon(1e-8));
    const double direct = (d.transpose() * gram * d).trace();
    CHECK(spectral_sum(s, [](double v) { return v; }) == doctest::Approx(direct).epsilon(1e-8));

    const Eigensystem es = eigensystem(gram);
    const Eigen::MatrixXd expg =
        es.vectors * (-0.7 * es.values).array().exp().matrix().asDiagonal() * es.vectors.transpose();
    CHECK(spectral_sum(s, [](double v) { return std::exp(-0.7 * v); }) ==
          doctest::Approx((d.transpose() * expg * d).trace()).epsilon(1e-8));

    const double eq = equal_projection_sum(s, [](double v) { return v; });
    CHECK(eq == doctest::Approx(d.squaredNorm() * s.eigenvalues.mean()).epsilon(1e-12));
}
