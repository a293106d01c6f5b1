#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "grokklab/quadrature.hpp"

namespace grokk {

/// Marchenko-Pastur law with ratio lambda = d_in / N.
class MPParams {
public:
    explicit MPParams(double lambda);

    double lambda() const noexcept { return lambda_; }
    double lambda_minus() const noexcept { return lo_; }
    double lambda_plus() const noexcept { return hi_; }
    double width() const noexcept { return hi_ - lo_; }

private:
    double lambda_;
    double lo_;
    double hi_;
};

/// Continuous part of the density; zero outside [lambda_-, lambda_+].
double mp_density(const MPParams& p, double nu);

/// Point mass at zero, max(1 - 1/lambda, 0).
double mp_zero_mass(const MPParams& p);

/// Integral of f against the continuous part only, via nu = lambda_- + W sin^2(theta).
/// The theta range is pre-split geometrically toward theta = 0 so that
/// integrands decaying like exp(-c nu) with large c resolve.
quad::Result mp_continuous_integral(const MPParams& p, const std::function<double(double)>& f,
                                    const quad::Options& opts);
/// Same, with f(nu, nu - lambda_-) so integrands like exp(-c (nu - lambda_-))
/// avoid the cancellation in the offset.
quad::Result mp_continuous_integral(const MPParams& p, const std::function<double(double, double)>& f,
                                    const quad::Options& opts);

/// zero_mass * f(0) + continuous integral. Throws QuadratureFailure.
double mp_expectation(const MPParams& p, const std::function<double(double)>& f, double tol = 1e-10);

/// Distribution function including the atom: P(nu <= x).
double mp_cdf(const MPParams& p, double x);

/// KS distance between sorted sample eigenvalues and the MP law.
/// Values below `zero_cut` count as exact zeros.
double ks_distance(const Eigen::VectorXd& sorted_eigenvalues, const MPParams& p, double zero_cut = 1e-10);

// ---- sampling -------------------------------------------------------------

/// Cap on d_in: GROKKLAB_MAX_DIM if set, else 4096.
std::size_t max_dim();

/// Deterministic sub-seed for a named stream (splitmix64 mix of both).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// rows x cols matrix of iid N(0, stddev^2) from mt19937_64(seed), filled row by row.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, std::uint64_t seed);

struct GaussianDataset {
    Eigen::MatrixXd samples;  // N x d_in
    std::uint64_t seed = 0;
};

GaussianDataset gaussian_dataset(Eigen::Index n, Eigen::Index d_in, std::uint64_t seed);

/// (1/N) X^T X.
Eigen::MatrixXd gram_of(const Eigen::MatrixXd& samples);

/// Gram matrix of a fresh dataset of n standard-normal samples.
/// Throws SizeLimitError when d_in > max_dim().
Eigen::MatrixXd sample_gram(Eigen::Index d_in, Eigen::Index n, std::uint64_t seed);

// ---- spectra --------------------------------------------------------------

struct Eigensystem {
    Eigen::VectorXd values;   // ascending, clamped at 0
    Eigen::MatrixXd vectors;  // columns
};

Eigensystem eigensystem(const Eigen::MatrixXd& gram);
Eigen::VectorXd eigenvalues_of(const Eigen::MatrixXd& gram);

struct Spectrum {
    Eigen::VectorXd eigenvalues;     // ascending
    Eigen::VectorXd d0_projections;  // sum over columns of <v_i, d0_col>^2
};

Spectrum spectrum_of(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& d0);
Spectrum spectrum_of(const Eigensystem& es, const Eigen::MatrixXd& d0);

/// sum_i f(nu_i) proj_i = Tr[d0^T f(gram) d0].
double spectral_sum(const Spectrum& s, const std::function<double(double)>& f);

/// The same sum under the equal-projection approximation
/// proj_i -> |d0|^2 / d_in.
double equal_projection_sum(const Spectrum& s, const std::function<double(double)>& f);

} // namespace grokk
