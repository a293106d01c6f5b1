#include "grokklab/rmt_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "grokklab/errors.hpp"

namespace grokk {

MPParams::MPParams(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameter("MP law: lambda must be positive and finite, got " + std::to_string(lambda));
    }
    const double s = std::sqrt(lambda);
    lo_ = (1.0 - s) * (1.0 - s);
    hi_ = (1.0 + s) * (1.0 + s);
}

double mp_density(const MPParams& p, double nu) {
    if (!std::isfinite(nu)) {
        throw InvalidParameter("mp_density: nu must be finite");
    }
    if (nu <= p.lambda_minus() || nu >= p.lambda_plus() || nu <= 0.0) {
        return 0.0;
    }
    const double r = (p.lambda_plus() - nu) * (nu - p.lambda_minus());
    return std::sqrt(r) / (2.0 * std::numbers::pi * p.lambda() * nu);
}

double mp_zero_mass(const MPParams& p) { return std::max(1.0 - 1.0 / p.lambda(), 0.0); }

namespace {

// theta -> integrand of the continuous part after nu = lo + W sin^2 theta.
// nu = lambda_- + W sin^2(theta); f receives nu and the offset nu - lambda_-
// computed without cancellation.
struct ThetaIntegrand {
    const MPParams& p;
    const std::function<double(double, double)>& f;

    double operator()(double theta) const {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        const double w = p.width();
        const double x = w * s * s;
        const double nu = p.lambda_minus() + x;
        if (nu <= 0.0) {
            // lambda = 1 at theta = 0: the jacobian factor cancels 1/nu.
            return f(0.0, 0.0) * w * c * c / (std::numbers::pi * p.lambda());
        }
        return f(nu, x) * w * x * c * c / (std::numbers::pi * p.lambda() * nu);
    }
};

std::vector<double> geometric_breaks(double upper) {
    std::vector<double> b{0.0};
    for (int k = 40; k >= 0; --k) {
        b.push_back(upper * std::ldexp(1.0, -k));
    }
    return b;
}

} // namespace

quad::Result mp_continuous_integral(const MPParams& p, const std::function<double(double, double)>& f,
                                    const quad::Options& opts) {
    const ThetaIntegrand g{p, f};
    return quad::integrate(std::cref(g), geometric_breaks(0.5 * std::numbers::pi), opts);
}

quad::Result mp_continuous_integral(const MPParams& p, const std::function<double(double)>& f,
                                    const quad::Options& opts) {
    const std::function<double(double, double)> g = [&f](double nu, double) { return f(nu); };
    return mp_continuous_integral(p, g, opts);
}

double mp_expectation(const MPParams& p, const std::function<double(double)>& f, double tol) {
    if (!(tol > 0.0)) {
        throw InvalidParameter("mp_expectation: tol must be positive");
    }
    quad::Options opts;
    opts.abs_tol = tol;
    const double atom = mp_zero_mass(p);
    const double cont = mp_continuous_integral(p, f, opts).value;
    return atom > 0.0 ? atom * f(0.0) + cont : cont;
}

double mp_cdf(const MPParams& p, double x) {
    if (x < 0.0) {
        return 0.0;
    }
    const double atom = mp_zero_mass(p);
    if (x <= p.lambda_minus()) {
        return atom;
    }
    if (x >= p.lambda_plus()) {
        return 1.0;
    }
    const double theta_x = std::asin(std::sqrt((x - p.lambda_minus()) / p.width()));
    const std::function<double(double, double)> f = [](double, double) { return 1.0; };
    const ThetaIntegrand g{p, f};
    quad::Options opts;
    opts.abs_tol = 1e-12;
    return atom + quad::integrate(std::cref(g), 0.0, theta_x, opts).value;
}

double ks_distance(const Eigen::VectorXd& sorted_eigenvalues, const MPParams& p, double zero_cut) {
    const Eigen::Index n = sorted_eigenvalues.size();
    if (n == 0) {
        throw InvalidParameter("ks_distance: empty sample");
    }
    const double dn = static_cast<double>(n);
    Eigen::Index zeros = 0;
    while (zeros < n && sorted_eigenvalues[zeros] < zero_cut) {
        ++zeros;
    }
    double d = 0.0;
    if (zeros > 0) {
        d = std::max(d, std::abs(zeros / dn - mp_zero_mass(p)));
    }
    for (Eigen::Index i = zeros; i < n; ++i) {
        const double f = mp_cdf(p, sorted_eigenvalues[i]);
        d = std::max({d, std::abs((i + 1) / dn - f), std::abs(i / dn - f)});
    }
    return d;
}

std::size_t max_dim() {
    if (const char* env = std::getenv("GROKKLAB_MAX_DIM")) {
        try {
            const long v = std::stol(env);
            if (v > 0) {
                return static_cast<std::size_t>(v);
            }
        } catch (const std::exception&) {
        }
        throw InvalidParameter(std::string("GROKKLAB_MAX_DIM is not a positive integer: ") + env);
    }
    return 4096;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, stddev);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = normal(gen);
        }
    }
    return m;
}

GaussianDataset gaussian_dataset(Eigen::Index n, Eigen::Index d_in, std::uint64_t seed) {
    if (n < 1 || d_in < 1) {
        throw InvalidParameter("gaussian_dataset: n and d_in must be >= 1");
    }
    if (static_cast<std::size_t>(d_in) > max_dim()) {
        throw SizeLimitError("d_in = " + std::to_string(d_in) + " exceeds the size cap " +
                             std::to_string(max_dim()) + " (set GROKKLAB_MAX_DIM to raise it)");
    }
    return {gaussian_matrix(n, d_in, 1.0, seed), seed};
}

Eigen::MatrixXd gram_of(const Eigen::MatrixXd& samples) {
    const double inv_n = 1.0 / static_cast<double>(samples.rows());
    Eigen::MatrixXd g = (samples.transpose() * samples) * inv_n;
    // Symmetrize against roundoff from the blocked product.
    return 0.5 * (g + g.transpose());
}

Eigen::MatrixXd sample_gram(Eigen::Index d_in, Eigen::Index n, std::uint64_t seed) {
    return gram_of(gaussian_dataset(n, d_in, seed).samples);
}

namespace {

void clamp_eigenvalues(Eigen::VectorXd& v) {
    const double scale = std::max(1.0, v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0);
    for (double& x : v) {
        if (x < 0.0) {
            if (x < -1e-10 * scale) {
                throw NumericFailure("eigensolver returned eigenvalue " + std::to_string(x) +
                                     " for a matrix expected to be PSD");
            }
            x = 0.0;
        }
    }
}

} // namespace

Eigensystem eigensystem(const Eigen::MatrixXd& gram) {
    if (gram.rows() != gram.cols()) {
        throw InvalidParameter("eigensystem: matrix must be square");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("eigensolver did not converge");
    }
    Eigensystem es{solver.eigenvalues(), solver.eigenvectors()};
    clamp_eigenvalues(es.values);
    return es;
}

Eigen::VectorXd eigenvalues_of(const Eigen::MatrixXd& gram) {
    if (gram.rows() != gram.cols()) {
        throw InvalidParameter("eigenvalues_of: matrix must be square");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("eigensolver did not converge");
    }
    Eigen::VectorXd v = solver.eigenvalues();
    clamp_eigenvalues(v);
    return v;
}

Spectrum spectrum_of(const Eigensystem& es, const Eigen::MatrixXd& d0) {
    if (d0.rows() != es.vectors.rows()) {
        throw InvalidParameter("spectrum_of: d0 must have d_in rows");
    }
    const Eigen::MatrixXd coeff = es.vectors.transpose() * d0;
    return {es.values, coeff.rowwise().squaredNorm()};
}

Spectrum spectrum_of(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& d0) {
    return spectrum_of(eigensystem(gram), d0);
}

double spectral_sum(const Spectrum& s, const std::function<double(double)>& f) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        acc += f(s.eigenvalues[i]) * s.d0_projections[i];
    }
    return acc;
}

double equal_projection_sum(const Spectrum& s, const std::function<double(double)>& f) {
    const double per = s.d0_projections.sum() / static_cast<double>(s.eigenvalues.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        acc += f(s.eigenvalues[i]);
    }
    return acc * per;
}

} // namespace grokk
