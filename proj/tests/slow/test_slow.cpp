#include <doctest.h>

#include <cmath>
#include <vector>

#include "grokklab/analytic_predictor.hpp"
#include "grokklab/dynamics_sim.hpp"
#include "grokklab/exp_runner.hpp"
#include "grokklab/quadrature.hpp"
#include "grokklab/rmt_core.hpp"

using namespace grokk;

namespace {

const std::vector<Eigen::VectorXd>& spectra_2000x4000() {
    static const std::vector<Eigen::VectorXd> s = [] {
        std::vector<Eigen::VectorXd> v;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) v.push_back(eigenvalues_of(sample_gram(2000, 4000, seed)));
        return v;
    }();
    return s;
}

} // namespace

TEST_CASE("E[exp(-nu)] against 50 sampled spectra") {
    double mc = 0.0;
    for (const auto& ev : spectra_2000x4000()) mc += (-ev.array()).exp().mean() / 50.0;
    const double q = mp_expectation(MPParams(0.5), [](double v) { return std::exp(-v); });
    CHECK(std::abs(mc - q) <= 1e-4);
}

TEST_CASE("MP density against a histogram of 20 spectra") {
    const MPParams p(0.5);
    const double lo = 0.975, hi = 1.025;
    long count = 0;
    for (int i = 0; i < 20; ++i) {
        const auto& ev = spectra_2000x4000()[i];
        count += (ev.array() >= lo && ev.array() < hi).count();
    }
    const double expected = 20.0 * 2000.0 * quad::integrate([&](double v) { return mp_density(p, v); }, lo, hi).value;
    CAPTURE(count);
    CAPTURE(expected);
    CHECK(std::abs(count - expected) <= 3.0 * std::sqrt(expected));
    CHECK(mp_density(p, 1.0) == doctest::Approx(expected / (20.0 * 2000.0 * (hi - lo))).epsilon(1e-3));
}

TEST_CASE("d_in = 1000: iterative GD against the discrete spectral evaluation") {
    ExperimentConfig c;
    c.d_in = 1000;
    c.n_tr = 1111;
    c.n_gen = 1000;
    c.time_grid = runner::log_time_grid(1.0, 3000.0, 60, 1.0);
    const Trace it = run_iterative(c);
    const Trace sp = run_spectral(c, training_gram(c), SpectralMode::discrete_gd);
    for (std::size_t i = 0; i < it.size(); ++i) {
        CHECK(it.l_tr[i] == doctest::Approx(sp.l_tr[i]).epsilon(1e-6));
        CHECK(it.l_gen_population[i] == doctest::Approx(sp.l_gen[i]).epsilon(1e-6));
    }
}

TEST_CASE("d_out = 50 spectral run against the rescaled quadrature") {
    ExperimentConfig c;
    c.d_in = 1000;
    c.n_tr = 1111;
    c.d_out = 50;
    c.time_grid = runner::log_time_grid(10.0, 1e6, 80);
    const Trace sp = run_spectral(c, training_gram(c));
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const LossPair l = dout_losses(c.lambda(), c.eta0, sp.times[i], c.d_out);
        if (l.l_tr < 1e-8 / c.d_out) continue;
        const double dev_tr = std::abs(std::log(sp.l_tr[i]) - std::log(l.l_tr)) / std::max(1.0, std::abs(std::log(l.l_tr)));
        const double dev_gen =
            std::abs(std::log(sp.l_gen[i]) - std::log(l.l_gen)) / std::max(1.0, std::abs(std::log(l.l_gen)));
        CHECK(dev_tr <= 0.10);
        CHECK(dev_gen <= 0.10);
    }
}
