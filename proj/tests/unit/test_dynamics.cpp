#include <doctest.h>

#include <cmath>

#include "grokklab/analytic_predictor.hpp"
#include "grokklab/dynamics_sim.hpp"
#include "grokklab/errors.hpp"
#include "grokklab/exp_runner.hpp"
#include "grokklab/grok_analysis.hpp"

using namespace grokk;

namespace {

ExperimentConfig small(double lam, int d_in = 64) {
    ExperimentConfig c;
    c.d_in = d_in;
    c.n_tr = static_cast<int>(std::lround(d_in / lam));
    c.n_gen = 2000;
    c.time_grid = runner::log_time_grid(1.0, 3000.0, 40, 1.0);
    return c;
}

} // namespace

TEST_CASE("config validation") {
    ExperimentConfig c = small(0.5);
    CHECK_NOTHROW(c.validate());
    CHECK(c.effective_n_gen() == 2000);
    c.n_gen = 0;
    CHECK(c.effective_n_gen() == 10000);
    c.d_in = 0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = small(0.5);
    c.eta0 = -1.0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = small(0.5);
    c.epsilon = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    c = small(0.5);
    c.time_grid = {0.0, 5.0, 3.0};
    CHECK_THROWS_AS(c.validate(), InvalidParameter);
    CHECK(parse_arch("two_layer_tanh") == Arch::two_layer_tanh);
    CHECK_THROWS_AS(parse_arch("mlp"), InvalidParameter);
}

TEST_CASE("accuracy_empirical") {
    CHECK(accuracy_empirical(Eigen::MatrixXd::Zero(10, 3), 1e-3, 3) == 1.0);
    Eigen::MatrixXd e(4, 2);
    e << 0.0, 0.0, 0.04, 0.0, 0.05, 0.0, 1.0, 1.0;
    // squared norm / 2 <= 1e-3: rows 0 and 1 (0.0008), not 2 (0.00125)
    CHECK(accuracy_empirical(e, 1e-3, 2) == doctest::Approx(0.5));
}

TEST_CASE("dt = 1 iterative GD equals the discrete spectral evaluation") {
    for (double gamma : {0.0, 0.01}) {
        ExperimentConfig c = small(0.9, 128);
        c.gamma = gamma;
        c.d_out = 2;
        const Trace it = run_iterative(c);
        const Trace sp = run_spectral(c, training_gram(c), SpectralMode::discrete_gd);
        REQUIRE(it.size() == sp.size());
        for (std::size_t i = 0; i < it.size(); ++i) {
            CHECK(it.l_tr[i] == doctest::Approx(sp.l_tr[i]).epsilon(1e-8));
            CHECK(it.l_gen_population[i] == doctest::Approx(sp.l_gen[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("spectral engine limits") {
    ExperimentConfig c = small(0.5, 1000);
    c.time_grid = {0.0, 1e9};
    const Trace tr = run_spectral(c, training_gram(c));
    CHECK(tr.l_gen[0] == doctest::Approx(1.0).epsilon(0.1));
    CHECK(tr.l_tr[1] < 1e-12);
    CHECK(tr.l_gen[1] < 1e-12);
    CHECK(tr.a_gen[1] == 1.0);

    ExperimentConfig two = small(0.5);
    two.arch = Arch::two_layer_linear;
    CHECK_THROWS_AS(run_spectral(two, training_gram(small(0.5))), UnsupportedError);
    ExperimentConfig noisy = small(0.5);
    noisy.sigma_delta = 0.1;
    CHECK_THROWS_AS(run_spectral(noisy, training_gram(noisy)), UnsupportedError);
}

TEST_CASE("near-identity covariance: no delay") {
    ExperimentConfig c;
    c.d_in = 32;
    c.n_tr = 32000;
    c.n_gen = 10000;
    c.time_grid = runner::log_time_grid(1.0, 2000.0, 120, 1.0);
    const Trace tr = run_iterative(c);
    const GrokReport r = grok_from_curves(tr.times, tr.a_tr, tr.a_gen);
    REQUIRE(r.delta_t.has_value());
    CHECK(std::abs(*r.delta_t) < 0.05 * *r.t_star_tr);
}

TEST_CASE("stability guard and divergence") {
    ExperimentConfig c = small(0.5);
    c.eta0 = 1.0;
    CHECK_THROWS_AS(run_iterative(c), InstabilityError);
}

TEST_CASE("step lattice") {
    ExperimentConfig c = small(0.5);
    c.dt = 25.0;
    c.time_grid = {0.0, 25.0, 30.0};
    CHECK_THROWS_AS(grid_steps(c), InvalidParameter);
    c.time_grid = {0.0, 25.0, 50.0};
    CHECK(grid_steps(c) == std::vector<long long>{0, 1, 2});
}

TEST_CASE("two-layer initialization and h") {
    ExperimentConfig c = small(0.5, 200);
    c.arch = Arch::two_layer_linear;
    c.d_h = 100;
    c.d_out = 2;
    c.time_grid = runner::log_time_grid(1.0, 500.0, 20, 1.0);
    const TwoLayerTrace tl = run_two_layer(c);
    CHECK(tl.h.front() == doctest::Approx(0.5).epsilon(0.1));
    CHECK(tl.d0_norm_sq == doctest::Approx(expected_two_layer_d0_norm_sq(100) * 2.0).epsilon(0.5));
    for (std::size_t i = 1; i < tl.trace.size(); ++i) CHECK(tl.trace.l_tr[i] <= tl.trace.l_tr[i - 1] + 1e-12);
    const NetworkWeights w = student_weights(c);
    REQUIRE(w.layers.size() == 2);
    CHECK(w.layers[0].rows() == 200);
    CHECK(w.layers[1].cols() == 2);
}

TEST_CASE("determinism and alpha") {
    ExperimentConfig c = small(0.9);
    const Trace a = run_iterative(c);
    const Trace b = run_iterative(c);
    CHECK(a.l_tr == b.l_tr);
    CHECK(a.l_gen == b.l_gen);
    c.alpha = 0.0;
    const Eigen::MatrixXd s = student_weights(c).layers[0];
    CHECK(s.squaredNorm() == 0.0);
}
