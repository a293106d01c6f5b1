#include <cmath>
#include <string>
#include <utility>

#include "grokklab/dynamics_sim.hpp"
#include "grokklab/errors.hpp"
#include "grokklab/rmt_core.hpp"

namespace grokk {
namespace {

Eigen::MatrixXd forward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w0, const Eigen::MatrixXd& w1,
                        bool tanh_act) {
    if (!tanh_act) {
        return x * (w0 * w1);
    }
    return (x * w0).array().tanh().matrix() * w1;
}

double half_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return 0.5 * (a.squaredNorm() + b.squaredNorm());
}

} // namespace

TwoLayerTrace run_two_layer(const ExperimentConfig& c) {
    c.validate();
    if (c.arch == Arch::one_layer) {
        throw InvalidParameter("run_two_layer needs a two-layer arch");
    }
    const bool use_tanh = c.arch == Arch::two_layer_tanh;
    const auto steps = grid_steps(c);
    const Eigen::MatrixXd x = training_inputs(c);
    const Eigen::MatrixXd xg = generalization_inputs(c);
    const NetworkWeights teacher = teacher_weights(c);
    NetworkWeights student = student_weights(c);
    Eigen::MatrixXd& s0 = student.layers[0];
    Eigen::MatrixXd& s1 = student.layers[1];
    const Eigen::MatrixXd& t0 = teacher.layers[0];
    const Eigen::MatrixXd& t1 = teacher.layers[1];

    Eigen::MatrixXd y = forward(x, t0, t1, use_tanh);
    if (c.sigma_delta > 0.0) {
        y += gaussian_matrix(y.rows(), y.cols(), c.sigma_delta, derive_seed(c.seed, stream::label_noise));
    }
    const Eigen::MatrixXd yg = forward(xg, t0, t1, use_tanh);
    const Eigen::MatrixXd t_eff = t0 * t1;

    const double inv_n = 1.0 / c.n_tr;
    const double inv_dout = 1.0 / c.d_out;
    const double eta = c.eta0 * c.dt;

    // Linear arch: GD runs in the eigenbasis of Sigma, where Sigma is diagonal.
    // s0r = V^T s0; rotated back at grid times.
    Eigen::MatrixXd basis;
    Eigen::VectorXd spectrum;
    Eigen::MatrixXd cross_r;
    Eigen::MatrixXd s0r;
    if (!use_tanh) {
        Eigensystem es = eigensystem(gram_of(x));
        basis = std::move(es.vectors);
        spectrum = std::move(es.values);
        cross_r = basis.transpose() * ((x.transpose() * y) * inv_n);
        s0r = basis.transpose() * s0;
    }

    TwoLayerTrace out;
    Trace& tr = out.trace;
    tr.config = c;
    tr.engine = Engine::iterative;
    tr.note = "GD step eta = eta0 * dt with dt = " + std::to_string(c.dt) +
              "; reported times are gradient-flow times k * dt";
    double initial = -1.0;

    long long k = 0;
    for (std::size_t g = 0; g < steps.size(); ++g) {
        for (; k < steps[g]; ++k) {
            Eigen::MatrixXd& w0 = use_tanh ? s0 : s0r;
            Eigen::MatrixXd g0;
            Eigen::MatrixXd g1;
            if (!use_tanh) {
                // M = Sigma S0 S1 - C; dL/dS1 = (2/d_out) S0^T M, dL/dS0 = (2/d_out) M S1^T
                const Eigen::MatrixXd m = spectrum.asDiagonal() * (s0r * s1) - cross_r;
                g1 = (2.0 * inv_dout) * (s0r.transpose() * m);
                g0 = (2.0 * inv_dout) * (m * s1.transpose());
            } else {
                const Eigen::MatrixXd a = (x * s0).array().tanh().matrix();
                const Eigen::MatrixXd r = a * s1 - y;
                const double scale = 2.0 * inv_n * inv_dout;
                g1 = scale * (a.transpose() * r);
                const Eigen::MatrixXd back =
                    ((r * s1.transpose()).array() * (1.0 - a.array().square())).matrix();
                g0 = scale * (x.transpose() * back);
            }
            if (c.gamma > 0.0) {
                g0 += (c.gamma * inv_dout) * w0;
                g1 += (c.gamma * inv_dout) * s1;
            }
            w0 -= eta * g0;
            s1 -= eta * g1;
        }
        if (!use_tanh) {
            s0 = basis * s0r;
        }
        const Eigen::MatrixXd r = forward(x, s0, s1, use_tanh) - y;
        const Eigen::MatrixXd rg = forward(xg, s0, s1, use_tanh) - yg;
        const double ltr = r.squaredNorm() * inv_n * inv_dout;
        if (initial < 0.0) {
            initial = std::max(ltr, 1e-300);
        }
        if (!std::isfinite(ltr) || ltr > 1e6 * initial) {
            throw InstabilityError("two-layer training loss diverged at t = " + std::to_string(k * c.dt) +
                                   "; reduce eta0 or dt");
        }
        const double lgen = rg.squaredNorm() / static_cast<double>(rg.rows()) * inv_dout;
        tr.times.push_back(static_cast<double>(k) * c.dt);
        tr.l_tr.push_back(ltr);
        tr.l_gen.push_back(lgen);
        tr.l_gen_population.push_back(use_tanh ? lgen : (s0 * s1 - t_eff).squaredNorm() * inv_dout);
        tr.a_tr.push_back(accuracy_empirical(r, c.epsilon, c.d_out));
        tr.a_gen.push_back(accuracy_empirical(rg, c.epsilon, c.d_out));
        out.h.push_back(half_norm(s0, s1));
    }

    // |D0|^2 of the effective linear map; for tanh the generalization loss at
    // initialization stands in for it.
    const NetworkWeights init = student_weights(c);
    if (!use_tanh) {
        out.d0_norm_sq = (init.layers[0] * init.layers[1] - t_eff).squaredNorm();
    } else {
        const Eigen::MatrixXd rg0 = forward(xg, init.layers[0], init.layers[1], true) - yg;
        out.d0_norm_sq = rg0.squaredNorm() / static_cast<double>(rg0.rows());
    }
    return out;
}

} // namespace grokk
