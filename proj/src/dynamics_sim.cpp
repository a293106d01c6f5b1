#include "grokklab/dynamics_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grokklab/analytic_predictor.hpp"
#include "grokklab/errors.hpp"
#include "grokklab/rmt_core.hpp"

namespace grokk {

std::string to_string(Arch a) {
    switch (a) {
    case Arch::one_layer: return "one_layer";
    case Arch::two_layer_linear: return "two_layer_linear";
    case Arch::two_layer_tanh: return "two_layer_tanh";
    }
    return "?";
}

std::string to_string(Engine e) { return e == Engine::iterative ? "iterative" : "spectral"; }

Arch parse_arch(const std::string& s) {
    if (s == "one_layer" || s == "1") return Arch::one_layer;
    if (s == "two_layer_linear" || s == "linear") return Arch::two_layer_linear;
    if (s == "two_layer_tanh" || s == "tanh") return Arch::two_layer_tanh;
    throw InvalidParameter("unknown arch '" + s + "' (one_layer, two_layer_linear, two_layer_tanh)");
}

int ExperimentConfig::effective_n_gen() const { return n_gen > 0 ? n_gen : std::max(10000, 10 * d_in); }

void ExperimentConfig::validate() const {
    auto bad = [](const std::string& m) { throw InvalidParameter(m); };
    if (d_in < 1) bad("d_in must be >= 1");
    if (d_out < 1) bad("d_out must be >= 1");
    if (n_tr < 1) bad("n_tr must be >= 1");
    if (n_gen < 0) bad("n_gen must be >= 0");
    if (!(eta0 > 0.0) || !std::isfinite(eta0)) bad("eta0 must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) bad("gamma must be >= 0");
    if (!(epsilon > 0.0)) bad("epsilon must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) bad("alpha must be positive");
    if (!(sigma_delta >= 0.0)) bad("sigma_delta must be >= 0");
    if (arch != Arch::one_layer && d_h < 1) bad("d_h must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt must be positive");
    for (std::size_t i = 0; i < time_grid.size(); ++i) {
        if (!(time_grid[i] >= 0.0) || !std::isfinite(time_grid[i])) bad("time grid values must be finite and >= 0");
        if (i > 0 && !(time_grid[i] > time_grid[i - 1])) bad("time grid must be strictly increasing");
    }
    if (static_cast<std::size_t>(d_in) > max_dim()) {
        throw SizeLimitError("d_in = " + std::to_string(d_in) + " exceeds the size cap " +
                             std::to_string(max_dim()) + " (set GROKKLAB_MAX_DIM to raise it)");
    }
}

NetworkWeights teacher_weights(const ExperimentConfig& c) {
    const auto s = derive_seed(c.seed, stream::teacher);
    if (c.arch == Arch::one_layer) {
        const double sd = 1.0 / std::sqrt(2.0 * c.d_in * c.d_out);
        return {{gaussian_matrix(c.d_in, c.d_out, sd, s)}, "N(0, 1/(2 d_in d_out))"};
    }
    const double sd0 = 1.0 / std::sqrt(2.0 * c.d_in * c.d_h);
    const double sd1 = 1.0 / std::sqrt(2.0 * c.d_out * c.d_h);
    return {{gaussian_matrix(c.d_in, c.d_h, sd0, s),
             gaussian_matrix(c.d_h, c.d_out, sd1, derive_seed(c.seed, stream::teacher_out))},
            "N(0, 1/(2 d_in d_h)), N(0, 1/(2 d_h d_out))"};
}

NetworkWeights student_weights(const ExperimentConfig& c) {
    const auto s = derive_seed(c.seed, stream::student);
    if (c.arch == Arch::one_layer) {
        const double sd = c.alpha / std::sqrt(2.0 * c.d_in * c.d_out);
        return {{gaussian_matrix(c.d_in, c.d_out, sd, s)}, "alpha * N(0, 1/(2 d_in d_out))"};
    }
    const double sd0 = 1.0 / std::sqrt(2.0 * c.d_in * c.d_h);
    const double sd1 = c.alpha / std::sqrt(2.0 * c.d_out * c.d_h);
    return {{gaussian_matrix(c.d_in, c.d_h, sd0, s),
             gaussian_matrix(c.d_h, c.d_out, sd1, derive_seed(c.seed, stream::student_out))},
            "N(0, 1/(2 d_in d_h)), alpha * N(0, 1/(2 d_h d_out))"};
}

Eigen::MatrixXd training_inputs(const ExperimentConfig& c) {
    return gaussian_dataset(c.n_tr, c.d_in, derive_seed(c.seed, stream::train_x)).samples;
}

Eigen::MatrixXd generalization_inputs(const ExperimentConfig& c) {
    return gaussian_dataset(c.effective_n_gen(), c.d_in, derive_seed(c.seed, stream::gen_x)).samples;
}

Eigen::MatrixXd training_gram(const ExperimentConfig& c) { return gram_of(training_inputs(c)); }

double accuracy_empirical(const Eigen::MatrixXd& errors, double epsilon, int d_out) {
    if (!(epsilon > 0.0)) {
        throw InvalidParameter("accuracy_empirical: epsilon must be positive");
    }
    if (errors.rows() == 0) {
        return 1.0;
    }
    const double bound = epsilon * d_out;
    Eigen::Index ok = 0;
    for (Eigen::Index i = 0; i < errors.rows(); ++i) {
        if (errors.row(i).squaredNorm() <= bound) {
            ++ok;
        }
    }
    return static_cast<double>(ok) / static_cast<double>(errors.rows());
}

double largest_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) {
        return 0.0;
    }
    Eigen::VectorXd v = Eigen::VectorXd::Constant(m.rows(), 1.0 / std::sqrt(static_cast<double>(m.rows())));
    // Deterministic, non-symmetric start to avoid orthogonality to the top vector.
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] += 1e-3 * std::sin(1.0 + i);
    }
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = m * v;
        const double next = v.dot(w);
        const double n = w.norm();
        if (n == 0.0) {
            return 0.0;
        }
        v = w / n;
        if (it > 10 && std::abs(next - est) <= 1e-6 * std::abs(next)) {
            est = next;
            break;
        }
        est = next;
    }
    return est;
}

std::vector<long long> grid_steps(const ExperimentConfig& c) {
    std::vector<long long> steps;
    steps.reserve(c.time_grid.size());
    for (const double t : c.time_grid) {
        const long long k = std::llround(t / c.dt);
        if (!steps.empty() && k <= steps.back()) {
            throw InvalidParameter("time grid points " + std::to_string(t) +
                                   " collapse onto the same GD step at dt = " + std::to_string(c.dt));
        }
        steps.push_back(k);
    }
    return steps;
}

namespace {

void check_step_size(const ExperimentConfig& c, double nu_max) {
    const double bound = 2.0 * c.eta0 * c.dt * nu_max / c.d_out;
    if (!(bound < 1.0)) {
        throw InstabilityError("step-size bound 2 eta0 dt nu_max / d_out < 1 violated: got " +
                               std::to_string(bound) + " (eta0 = " + std::to_string(c.eta0) +
                               ", dt = " + std::to_string(c.dt) + ", nu_max = " + std::to_string(nu_max) + ")");
    }
}

std::string step_note(const ExperimentConfig& c) {
    return "GD step eta = eta0 * dt with dt = " + std::to_string(c.dt) +
           "; reported times are gradient-flow times k * dt";
}

} // namespace

Trace run_iterative(const ExperimentConfig& c) {
    c.validate();
    if (c.arch != Arch::one_layer) {
        return run_two_layer(c).trace;
    }
    const auto steps = grid_steps(c);
    const Eigen::MatrixXd x = training_inputs(c);
    const Eigen::MatrixXd xg = generalization_inputs(c);
    const Eigen::MatrixXd t_w = teacher_weights(c).layers[0];
    Eigen::MatrixXd s = student_weights(c).layers[0];

    Eigen::MatrixXd y = x * t_w;
    if (c.sigma_delta > 0.0) {
        y += gaussian_matrix(y.rows(), y.cols(), c.sigma_delta, derive_seed(c.seed, stream::label_noise));
    }
    const double inv_n = 1.0 / c.n_tr;
    const Eigen::MatrixXd sigma = gram_of(x);
    const Eigen::MatrixXd cross = (x.transpose() * y) * inv_n;
    check_step_size(c, largest_eigenvalue(sigma));

    Trace tr;
    tr.config = c;
    tr.engine = Engine::iterative;
    tr.note = step_note(c);
    const double eta = c.eta0 * c.dt;
    const double inv_dout = 1.0 / c.d_out;
    double initial = -1.0;

    long long k = 0;
    for (std::size_t g = 0; g < steps.size(); ++g) {
        for (; k < steps[g]; ++k) {
            // S <- S - (eta/d_out) (2 (Sigma S - C) + gamma S)
            Eigen::MatrixXd grad = 2.0 * (sigma * s - cross);
            if (c.gamma > 0.0) {
                grad += c.gamma * s;
            }
            s -= (eta * inv_dout) * grad;
        }
        const Eigen::MatrixXd r = x * s - y;
        const Eigen::MatrixXd d = s - t_w;
        const Eigen::MatrixXd rg = xg * d;
        const double ltr = r.squaredNorm() * inv_n * inv_dout;
        if (initial < 0.0) {
            initial = std::max(ltr, 1e-300);
        }
        if (!std::isfinite(ltr) || ltr > 1e6 * initial) {
            throw InstabilityError("training loss diverged at t = " + std::to_string(k * c.dt) +
                                   "; step-size bound 2 eta0 dt nu_max / d_out < 1 effectively violated");
        }
        tr.times.push_back(static_cast<double>(k) * c.dt);
        tr.l_tr.push_back(ltr);
        tr.l_gen.push_back(rg.squaredNorm() / static_cast<double>(rg.rows()) * inv_dout);
        tr.l_gen_population.push_back(d.squaredNorm() * inv_dout);
        tr.a_tr.push_back(accuracy_empirical(r, c.epsilon, c.d_out));
        tr.a_gen.push_back(accuracy_empirical(rg, c.epsilon, c.d_out));
    }
    return tr;
}

Trace run_spectral(const ExperimentConfig& c, const Eigen::MatrixXd& gram, SpectralMode mode) {
    c.validate();
    if (c.arch != Arch::one_layer) {
        throw UnsupportedError("spectral engine supports arch one_layer only, got " + to_string(c.arch));
    }
    if (c.sigma_delta > 0.0) {
        throw UnsupportedError("spectral engine does not model label noise; use the iterative engine");
    }
    if (gram.rows() != c.d_in || gram.cols() != c.d_in) {
        throw InvalidParameter("run_spectral: gram must be d_in x d_in");
    }
    const Eigensystem es = eigensystem(gram);
    const Eigen::MatrixXd t_w = teacher_weights(c).layers[0];
    const Eigen::MatrixXd s0 = student_weights(c).layers[0];
    const Eigen::MatrixXd tb = es.vectors.transpose() * t_w;
    const Eigen::MatrixXd d0b = es.vectors.transpose() * (s0 - t_w);

    const Eigen::Index n = es.values.size();
    const double g2 = 0.5 * c.gamma;
    const double inv_dout = 1.0 / c.d_out;
    // Fixed point D_inf = -(gamma/2) T / (nu + gamma/2); zero without decay.
    Eigen::MatrixXd dinf = Eigen::MatrixXd::Zero(n, c.d_out);
    if (c.gamma > 0.0) {
        for (Eigen::Index i = 0; i < n; ++i) {
            dinf.row(i) = -g2 * tb.row(i) / (es.values[i] + g2);
        }
    }
    const Eigen::MatrixXd delta0 = d0b - dinf;
    const Eigen::VectorXd row_delta = delta0.rowwise().squaredNorm();
    const Eigen::VectorXd row_cross = (delta0.cwiseProduct(dinf)).rowwise().sum();
    const Eigen::VectorXd row_inf = dinf.rowwise().squaredNorm();

    std::vector<long long> steps;
    if (mode == SpectralMode::discrete_gd) {
        steps = grid_steps(c);
        const double nu_max = n > 0 ? es.values[n - 1] : 0.0;
        check_step_size(c, nu_max);
    }

    Trace tr;
    tr.config = c;
    tr.engine = Engine::spectral;
    tr.note = mode == SpectralMode::gradient_flow ? "exact gradient flow through the eigenbasis of Sigma_tr"
                                                  : step_note(c) + " (evaluated as powers of the GD factor)";
    const double eta = c.eta0 * c.dt;
    for (std::size_t g = 0; g < c.time_grid.size(); ++g) {
        const double t = mode == SpectralMode::gradient_flow ? c.time_grid[g] : steps[g] * c.dt;
        double ltr = 0.0;
        double lgen = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double k = es.values[i] + g2;
            double f;
            if (mode == SpectralMode::gradient_flow) {
                f = std::exp(-2.0 * c.eta0 * inv_dout * k * t);
            } else {
                f = std::pow(1.0 - 2.0 * eta * inv_dout * k, static_cast<double>(steps[g]));
            }
            // |f delta0 + dinf|^2 per eigen-row
            const double sq = f * f * row_delta[i] + 2.0 * f * row_cross[i] + row_inf[i];
            lgen += sq;
            ltr += es.values[i] * sq;
        }
        ltr = std::max(0.0, ltr) * inv_dout;
        lgen = std::max(0.0, lgen) * inv_dout;
        tr.times.push_back(t);
        tr.l_tr.push_back(ltr);
        tr.l_gen.push_back(lgen);
        tr.l_gen_population.push_back(lgen);
        tr.a_tr.push_back(accuracy_map(ltr, c.epsilon, c.d_out));
        tr.a_gen.push_back(accuracy_map(lgen, c.epsilon, c.d_out));
    }
    return tr;
}

} // namespace grokk
