#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace grokk {

enum class Arch { one_layer, two_layer_linear, two_layer_tanh };
enum class Engine { iterative, spectral };
enum class SpectralMode { gradient_flow, discrete_gd };

std::string to_string(Arch a);
std::string to_string(Engine e);
Arch parse_arch(const std::string& s);

struct ExperimentConfig {
    int d_in = 1000;
    int d_out = 1;
    int n_tr = 1000;
    int n_gen = 0;  // 0 selects max(10^4, 10 d_in)
    double eta0 = 0.01;
    double gamma = 0.0;
    double epsilon = 1e-3;
    double alpha = 1.0;
    double sigma_delta = 0.0;
    Arch arch = Arch::one_layer;
    int d_h = 200;
    std::uint64_t seed = 1;
    double dt = 1.0;  // GD step in gradient-flow time; eta = eta0 * dt
    std::vector<double> time_grid;

    double lambda() const { return static_cast<double>(d_in) / n_tr; }
    int effective_n_gen() const;
    /// Throws InvalidParameter / SizeLimitError.
    void validate() const;
};

// Seed streams shared by both engines so they see the same T, S0 and data.
namespace stream {
constexpr std::uint64_t teacher = 1;
constexpr std::uint64_t student = 2;
constexpr std::uint64_t train_x = 3;
constexpr std::uint64_t gen_x = 4;
constexpr std::uint64_t label_noise = 5;
constexpr std::uint64_t teacher_out = 6;
constexpr std::uint64_t student_out = 7;
} // namespace stream

struct NetworkWeights {
    std::vector<Eigen::MatrixXd> layers;  // one (d_in x d_out) or two (d_in x d_h, d_h x d_out)
    std::string init_law;
};

/// Teacher weights for the config's architecture.
NetworkWeights teacher_weights(const ExperimentConfig& c);
/// Student weights, output layer (or the single layer) scaled by alpha.
NetworkWeights student_weights(const ExperimentConfig& c);

Eigen::MatrixXd training_inputs(const ExperimentConfig& c);
Eigen::MatrixXd generalization_inputs(const ExperimentConfig& c);
/// Sigma_tr of the training inputs the iterative engine uses.
Eigen::MatrixXd training_gram(const ExperimentConfig& c);

struct Trace {
    std::vector<double> times;
    std::vector<double> l_tr;
    std::vector<double> l_gen;             // fresh-sample estimate (spectral: exact)
    std::vector<double> l_gen_population;  // |D|^2 / d_out where defined
    std::vector<double> a_tr;
    std::vector<double> a_gen;
    ExperimentConfig config;
    Engine engine = Engine::iterative;
    std::string note;  // e.g. the time/step convention in use

    std::size_t size() const { return times.size(); }
};

struct TwoLayerTrace {
    Trace trace;
    std::vector<double> h;  // |S0|^2/2 + |S1|^2/2 at each grid time
    double d0_norm_sq = 0.0;
};

/// Fraction of rows whose squared norm / d_out is <= epsilon.
double accuracy_empirical(const Eigen::MatrixXd& errors, double epsilon, int d_out);

/// Full-batch GD. Two-layer architectures are dispatched to run_two_layer.
/// Throws InstabilityError when the step size violates 2 eta nu_max / d_out < 1
/// or when the training loss blows up.
Trace run_iterative(const ExperimentConfig& c);

/// Exact evaluation through the eigendecomposition of `gram`.
/// gradient_flow evaluates the continuous-time solution at the grid times;
/// discrete_gd applies the GD factor (1 - 2 eta (nu + gamma/2)/d_out)^k with
/// k = round(t / dt). Accuracies use the chi-square accuracy map of the
/// exact losses.
Trace run_spectral(const ExperimentConfig& c, const Eigen::MatrixXd& gram,
                   SpectralMode mode = SpectralMode::gradient_flow);

TwoLayerTrace run_two_layer(const ExperimentConfig& c);

/// Largest eigenvalue of a PSD matrix by power iteration.
double largest_eigenvalue(const Eigen::MatrixXd& m);

/// Grid times rounded to the step lattice k * dt. Throws if two collapse.
std::vector<long long> grid_steps(const ExperimentConfig& c);

} // namespace grokk
