#pragma once

#include <string>
#include <vector>

namespace grokk {

enum class Which { train, gen };

/// E_MP[q(nu) exp(-4 eta0 nu t)] with q = nu (train) or 1 (gen), atom included.
double loss_quadrature(double lambda, double eta0, double t, Which which);
/// log of the same, evaluated with exp(-4 eta0 lambda_- t) factored out so it
/// stays finite far past double underflow.
double log_loss_quadrature(double lambda, double eta0, double t, Which which);

struct ClosedTrain {
    double value = 0.0;
    double log_value = 0.0;
    bool fallback = false;  // true when the quadrature had to stand in
};

/// exp(-4 eta0 (lambda+1) t) 0F1~(2; 16 eta0^2 t^2 lambda).
ClosedTrain train_loss_closed(double lambda, double eta0, double t);

struct LateTime {
    double l_tr = 0.0;
    double l_gen = 0.0;        // full expression with the Gamma(1/2, .) term
    double l_gen_ratio = 0.0;  // l_tr / (1 - sqrt(lambda))^2
};

/// Late-time expansions, valid for eta0 t >> sqrt(lambda), lambda < 1.
/// Throws OutOfRegimeError unless eta0 t > 10 sqrt(lambda).
LateTime late_time_losses(double lambda, double eta0, double t);

/// Fraction of points with per-output mean squared error below epsilon when
/// errors are Gaussian with per-output variance `loss`.
double accuracy_map(double loss, double epsilon, int d_out);

struct LossPair {
    double l_tr = 0.0;
    double l_gen = 0.0;
};

/// (1/d_out) * loss_quadrature at eta0 / d_out.
LossPair dout_losses(double lambda, double eta0, double t, int d_out);

/// Losses with weight decay gamma (single output, |S0|^2 = |T|^2 = 1/2).
double wd_losses(double lambda, double eta0, double gamma, double t, Which which);

struct Metrics {
    double l_tr = 0.0;
    double l_gen = 0.0;
    double a_tr = 0.0;
    double a_gen = 0.0;
};

/// Two-layer linear prediction with h frozen at 1/2:
/// (d0_norm_sq / d_out) * loss_quadrature at eta0 / (2 d_out^2).
Metrics two_layer_metrics(double lambda, double eta0, double t, int d_out, double epsilon,
                          double d0_norm_sq = 1.0);

/// E|S0 S1 - T|^2 under the two-layer initialization: 1 / (2 d_h).
double expected_two_layer_d0_norm_sq(int d_h);

struct PredictionCurve {
    std::vector<double> times;
    std::vector<double> l_tr;
    std::vector<double> l_gen;
    std::vector<double> a_tr;
    std::vector<double> a_gen;
    std::vector<std::string> regime_tags;
};

struct PredictionSpec {
    double lambda = 0.5;
    double eta0 = 0.01;
    double gamma = 0.0;
    double epsilon = 1e-3;
    int d_out = 1;
    bool two_layer = false;
    double d0_norm_sq = 1.0;  // two-layer only
};

/// One-layer curves use dout_losses (gamma = 0) or (1/d_out) wd_losses at
/// eta0 / d_out (gamma > 0). Tags: "late-time-valid" once eta0 t > 10 sqrt(lambda)
/// for lambda < 1, "early" otherwise.
PredictionCurve predict_curve(const PredictionSpec& spec, const std::vector<double>& times);

} // namespace grokk
