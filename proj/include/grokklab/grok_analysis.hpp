#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grokklab/dynamics_sim.hpp"

namespace grokk {

/// erf(sqrt(2)): the accuracy reached exactly when the loss equals epsilon / 4.
inline constexpr double kGrokAccuracy = 0.9544997361036416;

enum class Direction { up, down };

struct Crossing {
    std::optional<double> time;
    bool boundary = false;  // already past the threshold at the first grid time
    bool multiple = false;  // the curve re-crossed after the first crossing
};

/// First crossing of `threshold`, interpolated linearly in (log t, log value)
/// inside the bracketing grid interval (linear in t when the interval starts
/// at t = 0, linear in value when a value is not positive).
Crossing crossing_time(const std::vector<double>& times, const std::vector<double>& values, double threshold,
                       Direction dir);

enum class GrokMethod { empirical, analytic_quadrature, closed_form };
enum class NoGrokReason { gen_never_converges, both_instant, out_of_horizon };
enum class ThresholdMode { absolute, fraction_of_final };

std::string to_string(GrokMethod m);
std::string to_string(NoGrokReason r);

struct GrokReport {
    std::optional<double> t_star_tr;
    std::optional<double> t_star_gen;
    std::optional<double> delta_t;
    double threshold = kGrokAccuracy;
    GrokMethod method = GrokMethod::empirical;
    std::optional<NoGrokReason> no_grok_reason;
    bool multi_crossing = false;

    bool grokked() const { return delta_t.has_value() && !no_grok_reason; }
};

/// Report from sampled accuracy curves. In fraction_of_final mode each curve's
/// threshold is `threshold` times its last value.
GrokReport grok_from_curves(const std::vector<double>& times, const std::vector<double>& a_tr,
                            const std::vector<double>& a_gen, double threshold = kGrokAccuracy,
                            GrokMethod method = GrokMethod::empirical,
                            ThresholdMode mode = ThresholdMode::absolute);

enum class ClosedOrder { leading, corrected };

/// Late-time grokking-time laws for 0 < lambda < 1.
/// corrected throws OutOfRegimeError when its logarithmic correction is undefined.
double grok_time_closed(double lambda, double eta0, double epsilon, ClosedOrder order);

struct LambertTimes {
    double t_tr = 0.0;
    double t_gen = 0.0;
};

/// t*_tr and t*_gen from the Lambert-W solutions of L(t*) = epsilon / 4.
LambertTimes grok_times_lambert(double lambda, double eta0, double epsilon);

/// log(1 + sqrt(lambda)) / (2 eta0 (1 - sqrt(lambda))^2).
double grok_time_wd(double lambda, double eta0);

struct AnalyticCase {
    double lambda = 0.5;
    double eta0 = 0.01;
    double gamma = 0.0;
    double epsilon = 1e-3;
    int d_out = 1;
};

/// Accuracy crossings of the analytic curves located by bracketing on a
/// geometric time grid and bisection in log t. Cells not converged by
/// `horizon` get out-of-horizon, or gen-never-converges if the accuracy has
/// stopped moving.
GrokReport analytic_grok(const AnalyticCase& c, double threshold = kGrokAccuracy, double horizon = 0.0);

/// 10^3 times the leading grokking time at lambda = 0.5.
double default_horizon(double eta0);

enum class SweepMethod { analytic, empirical };

struct Axis {
    std::string name;  // lambda, d_out or gamma
    std::vector<double> grid;
};

struct PhaseCell {
    double v1 = 0.0;
    double v2 = 0.0;
    GrokReport report;
    double spread = 0.0;  // std of delta_t across seeds (empirical)
};

struct PhaseGrid {
    Axis axis1;
    Axis axis2;
    std::vector<PhaseCell> cells;  // axis1 major
};

/// Analytic cells use (1/d_out) * wd_losses at eta0 / d_out; empirical cells
/// run the spectral engine for `seeds` consecutive seeds and average delta_t.
PhaseGrid phase_sweep(const ExperimentConfig& base, const Axis& a1, const Axis& a2,
                      SweepMethod method = SweepMethod::analytic, int seeds = 3,
                      double threshold = kGrokAccuracy);

} // namespace grokk
