#include "grokklab/grok_analysis.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "grokklab/analytic_predictor.hpp"
#include "grokklab/errors.hpp"
#include "grokklab/special_fns.hpp"

namespace grokk {

Crossing crossing_time(const std::vector<double>& times, const std::vector<double>& values, double threshold,
                       Direction dir) {
    if (times.size() != values.size()) {
        throw InvalidParameter("crossing_time: times and values differ in length");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidParameter("crossing_time: times must be strictly increasing");
        }
    }
    const auto past = [&](double v) { return dir == Direction::up ? v >= threshold : v <= threshold; };
    Crossing c;
    std::size_t first = times.size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (past(values[i])) {
            first = i;
            break;
        }
    }
    if (first == times.size()) {
        return c;
    }
    for (std::size_t j = first + 1; j < times.size(); ++j) {
        if (!past(values[j])) {
            c.multiple = true;
            break;
        }
    }
    if (first == 0) {
        c.time = times[0];
        c.boundary = true;
        return c;
    }
    const double t0 = times[first - 1];
    const double t1 = times[first];
    const double v0 = values[first - 1];
    const double v1 = values[first];
    const bool log_v = v0 > 0.0 && v1 > 0.0 && threshold > 0.0;
    const double frac = log_v ? (std::log(threshold) - std::log(v0)) / (std::log(v1) - std::log(v0))
                              : (threshold - v0) / (v1 - v0);
    if (t0 > 0.0) {
        c.time = std::exp(std::log(t0) + frac * (std::log(t1) - std::log(t0)));
    } else {
        c.time = t0 + frac * (t1 - t0);
    }
    return c;
}

std::string to_string(GrokMethod m) {
    switch (m) {
    case GrokMethod::empirical: return "empirical";
    case GrokMethod::analytic_quadrature: return "analytic-quadrature";
    case GrokMethod::closed_form: return "closed-form";
    }
    return "?";
}

std::string to_string(NoGrokReason r) {
    switch (r) {
    case NoGrokReason::gen_never_converges: return "gen-never-converges";
    case NoGrokReason::both_instant: return "both-instant";
    case NoGrokReason::out_of_horizon: return "out-of-horizon";
    }
    return "?";
}

namespace {

bool still_rising(const std::vector<double>& a) {
    if (a.size() < 2) {
        return false;
    }
    const std::size_t from = (a.size() * 9) / 10;
    return a.back() - a[std::min(from, a.size() - 2)] > 1e-3;
}

} // namespace

GrokReport grok_from_curves(const std::vector<double>& times, const std::vector<double>& a_tr,
                            const std::vector<double>& a_gen, double threshold, GrokMethod method,
                            ThresholdMode mode) {
    GrokReport r;
    r.threshold = threshold;
    r.method = method;
    if (times.empty()) {
        r.no_grok_reason = NoGrokReason::out_of_horizon;
        return r;
    }
    const double thr_tr = mode == ThresholdMode::absolute ? threshold : threshold * a_tr.back();
    const double thr_gen = mode == ThresholdMode::absolute ? threshold : threshold * a_gen.back();
    const Crossing ctr = crossing_time(times, a_tr, thr_tr, Direction::up);
    const Crossing cgen = crossing_time(times, a_gen, thr_gen, Direction::up);
    r.t_star_tr = ctr.time;
    r.t_star_gen = cgen.time;
    r.multi_crossing = ctr.multiple || cgen.multiple;
    if (!cgen.time) {
        r.no_grok_reason = (still_rising(a_gen) || !ctr.time) ? NoGrokReason::out_of_horizon
                                                              : NoGrokReason::gen_never_converges;
        return r;
    }
    if (!ctr.time) {
        r.no_grok_reason = NoGrokReason::out_of_horizon;
        return r;
    }
    r.delta_t = *cgen.time - *ctr.time;
    if (ctr.boundary && cgen.boundary) {
        r.no_grok_reason = NoGrokReason::both_instant;
    }
    return r;
}

namespace {

void check_underparam(double lambda, double eta0) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw DomainError("grokking-time law derived for 0 < lambda < 1, got " + std::to_string(lambda));
    }
    if (!(eta0 > 0.0)) {
        throw InvalidParameter("eta0 must be positive");
    }
}

double lambert_arg_gen(double lambda, double epsilon) {
    const double s = std::sqrt(lambda);
    const double a = (1.0 - s) * (1.0 - s);
    return std::pow(2.0, 5.0 / 3.0) * std::cbrt(a) /
           (3.0 * std::cbrt(std::numbers::pi) * s * std::pow(epsilon, 2.0 / 3.0));
}

double lambert_arg_train(double lambda, double epsilon) {
    const double s = std::sqrt(lambda);
    const double a = (1.0 - s) * (1.0 - s);
    return std::pow(2.0, 5.0 / 3.0) * a / (3.0 * std::cbrt(std::numbers::pi) * s * std::pow(epsilon, 2.0 / 3.0));
}

} // namespace

double grok_time_closed(double lambda, double eta0, double epsilon, ClosedOrder order) {
    check_underparam(lambda, eta0);
    const double s = std::sqrt(lambda);
    const double a = (1.0 - s) * (1.0 - s);
    const double leading = std::log(1.0 / (1.0 - s)) / (2.0 * eta0 * a);
    if (order == ClosedOrder::leading) {
        return leading;
    }
    if (!(epsilon > 0.0)) {
        throw InvalidParameter("epsilon must be positive");
    }
    const double log_z = std::log(lambert_arg_gen(lambda, epsilon));
    const double bracket = 1.0 + std::log(std::pow(a, 2.0 / 3.0)) / log_z;
    if (!(log_z > 0.0) || !(bracket > 0.0)) {
        throw OutOfRegimeError("corrected grokking time undefined at lambda = " + std::to_string(lambda) +
                               ", epsilon = " + std::to_string(epsilon) +
                               ": the expansion needs a smaller epsilon (log argument " +
                               std::to_string(bracket) + ")");
    }
    return leading + 3.0 / (8.0 * eta0 * a) * std::log(bracket);
}

LambertTimes grok_times_lambert(double lambda, double eta0, double epsilon) {
    check_underparam(lambda, eta0);
    if (!(epsilon > 0.0)) {
        throw InvalidParameter("epsilon must be positive");
    }
    const double s = std::sqrt(lambda);
    const double a = (1.0 - s) * (1.0 - s);
    const double pre = 3.0 / (8.0 * eta0 * a);
    return {pre * special::lambert_w0(lambert_arg_train(lambda, epsilon)),
            pre * special::lambert_w0(lambert_arg_gen(lambda, epsilon))};
}

double grok_time_wd(double lambda, double eta0) {
    check_underparam(lambda, eta0);
    const double s = std::sqrt(lambda);
    return std::log(1.0 + s) / (2.0 * eta0 * (1.0 - s) * (1.0 - s));
}

double default_horizon(double eta0) { return 1e3 * grok_time_closed(0.5, eta0, 1.0, ClosedOrder::leading); }

namespace {

struct Located {
    std::optional<double> time;
    bool boundary = false;
};

// First t in [0, horizon] with acc(t) >= thr for a non-decreasing acc.
Located locate(const std::function<double(double)>& acc, double thr, double t_start, double horizon) {
    if (acc(0.0) >= thr) {
        return {0.0, true};
    }
    const double ratio = std::pow(2.0, 0.25);
    double prev = 0.0;
    double t = std::min(t_start, horizon);
    while (true) {
        if (acc(t) >= thr) {
            break;
        }
        if (t >= horizon) {
            return {};
        }
        prev = t;
        t = std::min(t * ratio, horizon);
    }
    double lo = prev;
    double hi = t;
    for (int i = 0; i < 200 && hi - lo > 1e-11 * hi; ++i) {
        const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        (acc(mid) >= thr ? hi : lo) = mid;
    }
    return {hi, false};
}

} // namespace

GrokReport analytic_grok(const AnalyticCase& c, double threshold, double horizon) {
    if (c.d_out < 1) {
        throw InvalidParameter("d_out must be >= 1");
    }
    if (!(c.epsilon > 0.0) || !(c.eta0 > 0.0) || !(c.gamma >= 0.0) || !(c.lambda > 0.0)) {
        throw InvalidParameter("analytic_grok: invalid parameters");
    }
    const double eta_eff = c.eta0 / c.d_out;
    if (horizon <= 0.0) {
        horizon = default_horizon(eta_eff);
    }
    const auto loss = [&](double t, Which w) {
        if (c.gamma > 0.0) {
            return wd_losses(c.lambda, eta_eff, c.gamma, t, w) / c.d_out;
        }
        return loss_quadrature(c.lambda, eta_eff, t, w) / c.d_out;
    };
    const auto acc_tr = [&](double t) { return accuracy_map(loss(t, Which::train), c.epsilon, c.d_out); };
    const auto acc_gen = [&](double t) { return accuracy_map(loss(t, Which::gen), c.epsilon, c.d_out); };
    const double t_start = 1e-3 / eta_eff;

    GrokReport r;
    r.threshold = threshold;
    r.method = GrokMethod::analytic_quadrature;
    const Located tr = locate(acc_tr, threshold, t_start, horizon);
    const Located gen = locate(acc_gen, threshold, t_start, horizon);
    r.t_star_tr = tr.time;
    r.t_star_gen = gen.time;
    if (!gen.time) {
        const double a_h = acc_gen(horizon);
        const bool moving = acc_gen(10.0 * horizon) - a_h > 1e-9;
        r.no_grok_reason = (moving || !tr.time) ? NoGrokReason::out_of_horizon : NoGrokReason::gen_never_converges;
        return r;
    }
    if (!tr.time) {
        r.no_grok_reason = NoGrokReason::out_of_horizon;
        return r;
    }
    r.delta_t = *gen.time - *tr.time;
    if (tr.boundary && gen.boundary) {
        r.no_grok_reason = NoGrokReason::both_instant;
    }
    return r;
}

namespace {

void apply_axis(ExperimentConfig& cfg, AnalyticCase& ac, const std::string& name, double v) {
    if (name == "lambda") {
        if (!(v > 0.0)) {
            throw InvalidParameter("lambda axis values must be positive");
        }
        ac.lambda = v;
        cfg.n_tr = static_cast<int>(std::lround(cfg.d_in / v));
    } else if (name == "d_out") {
        const int d = static_cast<int>(std::lround(v));
        if (d < 1 || std::abs(v - d) > 1e-9) {
            throw InvalidParameter("d_out axis values must be positive integers");
        }
        ac.d_out = d;
        cfg.d_out = d;
    } else if (name == "gamma") {
        if (!(v >= 0.0)) {
            throw InvalidParameter("gamma axis values must be >= 0");
        }
        ac.gamma = v;
        cfg.gamma = v;
    } else {
        throw InvalidParameter("unknown sweep axis '" + name + "' (lambda, d_out, gamma)");
    }
}

std::vector<double> log_grid_with_zero(double lo, double hi, int n) {
    std::vector<double> g{0.0};
    for (int i = 0; i < n; ++i) {
        g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    }
    return g;
}

} // namespace

PhaseGrid phase_sweep(const ExperimentConfig& base, const Axis& a1, const Axis& a2, SweepMethod method,
                      int seeds, double threshold) {
    for (const Axis* a : {&a1, &a2}) {
        if (a->name != "lambda" && a->name != "d_out" && a->name != "gamma") {
            throw InvalidParameter("unknown sweep axis '" + a->name + "' (lambda, d_out, gamma)");
        }
    }
    if (a1.name == a2.name) {
        throw InvalidParameter("sweep axes must differ");
    }
    if (seeds < 1) {
        throw InvalidParameter("seeds must be >= 1");
    }
    PhaseGrid grid{a1, a2, {}};
    for (const double v1 : a1.grid) {
        for (const double v2 : a2.grid) {
            ExperimentConfig cfg = base;
            AnalyticCase ac{base.lambda(), base.eta0, base.gamma, base.epsilon, base.d_out};
            apply_axis(cfg, ac, a1.name, v1);
            apply_axis(cfg, ac, a2.name, v2);
            const double horizon = default_horizon(ac.eta0 / ac.d_out);
            PhaseCell cell{v1, v2, {}, 0.0};
            if (method == SweepMethod::analytic) {
                cell.report = analytic_grok(ac, threshold, horizon);
            } else {
                if (cfg.time_grid.empty()) {
                    cfg.time_grid = log_grid_with_zero(1e-2 / cfg.eta0, horizon, 200);
                }
                std::vector<double> deltas;
                GrokReport first;
                for (int s = 0; s < seeds; ++s) {
                    cfg.seed = base.seed + static_cast<std::uint64_t>(s);
                    const Trace tr = run_spectral(cfg, training_gram(cfg));
                    GrokReport rep = grok_from_curves(tr.times, tr.a_tr, tr.a_gen, threshold);
                    if (s == 0) {
                        first = rep;
                    }
                    if (!rep.grokked()) {
                        first = rep;
                        deltas.clear();
                        break;
                    }
                    deltas.push_back(*rep.delta_t);
                }
                cell.report = first;
                if (!deltas.empty()) {
                    double mean = 0.0;
                    for (double d : deltas) mean += d;
                    mean /= deltas.size();
                    double var = 0.0;
                    for (double d : deltas) var += (d - mean) * (d - mean);
                    cell.report.delta_t = mean;
                    cell.spread = deltas.size() > 1 ? std::sqrt(var / (deltas.size() - 1)) : 0.0;
                }
            }
            grid.cells.push_back(cell);
        }
    }
    return grid;
}

} // namespace grokk
