#include "grokklab/analytic_predictor.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "grokklab/errors.hpp"
#include "grokklab/rmt_core.hpp"
#include "grokklab/special_fns.hpp"

namespace grokk {
namespace {

void check_common(double lambda, double eta0, double t) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameter("lambda must be positive, got " + std::to_string(lambda));
    }
    if (!(eta0 > 0.0) || !std::isfinite(eta0)) {
        throw InvalidParameter("eta0 must be positive, got " + std::to_string(eta0));
    }
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidParameter("t must be finite and >= 0, got " + std::to_string(t));
    }
}

quad::Options relative_opts() {
    quad::Options o;
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-13;
    return o;
}

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

} // namespace

double log_loss_quadrature(double lambda, double eta0, double t, Which which) {
    check_common(lambda, eta0, t);
    const MPParams p(lambda);
    const double c = 4.0 * eta0 * t;
    const double lo = p.lambda_minus();
    const bool train = which == Which::train;
    const std::function<double(double, double)> f = [c, train](double nu, double x) {
        const double e = std::exp(-c * x);
        return train ? nu * e : e;
    };
    const double cont = mp_continuous_integral(p, f, relative_opts()).value;
    double log_value = std::log(cont) - c * lo;
    const double atom = mp_zero_mass(p);
    if (!train && atom > 0.0) {
        log_value = log_sum_exp(log_value, std::log(atom));
    }
    return log_value;
}

double loss_quadrature(double lambda, double eta0, double t, Which which) {
    return std::exp(log_loss_quadrature(lambda, eta0, t, which));
}

ClosedTrain train_loss_closed(double lambda, double eta0, double t) {
    check_common(lambda, eta0, t);
    const double z = 16.0 * eta0 * eta0 * t * t * lambda;
    try {
        const double lv = -4.0 * eta0 * (lambda + 1.0) * t + special::log_reg_hyp0f1(2.0, z);
        if (std::isfinite(lv)) {
            return {std::exp(lv), lv, false};
        }
    } catch (const RangeError&) {
    }
    const double lv = log_loss_quadrature(lambda, eta0, t, Which::train);
    return {std::exp(lv), lv, true};
}

LateTime late_time_losses(double lambda, double eta0, double t) {
    check_common(lambda, eta0, t);
    if (lambda >= 1.0) {
        throw OutOfRegimeError("late-time expansion needs lambda < 1, got " + std::to_string(lambda));
    }
    const double s = std::sqrt(lambda);
    const double et = eta0 * t;
    if (!(et > 10.0 * s)) {
        throw OutOfRegimeError("late-time expansion needs eta0 t > 10 sqrt(lambda); eta0 t = " +
                               std::to_string(et));
    }
    const double a = (1.0 - s) * (1.0 - s);
    const double decay = std::exp(-4.0 * et * a);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    const double l34 = std::pow(lambda, 0.75);
    LateTime r;
    r.l_tr = decay / (16.0 * sqrt_pi * l34 * std::pow(et, 1.5));
    r.l_gen = std::sqrt(et) * decay / (2.0 * sqrt_pi * et * l34) -
              (1.0 - s) * special::upper_gamma(0.5, 4.0 * et * a) / (sqrt_pi * l34);
    r.l_gen_ratio = r.l_tr / a;
    return r;
}

double accuracy_map(double loss, double epsilon, int d_out) {
    if (!(epsilon > 0.0)) {
        throw InvalidParameter("accuracy_map: epsilon must be positive");
    }
    if (d_out < 1) {
        throw InvalidParameter("accuracy_map: d_out must be >= 1");
    }
    if (!(loss >= 0.0)) {
        throw InvalidParameter("accuracy_map: loss must be >= 0");
    }
    if (loss == 0.0) {
        return 1.0;
    }
    if (std::isinf(loss)) {
        return 0.0;
    }
    if (d_out == 1) {
        return special::erf(std::sqrt(epsilon / (2.0 * loss)));
    }
    return special::reg_lower_gamma(0.5 * d_out, d_out * epsilon / (2.0 * loss));
}

LossPair dout_losses(double lambda, double eta0, double t, int d_out) {
    if (d_out < 1) {
        throw InvalidParameter("dout_losses: d_out must be >= 1");
    }
    const double e = eta0 / d_out;
    return {loss_quadrature(lambda, e, t, Which::train) / d_out,
            loss_quadrature(lambda, e, t, Which::gen) / d_out};
}

double wd_losses(double lambda, double eta0, double gamma, double t, Which which) {
    check_common(lambda, eta0, t);
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw InvalidParameter("wd_losses: gamma must be >= 0");
    }
    const double g2 = 0.5 * gamma;
    const bool train = which == Which::train;
    const auto f = [=](double nu) {
        const double k = nu + g2;
        const double e = std::exp(-2.0 * eta0 * k * t);
        const double teacher = k > 0.0 ? (e * nu + g2) / k : 1.0;
        const double v = 0.5 * (e * e + teacher * teacher);
        return train ? nu * v : v;
    };
    const MPParams p(lambda);
    const double cont = mp_continuous_integral(p, f, relative_opts()).value;
    const double atom = mp_zero_mass(p);
    return (atom > 0.0 && !train) ? cont + atom * f(0.0) : cont;
}

Metrics two_layer_metrics(double lambda, double eta0, double t, int d_out, double epsilon,
                          double d0_norm_sq) {
    if (d_out < 1) {
        throw InvalidParameter("two_layer_metrics: d_out must be >= 1");
    }
    if (!(d0_norm_sq >= 0.0)) {
        throw InvalidParameter("two_layer_metrics: d0_norm_sq must be >= 0");
    }
    const double e = eta0 / (2.0 * d_out * d_out);
    const double scale = d0_norm_sq / d_out;
    Metrics m;
    m.l_tr = scale * loss_quadrature(lambda, e, t, Which::train);
    m.l_gen = scale * loss_quadrature(lambda, e, t, Which::gen);
    m.a_tr = accuracy_map(m.l_tr, epsilon, d_out);
    m.a_gen = accuracy_map(m.l_gen, epsilon, d_out);
    return m;
}

double expected_two_layer_d0_norm_sq(int d_h) {
    if (d_h < 1) {
        throw InvalidParameter("d_h must be >= 1");
    }
    return 1.0 / (2.0 * d_h);
}

PredictionCurve predict_curve(const PredictionSpec& spec, const std::vector<double>& times) {
    if (spec.d_out < 1) {
        throw InvalidParameter("predict_curve: d_out must be >= 1");
    }
    PredictionCurve c;
    const double eta_eff = spec.two_layer ? spec.eta0 / (2.0 * spec.d_out * spec.d_out)
                                          : spec.eta0 / spec.d_out;
    for (const double t : times) {
        double ltr;
        double lgen;
        if (spec.two_layer) {
            const Metrics m = two_layer_metrics(spec.lambda, spec.eta0, t, spec.d_out, spec.epsilon,
                                                spec.d0_norm_sq);
            ltr = m.l_tr;
            lgen = m.l_gen;
        } else if (spec.gamma > 0.0) {
            ltr = wd_losses(spec.lambda, eta_eff, spec.gamma, t, Which::train) / spec.d_out;
            lgen = wd_losses(spec.lambda, eta_eff, spec.gamma, t, Which::gen) / spec.d_out;
        } else {
            const LossPair lp = dout_losses(spec.lambda, spec.eta0, t, spec.d_out);
            ltr = lp.l_tr;
            lgen = lp.l_gen;
        }
        c.times.push_back(t);
        c.l_tr.push_back(ltr);
        c.l_gen.push_back(lgen);
        c.a_tr.push_back(accuracy_map(ltr, spec.epsilon, spec.d_out));
        c.a_gen.push_back(accuracy_map(lgen, spec.epsilon, spec.d_out));
        const bool late = spec.lambda < 1.0 && eta_eff * t > 10.0 * std::sqrt(spec.lambda);
        c.regime_tags.emplace_back(late ? "late-time-valid" : "early");
    }
    return c;
}

} // namespace grokk
