#include "grokklab/presets.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "grokklab/analytic_predictor.hpp"
#include "grokklab/errors.hpp"
#include "grokklab/exp_runner.hpp"
#include "grokklab/grok_analysis.hpp"

namespace grokk::presets {

using runner::format_number;
using runner::json_quote;

namespace {

std::string tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Writer {
    std::string dir;
    std::vector<std::string> written;

    std::string path(const std::string& name) const { return (std::filesystem::path(dir) / name).string(); }
};

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig base_config(const FigureOptions& o, double lambda) {
    ExperimentConfig c;
    c.d_in = o.scale;
    c.n_tr = static_cast<int>(std::lround(o.scale / lambda));
    c.eta0 = o.eta0;
    c.seed = o.seed;
    return c;
}

// Empirical trace, analytic overlay on the same times and both grokking reports.
void trace_pair(Writer& w, const std::string& stem, const Trace& tr, const PredictionSpec& spec, double wall,
                runner::ManifestExtras extras = {}) {
    const std::string emp = w.path(stem + "_empirical.csv");
    extras["grok_report"] = json_quote(stem + "_grok.json");
    runner::export_trace(tr, emp, wall, extras);
    w.written.push_back(emp);

    const PredictionCurve curve = predict_curve(spec, tr.times);
    const std::string ana = w.path(stem + "_analytic.csv");
    runner::ManifestExtras pe{{"overlays", json_quote(std::filesystem::path(emp).filename().string())}};
    runner::export_prediction(curve, ana, pe);
    w.written.push_back(ana);

    const GrokReport re = grok_from_curves(tr.times, tr.a_tr, tr.a_gen);
    const GrokReport ra = grok_from_curves(curve.times, curve.a_tr, curve.a_gen, kGrokAccuracy,
                                           GrokMethod::analytic_quadrature);
    const std::string js = w.path(stem + "_grok.json");
    runner::write_text(js, "{\n  \"empirical\": " + runner::report_json(re) + ",\n  \"analytic\": " +
                               runner::report_json(ra) + "\n}\n");
    w.written.push_back(js);
}

void figure1(Writer& w, const FigureOptions& o) {
    const double eps = 1e-3;
    for (const double lam : {0.1, 0.9, 1.5}) {
        ExperimentConfig c = base_config(o, lam);
        c.epsilon = eps;
        c.time_grid = runner::default_time_grid(c);
        const auto t0 = std::chrono::steady_clock::now();
        const Trace tr = run_iterative(c);
        PredictionSpec spec{lam, o.eta0, 0.0, eps, 1, false, 1.0};
        trace_pair(w, "fig1_lambda" + tag(lam), tr, spec, since(t0));
    }
    std::string s = "lambda,epsilon,delta_t_quadrature,delta_t_leading,delta_t_corrected\n";
    for (const double eps_row : {1e-2, 1e-3, 1e-4}) {
        for (int i = 1; i <= 19; ++i) {
            const double lam = 0.05 * i;
            const GrokReport r = analytic_grok({lam, o.eta0, 0.0, eps_row, 1}, kGrokAccuracy, 1e12);
            std::string corrected = "nan";
            try {
                corrected = format_number(grok_time_closed(lam, o.eta0, eps_row, ClosedOrder::corrected));
            } catch (const OutOfRegimeError&) {
            }
            s += format_number(lam) + ',' + format_number(eps_row) + ',' +
                 (r.delta_t ? format_number(*r.delta_t) : std::string("nan")) + ',' +
                 format_number(grok_time_closed(lam, o.eta0, eps_row, ClosedOrder::leading)) + ',' + corrected + '\n';
        }
    }
    const std::string p = w.path("fig1_grok_vs_lambda.csv");
    runner::write_text(p, s);
    runner::write_manifest(runner::manifest_path(p), {{"kind", json_quote("grok-time table")},
                                                      {"eta0", format_number(o.eta0)},
                                                      {"delta_t_corrected", json_quote("nan where out of regime")}});
    w.written.push_back(p);
}

void figure2(Writer& w, const FigureOptions& o) {
    const double eps = 1e-3;
    for (const int d_out : {1, 50, 700}) {
        ExperimentConfig c = base_config(o, 0.9);
        c.d_out = d_out;
        c.epsilon = eps;
        c.time_grid = runner::default_time_grid(c);
        const auto t0 = std::chrono::steady_clock::now();
        const Trace tr = run_spectral(c, training_gram(c));
        PredictionSpec spec{0.9, o.eta0, 0.0, eps, d_out, false, 1.0};
        trace_pair(w, "fig2_dout" + std::to_string(d_out), tr, spec, since(t0));
    }
    std::string s = "lambda,d_out,delta_t,status\n";
    for (const double lam : {0.5, 0.7, 0.9}) {
        for (const int d : {1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 70, 100, 150, 200, 300, 500, 700, 1000}) {
            const GrokReport r = analytic_grok({lam, o.eta0, 0.0, eps, d}, kGrokAccuracy, 1e12);
            s += format_number(lam) + ',' + std::to_string(d) + ',' +
                 (r.delta_t ? format_number(*r.delta_t) : std::string("nan")) + ',' +
                 (r.no_grok_reason ? to_string(*r.no_grok_reason) : std::string("grok")) + '\n';
        }
    }
    const std::string p = w.path("fig2_grok_vs_dout.csv");
    runner::write_text(p, s);
    runner::write_manifest(runner::manifest_path(p), {{"kind", json_quote("grok-time table")},
                                                      {"eta0", format_number(o.eta0)},
                                                      {"epsilon", format_number(eps)}});
    w.written.push_back(p);
}

void figure3(Writer& w, const FigureOptions& o) {
    const double eps = 1e-3;
    for (const double g : {1e-5, 1e-3, 1e-2}) {
        ExperimentConfig c = base_config(o, 0.9);
        c.gamma = g;
        c.epsilon = eps;
        c.time_grid = runner::default_time_grid(c);
        const auto t0 = std::chrono::steady_clock::now();
        const Trace tr = run_iterative(c);
        PredictionSpec spec{0.9, o.eta0, g, eps, 1, false, 1.0};
        trace_pair(w, "fig3_gamma" + tag(g), tr, spec, since(t0));
    }
    std::string s = "lambda,gamma,delta_t,status\n";
    for (const double lam : {0.5, 0.9, 1.5}) {
        for (int k = 0; k <= 15; ++k) {
            const double g = std::pow(10.0, -6.0 + 5.0 * k / 15.0);
            const GrokReport r = analytic_grok({lam, o.eta0, g, eps, 1}, kGrokAccuracy, default_horizon(o.eta0));
            s += format_number(lam) + ',' + format_number(g) + ',' +
                 (r.delta_t ? format_number(*r.delta_t) : std::string("nan")) + ',' +
                 (r.no_grok_reason ? to_string(*r.no_grok_reason) : std::string("grok")) + '\n';
        }
    }
    const std::string p = w.path("fig3_grok_vs_gamma.csv");
    runner::write_text(p, s);
    runner::write_manifest(runner::manifest_path(p), {{"kind", json_quote("grok-time table")},
                                                      {"eta0", format_number(o.eta0)},
                                                      {"epsilon", format_number(eps)}});
    w.written.push_back(p);
}

void figure4(Writer& w, const FigureOptions& o) {
    ExperimentConfig base = base_config(o, 0.9);
    base.epsilon = 1e-3;
    std::vector<double> gammas{0.0};
    for (int k = 0; k <= 8; ++k) gammas.push_back(std::pow(10.0, -5.0 + 0.5 * k));
    std::vector<double> lambdas;
    for (int k = 1; k <= 15; ++k) lambdas.push_back(0.1 * k);
    const std::vector<double> douts{1, 2, 5, 10, 20, 50, 100, 200, 500};

    const struct {
        const char* name;
        Axis a1;
        Axis a2;
    } grids[] = {{"fig4_gamma_dout.csv", {"gamma", gammas}, {"d_out", douts}},
                 {"fig4_gamma_lambda.csv", {"gamma", gammas}, {"lambda", lambdas}},
                 {"fig4_dout_lambda.csv", {"d_out", douts}, {"lambda", lambdas}}};
    for (const auto& g : grids) {
        const auto t0 = std::chrono::steady_clock::now();
        const PhaseGrid pg = phase_sweep(base, g.a1, g.a2, SweepMethod::analytic);
        const std::string p = w.path(g.name);
        runner::export_phase_grid(pg, p, {{"method", json_quote("analytic")},
                                          {"base_config", runner::config_json(base)},
                                          {"wall_time_s", format_number(since(t0))}});
        w.written.push_back(p);
    }
}

void figure5(Writer& w, const FigureOptions& o) {
    const double eps = 1e-4;
    const double t_max = 5e4;
    for (const Arch arch : {Arch::two_layer_linear, Arch::two_layer_tanh}) {
        for (const int d_h : {50, 200}) {
            ExperimentConfig c = base_config(o, 0.5);
            c.d_out = 5;
            c.epsilon = eps;
            c.arch = arch;
            c.d_h = d_h;
            // tanh has no Gram shortcut; a coarser step keeps it at desk cost
            c.dt = arch == Arch::two_layer_tanh ? 25.0 : 1.0;
            c.time_grid = runner::log_time_grid(25.0, t_max, 40, 25.0);
            const auto t0 = std::chrono::steady_clock::now();
            const TwoLayerTrace tl = run_two_layer(c);
            PredictionSpec spec{0.5, o.eta0, 0.0, eps, 5, true, tl.d0_norm_sq};
            const std::string stem = std::string("fig5_") +
                                     (arch == Arch::two_layer_tanh ? "tanh" : "linear") + "_dh" + std::to_string(d_h);
            trace_pair(w, stem, tl.trace, spec, since(t0),
                       {{"d0_norm_sq", format_number(tl.d0_norm_sq)}, {"h_trace", json_quote(stem + "_h.csv")}});
            std::string h = "t,h\n";
            for (std::size_t i = 0; i < tl.h.size(); ++i) {
                h += format_number(tl.trace.times[i]) + ',' + format_number(tl.h[i]) + '\n';
            }
            const std::string hp = w.path(stem + "_h.csv");
            runner::write_text(hp, h);
            w.written.push_back(hp);
        }
    }
}

} // namespace

std::vector<std::string> run_figure(int n, const FigureOptions& opts) {
    if (opts.scale < 1) {
        throw InvalidParameter("figure scale must be >= 1");
    }
    Writer w{opts.out_dir, {}};
    switch (n) {
    case 1: figure1(w, opts); break;
    case 2: figure2(w, opts); break;
    case 3: figure3(w, opts); break;
    case 4: figure4(w, opts); break;
    case 5: figure5(w, opts); break;
    default: throw InvalidParameter("figure must be 1-5, got " + std::to_string(n));
    }
    return w.written;
}

} // namespace grokk::presets
