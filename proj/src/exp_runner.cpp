#include "grokklab/exp_runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "grokklab/acceptance.hpp"
#include "grokklab/errors.hpp"
#include "grokklab/presets.hpp"
#include "grokklab/rmt_core.hpp"

namespace grokk::runner {

using nlohmann::ordered_json;

std::vector<double> log_time_grid(double t_min, double t_max, int points, double dt) {
    if (!(t_min > 0.0) || !(t_max > t_min) || points < 2) {
        throw InvalidParameter("time grid needs 0 < time-min < time-max and at least 2 points");
    }
    std::vector<double> g{0.0};
    for (int i = 0; i < points; ++i) {
        double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (points - 1));
        if (dt > 0.0) {
            t = std::max(1.0, std::round(t / dt)) * dt;
        }
        if (t > g.back()) {
            g.push_back(t);
        }
    }
    return g;
}

std::vector<double> default_time_grid(const ExperimentConfig& c) {
    const bool two = c.arch != Arch::one_layer;
    const double eta_case = two ? c.eta0 / (2.0 * c.d_out) : c.eta0;
    const double eta_eff = eta_case / c.d_out;
    AnalyticCase ac{c.lambda(), eta_case, two ? 0.0 : c.gamma, c.epsilon, c.d_out};
    double t_max = 1e3 / eta_eff;
    try {
        const GrokReport r = analytic_grok(ac, kGrokAccuracy, 1e4 * default_horizon(eta_eff));
        if (r.t_star_gen && *r.t_star_gen > 0.0) {
            t_max = 4.0 * *r.t_star_gen;
        }
    } catch (const Error&) {
    }
    const double t_min = 1e-2 / c.eta0;
    t_max = std::max(t_max, 100.0 * t_min);
    return log_time_grid(t_min, t_max, 200, c.dt);
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string json_quote(const std::string& s) { return ordered_json(s).dump(); }

namespace {

ordered_json config_obj(const ExperimentConfig& c) {
    ordered_json j;
    j["d_in"] = c.d_in;
    j["d_out"] = c.d_out;
    j["n_tr"] = c.n_tr;
    j["n_gen"] = c.effective_n_gen();
    j["lambda"] = c.lambda();
    j["eta0"] = c.eta0;
    j["gamma"] = c.gamma;
    j["epsilon"] = c.epsilon;
    j["alpha"] = c.alpha;
    j["sigma_delta"] = c.sigma_delta;
    j["arch"] = to_string(c.arch);
    j["d_h"] = c.d_h;
    j["seed"] = c.seed;
    j["dt"] = c.dt;
    j["time_points"] = c.time_grid.size();
    if (!c.time_grid.empty()) {
        j["time_first"] = c.time_grid.front();
        j["time_last"] = c.time_grid.back();
    }
    return j;
}

ordered_json seeds_obj(const ExperimentConfig& c) {
    ordered_json j;
    j["base"] = c.seed;
    j["generator"] = "mt19937_64 seeded per stream by splitmix64(base, stream)";
    j["teacher"] = derive_seed(c.seed, stream::teacher);
    j["student"] = derive_seed(c.seed, stream::student);
    j["train_x"] = derive_seed(c.seed, stream::train_x);
    j["gen_x"] = derive_seed(c.seed, stream::gen_x);
    j["label_noise"] = derive_seed(c.seed, stream::label_noise);
    return j;
}

void put_opt(ordered_json& j, const char* key, const std::optional<double>& v) {
    if (v) {
        j[key] = *v;
    } else {
        j[key] = nullptr;
    }
}

void merge_extras(ordered_json& j, const ManifestExtras& extras) {
    for (const auto& [k, v] : extras) {
        j[k] = ordered_json::parse(v);
    }
}

} // namespace

std::string config_json(const ExperimentConfig& c) { return config_obj(c).dump(); }

std::string report_json(const GrokReport& r) {
    ordered_json j;
    j["method"] = to_string(r.method);
    put_opt(j, "t_star_tr", r.t_star_tr);
    put_opt(j, "t_star_gen", r.t_star_gen);
    put_opt(j, "delta_t", r.delta_t);
    j["threshold"] = r.threshold;
    j["grokked"] = r.grokked();
    if (r.no_grok_reason) {
        j["no_grok_reason"] = to_string(*r.no_grok_reason);
    } else {
        j["no_grok_reason"] = nullptr;
    }
    j["multi_crossing"] = r.multi_crossing;
    return j.dump();
}

std::string manifest_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".manifest.json");
    return p.string();
}

void write_text(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path);
    }
}

void write_manifest(const std::string& path, const ManifestExtras& fields) {
    ordered_json j;
    j["tool_version"] = kToolVersion;
    merge_extras(j, fields);
    write_text(path, j.dump(2) + "\n");
}

namespace {

std::string table_csv(const std::vector<double>& t, const std::vector<double>& l_tr, const std::vector<double>& l_gen,
                      const std::vector<double>& a_tr, const std::vector<double>& a_gen) {
    std::string s = "t,l_tr,l_gen,a_tr,a_gen\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        s += format_number(t[i]) + ',' + format_number(l_tr[i]) + ',' + format_number(l_gen[i]) + ',' +
             format_number(a_tr[i]) + ',' + format_number(a_gen[i]) + '\n';
    }
    return s;
}

} // namespace

void export_trace(const Trace& trace, const std::string& path, double wall_time_s, const ManifestExtras& extras) {
    write_text(path, table_csv(trace.times, trace.l_tr, trace.l_gen, trace.a_tr, trace.a_gen));
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["artifact"] = std::filesystem::path(path).filename().string();
    j["kind"] = "trace";
    j["engine"] = to_string(trace.engine);
    j["config"] = config_obj(trace.config);
    j["seeds"] = seeds_obj(trace.config);
    j["time_convention"] = trace.note;
    j["l_gen_column"] = trace.engine == Engine::spectral ? "exact |D|^2/d_out" : "fresh-sample estimate";
    std::vector<std::string> pop;
    for (double v : trace.l_gen_population) pop.push_back(format_number(v));
    j["l_gen_population"] = pop;
    j["wall_time_s"] = wall_time_s;
    merge_extras(j, extras);
    write_text(manifest_path(path), j.dump(2) + "\n");
}

void export_prediction(const PredictionCurve& curve, const std::string& path, const ManifestExtras& extras) {
    write_text(path, table_csv(curve.times, curve.l_tr, curve.l_gen, curve.a_tr, curve.a_gen));
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["artifact"] = std::filesystem::path(path).filename().string();
    j["kind"] = "prediction";
    j["regime_tags"] = curve.regime_tags;
    merge_extras(j, extras);
    write_text(manifest_path(path), j.dump(2) + "\n");
}

TraceTable read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != "t,l_tr,l_gen,a_tr,a_gen") {
        throw IoError(path + ": unexpected header '" + line + "'");
    }
    TraceTable tab;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) {
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw IoError(path + ": bad number '" + cell + "' on line " + std::to_string(row));
            }
        }
        if (v.size() != 5) {
            throw IoError(path + ": expected 5 columns on line " + std::to_string(row));
        }
        tab.t.push_back(v[0]);
        tab.l_tr.push_back(v[1]);
        tab.l_gen.push_back(v[2]);
        tab.a_tr.push_back(v[3]);
        tab.a_gen.push_back(v[4]);
    }
    return tab;
}

void export_phase_grid(const PhaseGrid& grid, const std::string& path, const ManifestExtras& extras) {
    std::string s = "axis1,axis2,delta_t,status\n";
    for (const PhaseCell& c : grid.cells) {
        std::string status = "grok";
        if (c.report.no_grok_reason) {
            status = to_string(*c.report.no_grok_reason);
        }
        s += format_number(c.v1) + ',' + format_number(c.v2) + ',' +
             (c.report.delta_t ? format_number(*c.report.delta_t) : std::string("nan")) + ',' + status + '\n';
    }
    write_text(path, s);
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["artifact"] = std::filesystem::path(path).filename().string();
    j["kind"] = "phase-grid";
    j["axis1"] = grid.axis1.name;
    j["axis2"] = grid.axis2.name;
    j["rows"] = grid.cells.size();
    merge_extras(j, extras);
    write_text(manifest_path(path), j.dump(2) + "\n");
}

// ---- command line ----------------------------------------------------------

namespace {

struct CliOptions {
    int d_in = 1000;
    std::optional<int> n_tr;
    std::optional<double> lambda;
    int d_out = 1;
    double eta0 = 0.01;
    double gamma = 0.0;
    double epsilon = 1e-3;
    double alpha = 1.0;
    double sigma_delta = 0.0;
    std::string arch = "one_layer";
    int d_h = 200;
    std::uint64_t seed = 1;
    double dt = 1.0;
    std::optional<double> time_min;
    std::optional<double> time_max;
    int time_points = 200;
    std::string method;
    std::string out;
};

ExperimentConfig build_config(const CliOptions& o, bool snap_to_dt) {
    ExperimentConfig c;
    c.d_in = o.d_in;
    c.d_out = o.d_out;
    if (o.n_tr) {
        c.n_tr = *o.n_tr;
    } else {
        const double lam = o.lambda.value_or(0.5);
        if (!(lam > 0.0)) throw InvalidParameter("lambda must be positive");
        c.n_tr = static_cast<int>(std::lround(o.d_in / lam));
    }
    c.eta0 = o.eta0;
    c.gamma = o.gamma;
    c.epsilon = o.epsilon;
    c.alpha = o.alpha;
    c.sigma_delta = o.sigma_delta;
    c.arch = parse_arch(o.arch);
    c.d_h = o.d_h;
    c.seed = o.seed;
    c.dt = o.dt;
    c.validate();
    if (o.time_min || o.time_max) {
        const double lo = o.time_min.value_or(1e-2 / c.eta0);
        const double hi = o.time_max.value_or(1e3 / c.eta0);
        c.time_grid = log_time_grid(lo, hi, o.time_points, snap_to_dt ? c.dt : 0.0);
    } else {
        c.time_grid = default_time_grid(c);
    }
    return c;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            v.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw InvalidParameter("cannot parse grid value '" + cell + "'");
        }
    }
    if (v.empty()) throw InvalidParameter("empty grid");
    return v;
}

int cmd_simulate(const CliOptions& o, const std::string& engine) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool spectral = engine == "spectral";
    const ExperimentConfig c = build_config(o, !spectral);
    const std::string out = o.out.empty() ? "trace.csv" : o.out;
    ManifestExtras extras{{"command", json_quote("simulate")}};
    Trace tr;
    if (spectral) {
        tr = run_spectral(c, training_gram(c));
    } else if (c.arch == Arch::one_layer) {
        tr = run_iterative(c);
    } else {
        TwoLayerTrace tl = run_two_layer(c);
        tr = std::move(tl.trace);
        std::string h = "t,h\n";
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            h += format_number(tr.times[i]) + ',' + format_number(tl.h[i]) + '\n';
        }
        std::filesystem::path hp(out);
        hp.replace_extension(".h.csv");
        write_text(hp.string(), h);
        extras["h_trace"] = json_quote(hp.filename().string());
        extras["d0_norm_sq"] = format_number(tl.d0_norm_sq);
    }
    export_trace(tr, out, elapsed(t0), extras);
    std::cout << out << "\n";
    return 0;
}

int cmd_predict(const CliOptions& o, std::optional<double> time, double d0_norm_sq) {
    PredictionSpec spec;
    spec.lambda = o.lambda.value_or(o.n_tr ? static_cast<double>(o.d_in) / *o.n_tr : 0.5);
    spec.eta0 = o.eta0;
    spec.gamma = o.gamma;
    spec.epsilon = o.epsilon;
    spec.d_out = o.d_out;
    const Arch arch = parse_arch(o.arch);
    spec.two_layer = arch != Arch::one_layer;
    spec.d0_norm_sq = d0_norm_sq;
    std::vector<double> times;
    if (time) {
        if (!(*time >= 0.0)) throw InvalidParameter("--time must be >= 0");
        times = {*time};
    } else {
        CliOptions tmp = o;
        tmp.lambda = spec.lambda;
        tmp.n_tr.reset();
        times = build_config(tmp, false).time_grid;
    }
    const PredictionCurve curve = predict_curve(spec, times);
    ordered_json params;
    params["lambda"] = spec.lambda;
    params["eta0"] = spec.eta0;
    params["gamma"] = spec.gamma;
    params["epsilon"] = spec.epsilon;
    params["d_out"] = spec.d_out;
    params["two_layer"] = spec.two_layer;
    params["d0_norm_sq"] = spec.d0_norm_sq;
    if (o.out.empty()) {
        std::cout << table_csv(curve.times, curve.l_tr, curve.l_gen, curve.a_tr, curve.a_gen);
    } else {
        export_prediction(curve, o.out, {{"command", json_quote("predict")}, {"parameters", params.dump()}});
        std::cout << o.out << "\n";
    }
    return 0;
}

int cmd_grok_time(const CliOptions& o, const std::string& method) {
    const double lam = o.lambda.value_or(o.n_tr ? static_cast<double>(o.d_in) / *o.n_tr : 0.5);
    ordered_json j;
    j["method"] = method;
    j["lambda"] = lam;
    j["eta0"] = o.eta0;
    j["epsilon"] = o.epsilon;
    j["gamma"] = o.gamma;
    j["d_out"] = o.d_out;
    if (method == "closed-leading") {
        j["t_star_tr"] = nullptr;
        j["t_star_gen"] = nullptr;
        j["delta_t"] = grok_time_closed(lam, o.eta0, o.epsilon, ClosedOrder::leading);
    } else if (method == "closed-corrected") {
        const LambertTimes lt = grok_times_lambert(lam, o.eta0, o.epsilon);
        j["t_star_tr"] = lt.t_tr;
        j["t_star_gen"] = lt.t_gen;
        j["delta_t_lambert"] = lt.t_gen - lt.t_tr;
        try {
            j["delta_t"] = grok_time_closed(lam, o.eta0, o.epsilon, ClosedOrder::corrected);
        } catch (const OutOfRegimeError& e) {
            j["delta_t"] = nullptr;
            j["warning"] = e.what();
        }
    } else if (method == "closed-wd") {
        j["t_star_tr"] = nullptr;
        j["t_star_gen"] = nullptr;
        j["delta_t"] = grok_time_wd(lam, o.eta0);
    } else if (method == "analytic") {
        const GrokReport r = analytic_grok({lam, o.eta0, o.gamma, o.epsilon, o.d_out});
        j["report"] = ordered_json::parse(report_json(r));
        put_opt(j, "t_star_tr", r.t_star_tr);
        put_opt(j, "t_star_gen", r.t_star_gen);
        put_opt(j, "delta_t", r.delta_t);
    } else {  // empirical
        CliOptions tmp = o;
        if (o.lambda && !o.n_tr) tmp.lambda = lam;
        const ExperimentConfig c = build_config(tmp, true);
        const Trace tr = (c.arch == Arch::one_layer && c.sigma_delta == 0.0) ? run_spectral(c, training_gram(c))
                                                                             : run_iterative(c);
        const GrokReport r = grok_from_curves(tr.times, tr.a_tr, tr.a_gen);
        j["engine"] = to_string(tr.engine);
        j["seed"] = c.seed;
        j["report"] = ordered_json::parse(report_json(r));
        put_opt(j, "t_star_tr", r.t_star_tr);
        put_opt(j, "t_star_gen", r.t_star_gen);
        put_opt(j, "delta_t", r.delta_t);
    }
    const std::string text = j.dump(2) + "\n";
    if (o.out.empty()) {
        std::cout << text;
    } else {
        write_text(o.out, text);
        std::cout << o.out << "\n";
    }
    return 0;
}

int cmd_phase(const CliOptions& o, const std::string& axis1, const std::string& grid1, const std::string& axis2,
              const std::string& grid2, const std::string& method, int seeds) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig base;
    base.d_in = o.d_in;
    base.d_out = o.d_out;
    base.n_tr = o.n_tr ? *o.n_tr : static_cast<int>(std::lround(o.d_in / o.lambda.value_or(0.5)));
    base.eta0 = o.eta0;
    base.gamma = o.gamma;
    base.epsilon = o.epsilon;
    base.seed = o.seed;
    base.validate();
    const SweepMethod m = method == "empirical" ? SweepMethod::empirical : SweepMethod::analytic;
    const PhaseGrid g = phase_sweep(base, {axis1, parse_list(grid1)}, {axis2, parse_list(grid2)}, m, seeds);
    const std::string out = o.out.empty() ? "phase.csv" : o.out;
    ManifestExtras extras{{"command", json_quote("phase-diagram")},
                          {"method", json_quote(method)},
                          {"base_config", config_json(base)},
                          {"seeds", std::to_string(seeds)},
                          {"wall_time_s", format_number(elapsed(t0))}};
    export_phase_grid(g, out, extras);
    std::cout << out << "\n";
    return 0;
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"grokklab: grokking dynamics of linear teacher-student networks, simulated and predicted"};
    app.require_subcommand(1);
    app.set_config("--config", "", "File of `key = value` lines using the long flag names; flags override it");

    CliOptions o;
    app.add_option("--d-in", o.d_in, "Input dimension")->check(CLI::PositiveNumber);
    app.add_option("--n-tr", o.n_tr, "Training samples (default d_in / lambda)");
    app.add_option("--lambda", o.lambda, "d_in / n_tr (used when --n-tr is absent)");
    app.add_option("--d-out", o.d_out, "Output dimension")->check(CLI::PositiveNumber);
    app.add_option("--eta0", o.eta0, "Gradient-flow learning rate")->check(CLI::PositiveNumber);
    app.add_option("--gamma", o.gamma, "Weight decay")->check(CLI::NonNegativeNumber);
    app.add_option("--epsilon", o.epsilon, "Accuracy threshold")->check(CLI::PositiveNumber);
    app.add_option("--alpha", o.alpha, "Student init rescale")->check(CLI::PositiveNumber);
    app.add_option("--sigma-delta", o.sigma_delta, "Label-noise std")->check(CLI::NonNegativeNumber);
    app.add_option("--arch", o.arch, "one_layer | two_layer_linear | two_layer_tanh")
        ->check(CLI::IsMember({"one_layer", "two_layer_linear", "two_layer_tanh"}));
    app.add_option("--d-h", o.d_h, "Hidden width (two-layer)")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "Base seed");
    app.add_option("--dt", o.dt, "GD step in gradient-flow time (eta = eta0 * dt)")->check(CLI::PositiveNumber);
    app.add_option("--time-min", o.time_min, "First non-zero grid time")->check(CLI::PositiveNumber);
    app.add_option("--time-max", o.time_max, "Last grid time")->check(CLI::PositiveNumber);
    app.add_option("--time-points", o.time_points, "Log-spaced grid points")->check(CLI::Range(2, 1000000));
    app.add_option("--method", o.method, "Method for grok-time / phase-diagram");
    app.add_option("--out", o.out, "Output path (file, or directory for figure)");

    std::string engine = "iterative";
    auto* sim = app.add_subcommand("simulate", "Run the GD simulator and write a trace CSV + manifest");
    sim->add_option("--engine", engine, "iterative | spectral")->check(CLI::IsMember({"iterative", "spectral"}));

    std::optional<double> time;
    double d0_norm_sq = 1.0;
    auto* pred = app.add_subcommand("predict", "Analytic loss/accuracy curves");
    pred->add_option("--time", time, "Single evaluation time");
    pred->add_option("--d0-norm-sq", d0_norm_sq, "Two-layer |D0|^2 prefactor")->check(CLI::NonNegativeNumber);

    auto* grok = app.add_subcommand("grok-time", "Grokking time as JSON");

    std::string axis1 = "gamma", axis2 = "lambda", grid1 = "0,0.001,0.01", grid2 = "0.5,0.9,1.5";
    int seeds = 3;
    auto* phase = app.add_subcommand("phase-diagram", "Grokking-time phase grid as long-form CSV");
    phase->add_option("--axis1", axis1, "lambda | d_out | gamma");
    phase->add_option("--grid1", grid1, "Comma-separated values");
    phase->add_option("--axis2", axis2, "lambda | d_out | gamma");
    phase->add_option("--grid2", grid2, "Comma-separated values");
    phase->add_option("--seeds", seeds, "Seeds per cell (empirical)")->check(CLI::PositiveNumber);

    int figure_id = 0;
    int fig_scale = 1000;
    auto* fig = app.add_subcommand("figure", "Write every CSV needed for figure N (1-5)");
    fig->add_option("n", figure_id, "Figure number")->required()->check(CLI::Range(1, 5));
    fig->add_option("--scale", fig_scale, "d_in for the preset runs")->check(CLI::PositiveNumber);

    int criterion = 0;
    int test_scale = 256;
    bool verbose = false;
    auto* self = app.add_subcommand("selftest", "Run the acceptance suite");
    self->add_option("--criterion", criterion, "Run a single criterion")->check(CLI::Range(1, acceptance::kCriteria));
    self->add_option("--scale", test_scale, "d_in where a criterion leaves it free")->check(CLI::PositiveNumber);
    self->add_flag("-v,--verbose", verbose, "Print per-check details");

    for (auto* sc : {sim, pred, grok, phase, fig, self}) {
        sc->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    try {
        if (*sim) return cmd_simulate(o, engine);
        if (*pred) return cmd_predict(o, time, d0_norm_sq);
        if (*grok) {
            const std::string m = o.method.empty() ? "closed-corrected" : o.method;
            if (m != "closed-leading" && m != "closed-corrected" && m != "closed-wd" && m != "analytic" &&
                m != "empirical") {
                throw InvalidParameter("unknown --method '" + m +
                                       "' (closed-leading, closed-corrected, closed-wd, analytic, empirical)");
            }
            return cmd_grok_time(o, m);
        }
        if (*phase) {
            const std::string m = o.method.empty() ? "analytic" : o.method;
            if (m != "analytic" && m != "empirical") {
                throw InvalidParameter("unknown --method '" + m + "' (analytic, empirical)");
            }
            return cmd_phase(o, axis1, grid1, axis2, grid2, m, seeds);
        }
        if (*fig) {
            presets::FigureOptions fo;
            fo.scale = fig_scale;
            fo.eta0 = o.eta0;
            fo.seed = o.seed;
            fo.out_dir = o.out.empty() ? "." : o.out;
            for (const auto& p : presets::run_figure(figure_id, fo)) {
                std::cout << p << "\n";
            }
            return 0;
        }
        if (*self) {
            bool all = true;
            for (int n = 1; n <= acceptance::kCriteria; ++n) {
                if (criterion != 0 && n != criterion) continue;
                const auto outcome = acceptance::run_criterion(n, test_scale);
                std::cout << acceptance::format(outcome, verbose) << std::flush;
                all = all && outcome.pass;
            }
            return all ? 0 : 1;
        }
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid argument: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace grokk::runner
