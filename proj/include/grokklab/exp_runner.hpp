#pragma once

#include <map>
#include <string>
#include <vector>

#include "grokklab/analytic_predictor.hpp"
#include "grokklab/dynamics_sim.hpp"
#include "grokklab/grok_analysis.hpp"

namespace grokk::runner {

inline constexpr const char* kToolVersion = "grokklab 0.1.0";

/// {0} followed by `points` log-spaced times in [t_min, t_max]; with dt > 0
/// every time is rounded to a multiple of dt and duplicates are dropped.
std::vector<double> log_time_grid(double t_min, double t_max, int points, double dt = 0.0);

/// 200 log-spaced points from 10^-2 / eta0 to 4x the analytic t*_gen of the
/// config (10^3 / eta_eff when generalization never converges).
std::vector<double> default_time_grid(const ExperimentConfig& c);

/// Extra manifest entries, stored as raw JSON fragments keyed by name.
using ManifestExtras = std::map<std::string, std::string>;

std::string json_quote(const std::string& s);
std::string config_json(const ExperimentConfig& c);
std::string report_json(const GrokReport& r);

/// `<dir>/<stem>.manifest.json` for `<dir>/<stem>.csv`.
std::string manifest_path(const std::string& csv_path);

std::string format_number(double v);

struct TraceTable {
    std::vector<double> t, l_tr, l_gen, a_tr, a_gen;
};

/// CSV `t,l_tr,l_gen,a_tr,a_gen` plus a sibling manifest. Throws IoError.
void export_trace(const Trace& trace, const std::string& path, double wall_time_s = 0.0,
                  const ManifestExtras& extras = {});
void export_prediction(const PredictionCurve& curve, const std::string& path, const ManifestExtras& extras);
TraceTable read_trace_csv(const std::string& path);

/// Long-form `axis1,axis2,delta_t,status` with a manifest naming the axes.
void export_phase_grid(const PhaseGrid& grid, const std::string& path, const ManifestExtras& extras);

/// Writes a manifest for outputs that are not traces.
void write_manifest(const std::string& path, const ManifestExtras& fields);

void write_text(const std::string& path, const std::string& text);

/// Entry point of the command-line tool; returns the process exit code.
int cli_main(int argc, char** argv);

} // namespace grokk::runner
