#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace grokk::presets {

struct FigureOptions {
    int scale = 1000;  // d_in
    double eta0 = 0.01;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
};

/// Writes every CSV (and manifest) needed to draw figure `n` (1-5).
/// Returns the written CSV paths.
std::vector<std::string> run_figure(int n, const FigureOptions& opts);

} // namespace grokk::presets
