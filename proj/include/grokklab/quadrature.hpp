#pragma once

#include <functional>
#include <vector>

namespace grokk::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-13;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

/// Globally adaptive Gauss-Legendre integration of f over [a, b].
/// Each panel is estimated with a 16-point rule and checked against the
/// same rule on its two halves; the worst panel is bisected until the
/// summed error estimate is below max(abs_tol, rel_tol * |value|).
/// Throws QuadratureFailure (carrying the best estimate) if the panel
/// budget runs out first.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

/// Same, starting from the given breakpoints (sorted, at least two).
Result integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                 const Options& opts = {});

} // namespace grokk::quad
