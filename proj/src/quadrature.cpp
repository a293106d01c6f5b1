#include "grokklab/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <tuple>
#include <utility>

#include "grokklab/errors.hpp"

namespace grokk::quad {
namespace {

constexpr int kOrder = 16;

struct Rule {
    std::array<double, kOrder> x{};
    std::array<double, kOrder> w{};
};

// Nodes and weights by Newton iteration on P_n.
Rule make_rule() {
    Rule r;
    for (int i = 0; i < kOrder; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= kOrder; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const Rule& rule() {
    static const Rule r = make_rule();
    return r;
}

struct Sum {
    double value;
    double abs;  // the rule applied to |f|
};

Sum apply(const std::function<double(double)>& f, double a, double b) {
    const Rule& r = rule();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    double sa = 0.0;
    for (int i = 0; i < kOrder; ++i) {
        const double v = r.w[i] * f(mid + half * r.x[i]);
        s += v;
        sa += std::abs(v);
    }
    return {s * half, sa * std::abs(half)};
}

struct Panel {
    double a, b;
    double left, right;  // rule applied to each half
    double error;
    bool settled;  // error estimate is at the roundoff level of the panel
    double value() const { return left + right; }
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel make_panel(const std::function<double(double)>& f, double a, double b, double coarse) {
    const double mid = 0.5 * (a + b);
    const Sum left = apply(f, a, mid);
    const Sum right = apply(f, mid, b);
    const double err = std::abs(left.value + right.value - coarse);
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * (left.abs + right.abs);
    return {a, b, left.value, right.value, err, err <= roundoff};
}

} // namespace

Result integrate(const std::function<double(double)>& f, const std::vector<double>& breaks,
                 const Options& opts) {
    if (breaks.size() < 2) {
        throw InvalidParameter("integrate: need at least two breakpoints");
    }
    std::priority_queue<Panel> heap;
    double settled_value = 0.0;
    double settled_error = 0.0;
    int settled_count = 0;
    auto push = [&](const Panel& p) {
        if (p.settled) {
            ++settled_count;
            settled_value += p.value();
            settled_error += p.error;
        } else {
            heap.push(p);
        }
    };
    Result res;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        if (!(b >= a)) {
            throw InvalidParameter("integrate: breakpoints must be sorted");
        }
        if (b == a) {
            continue;
        }
        push(make_panel(f, a, b, apply(f, a, b).value));
        res.evaluations += 3 * kOrder;
    }

    // Running sums drift; they only steer refinement and are recomputed
    // exactly before the stopping decision is trusted.
    auto exact_totals = [&heap, &settled_value]() {
        auto copy = heap;
        double v = settled_value;
        double e = 0.0;
        while (!copy.empty()) {
            v += copy.top().value();
            e += copy.top().error;
            copy.pop();
        }
        return std::pair{v, e};
    };

    auto [value, error] = exact_totals();
    while (true) {
        if (!std::isfinite(value)) {
            throw NumericFailure("integrate: integrand produced a non-finite value");
        }
        if (heap.empty()) {
            break;
        }
        if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
            std::tie(value, error) = exact_totals();
            if (error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
                break;
            }
        }
        if (static_cast<int>(heap.size()) + settled_count >= opts.max_intervals) {
            std::tie(value, error) = exact_totals();
            throw QuadratureFailure("integrate: panel budget exhausted", value, error + settled_error);
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw QuadratureFailure("integrate: panel width reached machine resolution", value,
                                    error + settled_error);
        }
        const Panel lo = make_panel(f, worst.a, mid, worst.left);
        const Panel hi = make_panel(f, mid, worst.b, worst.right);
        value += lo.value() + hi.value() - worst.value();
        error += (lo.settled ? 0.0 : lo.error) + (hi.settled ? 0.0 : hi.error) - worst.error;
        push(lo);
        push(hi);
        res.evaluations += 4 * kOrder;
    }
    res.value = value;
    res.error = error + settled_error;
    return res;
}

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
    return integrate(f, std::vector<double>{a, b}, opts);
}

} // namespace grokk::quad
