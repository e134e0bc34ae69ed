#pragma once

// Independent reference computations used only by the tests. They deliberately avoid the
// library's own algorithms (no sorting-based rearrangement, no closed-form cell integrals).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Brute-force d_x(lambda) from raw cell data.
inline double distribution(const std::vector<double>& values, const std::vector<double>& widths,
                           double lambda) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > lambda) acc += widths[i];
    }
    return static_cast<double>(acc);
}

/// x*(t) = inf{lambda >= 0 : d_x(lambda) <= t}, searched over the finite candidate set.
inline double rearranged_at(const std::vector<double>& values, const std::vector<double>& widths,
                            double t) {
    double best = *std::max_element(values.begin(), values.end());
    for (double lambda : values) {
        if (lambda < best && distribution(values, widths, lambda) <= t) best = lambda;
    }
    if (distribution(values, widths, 0.0) <= t) best = 0.0;
    return best;
}

/// Composite Simpson rule on [a, b] in log-space (a > 0), used for smooth positive integrands.
inline double log_simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (a < 1.0 && b > 1.0) return log_simpson(f, a, 1.0, n) + log_simpson(f, 1.0, b, n);
    if (n % 2) ++n;
    const double la = std::log(a), lb = std::log(b), h = (lb - la) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = la + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f(std::exp(s)) * std::exp(s);
    }
    return acc * h / 3.0;
}

/// Minimum of g over a dense logarithmic grid.
inline double log_grid_min(const std::function<double(double)>& g, double lo, double hi, int points) {
    double best = INFINITY;
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < points; ++i) {
        best = std::min(best, g(std::exp(a + (b - a) * i / (points - 1))));
    }
    return best;
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo = 0.0,
                                         double hi = 5.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& e : v) e = u(rng);
    return v;
}

}  // namespace oracle
