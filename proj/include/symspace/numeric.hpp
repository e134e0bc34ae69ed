#pragma once

// Small one-dimensional numeric kernels shared by the modules.

#include <cmath>
#include <utility>

namespace symspace::detail {

inline constexpr double kGoldenRatio = 0.6180339887498949;

struct Minimum {
    double x;
    double value;
};

/// Golden-section search for a minimum of f on [a, b]; stops when the bracket is below
/// `tol * max(1, |x|)`. Infinite values are treated as larger than any finite value.
template <class F>
Minimum golden_minimize(F&& f, double a, double b, double tol = 1e-10, int max_iter = 200) {
    double x1 = b - kGoldenRatio * (b - a);
    double x2 = a + kGoldenRatio * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(b - a) <= tol * std::max(1.0, std::abs(0.5 * (a + b)))) break;
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGoldenRatio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGoldenRatio * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? Minimum{x1, f1} : Minimum{x2, f2};
}

/// Golden-section search for a maximum.
template <class F>
Minimum golden_maximize(F&& f, double a, double b, double tol = 1e-10, int max_iter = 200) {
    auto m = golden_minimize([&](double x) { return -f(x); }, a, b, tol, max_iter);
    return {m.x, -m.value};
}

}  // namespace symspace::detail
