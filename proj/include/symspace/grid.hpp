#pragma once

// Discretized measure spaces and exact arithmetic on nonnegative step functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "symspace/error.hpp"

namespace symspace {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SpaceKind { unit_interval, half_line, counting };

inline const char* to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::unit_interval: return "unit_interval";
        case SpaceKind::half_line: return "half_line";
        case SpaceKind::counting: return "counting";
    }
    return "unknown";
}

inline SpaceKind space_kind_from_string(std::string_view name) {
    if (name == "unit_interval") return SpaceKind::unit_interval;
    if (name == "half_line") return SpaceKind::half_line;
    if (name == "counting") return SpaceKind::counting;
    throw ParseError("unknown measure space kind '" + std::string(name) + "'");
}

namespace detail {

/// Sum whose result depends only on the multiset of terms (sorted, then compensated).
inline double canonical_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    double carry = 0.0;
    for (double t : terms) {
        const double next = sum + t;
        if (std::abs(sum) >= std::abs(t)) {
            carry += (sum - next) + t;
        } else {
            carry += (t - next) + sum;
        }
        sum = next;
    }
    return sum + carry;
}

/// b^k - a^k for 0 <= a < b, accurate when a is close to b.
inline double power_difference(double a, double b, double k) {
    if (a == 0.0) return std::pow(b, k);
    return std::pow(a, k) * std::expm1(k * std::log(b / a));
}

}  // namespace detail

/// A model measure space: (0,1), a truncation [t_min, t_max] of (0,inf), or {1..n} with counting measure.
/// Cells are [b_i, b_{i+1}); widths are stored separately so permuted grids keep exact widths.
class MeasureSpace {
public:
    static constexpr double kHalfLineMin = 0x1p-20;
    static constexpr double kHalfLineMax = 0x1p20;

    /// (0,1) with half the cells geometric (ratio up to 2) below 2^-10, the rest uniform.
    static MeasureSpace unit_interval(std::size_t cells) {
        require_cells(cells);
        std::vector<double> bp{0.0};
        const std::size_t geometric = cells / 2;
        if (geometric > 0) {
            const double ratio_log2 =
                geometric > 1 ? std::min(1.0, 990.0 / static_cast<double>(geometric - 1)) : 1.0;
            for (std::size_t j = 1; j <= geometric; ++j) {
                bp.push_back(std::exp2(-10.0 - ratio_log2 * static_cast<double>(geometric - j)));
            }
        }
        const std::size_t uniform = cells - geometric;
        const double start = bp.back();
        for (std::size_t j = 1; j <= uniform; ++j) {
            bp.push_back(j == uniform ? 1.0
                                      : start + (1.0 - start) * static_cast<double>(j) /
                                                    static_cast<double>(uniform));
        }
        return from_breakpoints(SpaceKind::unit_interval, std::move(bp));
    }

    /// (0,1) with equal cells.
    static MeasureSpace uniform(std::size_t cells) {
        require_cells(cells);
        std::vector<double> bp(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i) {
            bp[i] = static_cast<double>(i) / static_cast<double>(cells);
        }
        bp.back() = 1.0;
        return from_breakpoints(SpaceKind::unit_interval, std::move(bp));
    }

    /// (0,1) with breakpoints 0, 2^-(n-1), ..., 1/2, 1.
    static MeasureSpace dyadic(std::size_t cells) {
        require_cells(cells);
        if (cells > 1000) throw DomainError("dyadic grid limited to 1000 cells");
        std::vector<double> bp{0.0};
        for (std::size_t j = cells - 1; j > 0; --j) bp.push_back(std::exp2(-static_cast<double>(j)));
        bp.push_back(1.0);
        return from_breakpoints(SpaceKind::unit_interval, std::move(bp));
    }

    /// Geometric grid on the truncation [t_min, t_max] of (0, inf).
    static MeasureSpace half_line(std::size_t cells, double t_min = kHalfLineMin,
                                  double t_max = kHalfLineMax) {
        require_cells(cells);
        if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max)) {
            throw DomainError("half_line requires 0 < t_min < t_max < inf");
        }
        const double lo = std::log2(t_min);
        const double hi = std::log2(t_max);
        std::vector<double> bp(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i) {
            bp[i] = std::exp2(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells));
        }
        bp.front() = t_min;
        bp.back() = t_max;
        return from_breakpoints(SpaceKind::half_line, std::move(bp));
    }

    static MeasureSpace counting(std::size_t n) {
        require_cells(n);
        std::vector<double> bp(n + 1);
        std::iota(bp.begin(), bp.end(), 0.0);
        return from_breakpoints(SpaceKind::counting, std::move(bp));
    }

    static MeasureSpace from_breakpoints(SpaceKind kind, std::vector<double> breakpoints) {
        validate_breakpoints(kind, breakpoints);
        std::vector<double> widths(breakpoints.size() - 1);
        for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
            widths[i] = breakpoints[i + 1] - breakpoints[i];
        }
        return MeasureSpace(kind, std::move(breakpoints), std::move(widths));
    }

    /// Grid laid from `left` with the given exact widths; the last breakpoint is pinned to `right`.
    static MeasureSpace from_widths(SpaceKind kind, double left, double right,
                                    std::vector<double> widths) {
        if (widths.empty()) throw DomainError("measure space needs at least one cell");
        std::vector<double> bp(widths.size() + 1);
        bp[0] = left;
        for (std::size_t i = 0; i < widths.size(); ++i) {
            if (!(widths[i] > 0.0) || !std::isfinite(widths[i])) {
                throw DomainError("cell widths must be positive and finite");
            }
            bp[i + 1] = bp[i] + widths[i];
        }
        if (std::abs(bp.back() - right) <= 1e-9 * std::max(1.0, std::abs(right))) bp.back() = right;
        for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
            if (!(bp[i + 1] > bp[i])) throw DomainError("cell widths underflow the breakpoint grid");
        }
        validate_breakpoints(kind, bp);
        return MeasureSpace(kind, std::move(bp), std::move(widths));
    }

    SpaceKind kind() const noexcept { return kind_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& widths() const noexcept { return widths_; }
    std::size_t cells() const noexcept { return widths_.size(); }
    double width(std::size_t i) const { return widths_.at(i); }
    double left() const noexcept { return breakpoints_.front(); }
    double right() const noexcept { return breakpoints_.back(); }
    double total_measure() const noexcept { return right() - left(); }
    bool truncated() const noexcept { return kind_ == SpaceKind::half_line; }

    /// Bounds of the modelled interval; for half_line these are the truncation bounds.
    std::pair<double, double> truncation() const noexcept { return {left(), right()}; }

    /// Index of the cell [b_i, b_{i+1}) containing t; the right endpoint maps to the last cell.
    std::size_t locate(double t) const {
        if (!(t >= left()) || !(t <= right())) throw DomainError("point outside the measure space");
        const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
        const auto idx = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
        return std::min(idx == 0 ? 0 : idx - 1, cells() - 1);
    }

    /// Breakpoint closest to t.
    double snap(double t) const {
        const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
        if (it == breakpoints_.begin()) return *it;
        if (it == breakpoints_.end()) return breakpoints_.back();
        return (t - *(it - 1) <= *it - t) ? *(it - 1) : *it;
    }

    friend bool operator==(const MeasureSpace& a, const MeasureSpace& b) {
        return a.kind_ == b.kind_ && a.breakpoints_ == b.breakpoints_;
    }

private:
    MeasureSpace(SpaceKind kind, std::vector<double> bp, std::vector<double> widths)
        : kind_(kind), breakpoints_(std::move(bp)), widths_(std::move(widths)) {}

    static void require_cells(std::size_t cells) {
        if (cells == 0) throw DomainError("measure space needs at least one cell");
    }

    static void validate_breakpoints(SpaceKind kind, const std::vector<double>& bp) {
        if (bp.size() < 2) throw DomainError("measure space needs at least one cell");
        for (std::size_t i = 0; i < bp.size(); ++i) {
            if (!std::isfinite(bp[i])) throw DomainError("breakpoints must be finite");
            if (i > 0 && !(bp[i] > bp[i - 1])) {
                throw DomainError("breakpoints must be strictly increasing");
            }
        }
        switch (kind) {
            case SpaceKind::unit_interval:
                if (bp.front() != 0.0 || bp.back() != 1.0) {
                    throw DomainError("unit_interval breakpoints must run from 0 to 1");
                }
                break;
            case SpaceKind::half_line:
                if (!(bp.front() > 0.0)) throw DomainError("half_line requires t_min > 0");
                break;
            case SpaceKind::counting:
                if (bp.front() != 0.0 || bp.back() != std::round(bp.back())) {
                    throw DomainError("counting breakpoints must run from 0 to n");
                }
                break;
        }
    }

    SpaceKind kind_;
    std::vector<double> breakpoints_;
    std::vector<double> widths_;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

inline SpacePtr make_space(MeasureSpace space) {
    return std::make_shared<const MeasureSpace>(std::move(space));
}

/// Nonnegative finite values, one per cell of a shared measure space. Immutable.
class StepFunction {
public:
    StepFunction(SpacePtr space, std::vector<double> values)
        : space_(std::move(space)), values_(std::move(values)) {
        if (!space_) throw DomainError("step function needs a measure space");
        if (values_.size() != space_->cells()) {
            throw DomainError("value count " + std::to_string(values_.size()) +
                              " does not match cell count " + std::to_string(space_->cells()));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw DomainError("step function values must be finite");
            if (v < 0.0) throw DomainError("step function values must be nonnegative (pass |x|)");
        }
    }

    StepFunction(const MeasureSpace& space, std::vector<double> values)
        : StepFunction(make_space(space), std::move(values)) {}

    static StepFunction constant(SpacePtr space, double c) {
        const std::size_t n = space->cells();
        return StepFunction(std::move(space), std::vector<double>(n, c));
    }

    /// Indicator of the union of cells whose midpoint lies in [a, b].
    static StepFunction indicator(SpacePtr space, double a, double b) {
        std::vector<double> v(space->cells(), 0.0);
        const auto& bp = space->breakpoints();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double mid = 0.5 * (bp[i] + bp[i + 1]);
            if (mid >= a && mid <= b) v[i] = 1.0;
        }
        return StepFunction(std::move(space), std::move(v));
    }

    const MeasureSpace& space() const noexcept { return *space_; }
    const SpacePtr& space_ptr() const noexcept { return space_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Right-continuous point evaluation.
    double operator()(double t) const { return values_[space_->locate(t)]; }

    double sup() const noexcept {
        return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
    }

    bool is_zero() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
    }

    bool is_nonincreasing() const noexcept {
        return std::is_sorted(values_.rbegin(), values_.rend());
    }

    StepFunction with_values(std::vector<double> values) const {
        return StepFunction(space_, std::move(values));
    }

private:
    SpacePtr space_;
    std::vector<double> values_;
};

/// c * t^alpha * (1 + |log t|)^beta on t > 0.
struct PowerWeight {
    double c = 1.0;
    double alpha = 0.0;
    double beta = 0.0;

    double operator()(double t) const {
        if (t == 0.0) return limit_at_zero();
        double v = c * std::pow(t, alpha);
        if (beta != 0.0) v *= std::pow(1.0 + std::abs(std::log(t)), beta);
        return v;
    }

    double limit_at_zero() const {
        if (alpha > 0.0) return 0.0;
        if (alpha < 0.0) return kInf;
        if (beta > 0.0) return kInf;
        if (beta < 0.0) return 0.0;
        return c;
    }

    PowerWeight pow(double p) const { return {std::pow(c, p), alpha * p, beta * p}; }
    PowerWeight times(const PowerWeight& o) const { return {c * o.c, alpha + o.alpha, beta + o.beta}; }

    /// Integral over [a, b]; closed form when beta == 0, otherwise Gauss-Legendre in log t.
    double integral(double a, double b) const {
        if (!(a >= 0.0) || !(b >= a)) throw DomainError("weight integral needs 0 <= a <= b");
        if (a == b || c == 0.0) return 0.0;
        if (beta == 0.0) {
            const double k = alpha + 1.0;
            if (a == 0.0 && k <= 0.0) throw NumericError("weight not integrable at 0");
            if (k == 0.0) return c * std::log(b / a);
            return c * detail::power_difference(a, b, k) / k;
        }
        if (alpha == -1.0) return c * (log_antiderivative(std::log(b)) - log_antiderivative_at(a));
        if (a == 0.0 && alpha <= -1.0) throw NumericError("weight not integrable at 0");
        if (a > 0.0) return log_quadrature(std::log(a), std::log(b));
        // Sweep chunks towards 0 until their contribution is negligible.
        double total = 0.0;
        double hi = std::log(b);
        for (int chunk = 0; chunk < 4000; ++chunk) {
            const double lo = hi - 4.0;
            const double part = log_quadrature(lo, hi);
            total += part;
            if (part <= 1e-18 * total && hi < -1.0) return total;
            hi = lo;
        }
        throw NumericError("weight integral near 0 did not converge");
    }

    /// Supremum over (a, b].
    double sup_on(double a, double b) const {
        double best = (*this)(b);
        if (a == 0.0) {
            best = std::max(best, limit_at_zero());
        } else {
            best = std::max(best, (*this)(a));
        }
        if (beta != 0.0 && alpha != 0.0) {
            const double la = a > 0.0 ? std::log(a) : -kInf;
            const double lb = std::log(b);
            for (double s : {-beta / alpha - 1.0, 1.0 - beta / alpha, 0.0}) {
                if (s > la && s < lb) best = std::max(best, (*this)(std::exp(s)));
            }
        } else if (beta != 0.0 && a < 1.0 && b > 1.0) {
            best = std::max(best, (*this)(1.0));
        }
        return best;
    }

private:
    // int_0^s (1 + |u|)^beta du
    double log_antiderivative(double s) const {
        const double sg = s < 0.0 ? -1.0 : 1.0;
        if (beta == -1.0) return sg * std::log1p(std::abs(s));
        return sg * (std::pow(1.0 + std::abs(s), beta + 1.0) - 1.0) / (beta + 1.0);
    }

    double log_antiderivative_at(double a) const {
        if (a > 0.0) return log_antiderivative(std::log(a));
        if (beta < -1.0) return 1.0 / (beta + 1.0);
        throw NumericError("weight not integrable at 0");
    }

    double log_quadrature(double lo, double hi) const {
        using boost::math::quadrature::gauss;
        double total = 0.0;
        const auto integrand = [this](double s) {
            return c * std::exp((alpha + 1.0) * s) * std::pow(1.0 + std::abs(s), beta);
        };
        // Split at the kink s = 0 and into pieces of length <= 0.5.
        std::vector<double> cuts{lo};
        if (lo < 0.0 && hi > 0.0) cuts.push_back(0.0);
        cuts.push_back(hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double len = cuts[k + 1] - cuts[k];
            const auto pieces = static_cast<int>(std::ceil(len / 0.5));
            for (int j = 0; j < pieces; ++j) {
                const double s0 = cuts[k] + len * j / pieces;
                const double s1 = cuts[k] + len * (j + 1) / pieces;
                total += gauss<double, 20>::integrate(integrand, s0, s1);
            }
        }
        return total;
    }
};

/// Decreasing rearrangement in measure coordinates: cell k is (ends[k-1], ends[k]] starting at 0.
struct Profile {
    std::vector<double> values;
    std::vector<double> widths;
    std::vector<double> ends;

    double total_measure() const { return ends.empty() ? 0.0 : ends.back(); }
    double start(std::size_t k) const { return k == 0 ? 0.0 : ends[k - 1]; }
};

/// m({t : x(t) > lambda}), independent of cell order.
inline double distribution(const StepFunction& x, double lambda) {
    std::vector<double> widths;
    const auto& w = x.space().widths();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > lambda) widths.push_back(w[i]);
    }
    return detail::canonical_sum(std::move(widths));
}

/// Exact decreasing rearrangement laid from the left endpoint; non-increasing input is returned as is.
inline StepFunction rearrange(const StepFunction& x) {
    if (x.is_nonincreasing()) return x;
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
    std::vector<double> widths(x.size());
    std::vector<double> values(x.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        widths[k] = x.space().width(order[k]);
        values[k] = x[order[k]];
    }
    const auto& s = x.space();
    return StepFunction(make_space(MeasureSpace::from_widths(s.kind(), s.left(), s.right(),
                                                             std::move(widths))),
                        std::move(values));
}

inline Profile decreasing_profile(const StepFunction& x) {
    const StepFunction r = rearrange(x);
    Profile p;
    p.values = r.values();
    p.widths = r.space().widths();
    p.ends.resize(p.widths.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < p.widths.size(); ++k) {
        acc += p.widths[k];
        p.ends[k] = acc;
    }
    return p;
}

/// (1/t) * integral_0^t x*(s) ds for t in measure coordinates; x* vanishes past the total measure.
inline double double_star(const Profile& p, double t) {
    if (!(t > 0.0)) throw DomainError("double_star needs t > 0");
    double integral = 0.0;
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        const double a = p.start(k);
        if (t <= a) break;
        integral += p.values[k] * (std::min(t, p.ends[k]) - a);
    }
    return integral / t;
}

inline double double_star(const StepFunction& x, double t) {
    if (!(t > 0.0) || t > x.space().right()) {
        throw DomainError("double_star needs 0 < t <= right endpoint");
    }
    return double_star(decreasing_profile(x), t);
}

/// D_s x(t) = x(t/s) restricted to the space, on the union of original and scaled breakpoints.
inline StepFunction dilate(const StepFunction& x, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("dilation factor must be positive");
    if (s == 1.0) return x;
    const auto& sp = x.space();
    const auto& bp = sp.breakpoints();
    std::vector<double> merged(bp);
    for (double b : bp) {
        const double scaled = b * s;
        if (scaled > sp.left() && scaled < sp.right()) merged.push_back(scaled);
    }
    std::sort(merged.begin(), merged.end());
    std::vector<double> grid{merged.front()};
    for (std::size_t i = 1; i < merged.size(); ++i) {
        const double tol = 1e-13 * std::max(std::abs(merged[i]), std::abs(grid.back()));
        if (merged[i] - grid.back() > tol) {
            grid.push_back(merged[i]);
        } else if (i + 1 == merged.size()) {
            grid.back() = merged[i];
        }
    }
    grid.back() = sp.right();
    grid.front() = sp.left();
    std::vector<double> values(grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double src = 0.5 * (grid[i] + grid[i + 1]) / s;
        values[i] = (src >= sp.left() && src < sp.right()) ? x(src) : 0.0;
    }
    return StepFunction(make_space(MeasureSpace::from_breakpoints(sp.kind(), std::move(grid))),
                        std::move(values));
}

/// Sum of value * width, independent of cell order.
inline double integrate(const StepFunction& x) {
    std::vector<double> terms(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) terms[i] = x[i] * x.space().width(i);
    return detail::canonical_sum(std::move(terms));
}

/// Sum of value * (integral of w over the cell), in space coordinates.
inline double integrate_against(const StepFunction& x, const PowerWeight& w) {
    const auto& bp = x.space().breakpoints();
    std::vector<double> terms;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) continue;
        terms.push_back(x[i] * w.integral(bp[i], bp[i + 1]));
    }
    return detail::canonical_sum(std::move(terms));
}

inline void require_same_grid(const StepFunction& a, const StepFunction& b) {
    if (a.space_ptr() != b.space_ptr() && !(a.space() == b.space())) {
        throw DomainError("step functions live on different grids");
    }
}

inline StepFunction multiply(const StepFunction& a, const StepFunction& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
    return a.with_values(std::move(v));
}

inline StepFunction add(const StepFunction& a, const StepFunction& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return a.with_values(std::move(v));
}

inline StepFunction scale(const StepFunction& a, double c) {
    if (!(c >= 0.0)) throw DomainError("scale factor must be nonnegative");
    std::vector<double> v(a.values());
    for (double& e : v) e *= c;
    return a.with_values(std::move(v));
}

/// Pointwise |x|^p with 0^p = 0.
inline StepFunction power(const StepFunction& a, double p) {
    std::vector<double> v(a.values());
    for (double& e : v) e = e == 0.0 ? 0.0 : std::pow(e, p);
    return a.with_values(std::move(v));
}

/// Pointwise equality as functions, comparing on the common refinement of both grids.
inline bool equal_as_functions(const StepFunction& a, const StepFunction& b, double tol = 0.0) {
    if (a.space().left() != b.space().left() || a.space().right() != b.space().right()) return false;
    std::vector<double> pts(a.space().breakpoints());
    pts.insert(pts.end(), b.space().breakpoints().begin(), b.space().breakpoints().end());
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i + 1] - pts[i] <= 1e-12 * std::max(1.0, std::abs(pts[i]))) continue;
        const double mid = 0.5 * (pts[i] + pts[i + 1]);
        if (std::abs(a(mid) - b(mid)) > tol * std::max(1.0, std::abs(a(mid)))) return false;
    }
    return true;
}

}  // namespace symspace
