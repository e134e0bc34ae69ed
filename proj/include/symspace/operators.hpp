#pragma once

// Hardy operators H, H* on step functions (exact piecewise closed forms), operator-norm bounds,
// and dilation, Simonenko and Boyd indices.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symspace/error.hpp"
#include "symspace/grid.hpp"
#include "symspace/numeric.hpp"
#include "symspace/quasi_concave.hpp"
#include "symspace/spaces.hpp"

namespace symspace {

/// Piecewise a + b/t + c log t on cells laid from 0 (measure coordinates).
class PiecewiseSmoothFn {
public:
    struct Piece {
        double a = 0.0;
        double b = 0.0;
        double c = 0.0;
    };

    PiecewiseSmoothFn(std::vector<double> breakpoints, std::vector<Piece> pieces)
        : bp_(std::move(breakpoints)), pieces_(std::move(pieces)) {
        if (bp_.size() != pieces_.size() + 1) throw PreconditionError("one piece per cell required");
    }

    const std::vector<double>& breakpoints() const noexcept { return bp_; }
    const std::vector<Piece>& pieces() const noexcept { return pieces_; }

    std::size_t cell_of(double t) const {
        if (!(t >= bp_.front()) || !(t <= bp_.back())) throw DomainError("point outside the function's domain");
        const auto it = std::upper_bound(bp_.begin(), bp_.end(), t);
        std::size_t k = static_cast<std::size_t>(std::distance(bp_.begin(), it));
        k = k == 0 ? 0 : k - 1;
        return std::min(k, pieces_.size() - 1);
    }

    double piece_value(std::size_t k, double t) const {
        const auto& p = pieces_[k];
        double v = p.a;
        if (p.b != 0.0) v += p.b / t;
        if (p.c != 0.0) v += p.c * std::log(t);
        return v;
    }

    double operator()(double t) const { return piece_value(cell_of(t), t); }

    /// Integral over [s, e] inside cell k.
    double piece_integral(std::size_t k, double s, double e) const {
        const auto& p = pieces_[k];
        double v = p.a * (e - s);
        if (p.b != 0.0) v += p.b * (std::log(e) - std::log(s));
        if (p.c != 0.0) {
            const auto ulogu = [](double u) { return u == 0.0 ? 0.0 : u * std::log(u) - u; };
            v += p.c * (ulogu(e) - ulogu(s));
        }
        return v;
    }

private:
    std::vector<double> bp_;
    std::vector<Piece> pieces_;
};

namespace detail {

inline std::vector<double> measure_breakpoints(const MeasureSpace& s) {
    std::vector<double> bp(s.cells() + 1, 0.0);
    for (std::size_t i = 0; i < s.cells(); ++i) bp[i + 1] = bp[i] + s.width(i);
    return bp;
}

}  // namespace detail

/// Hx(t) = (1/t) integral_0^t x; on cell k it is (S_k - v_k s_k)/t + v_k.
inline PiecewiseSmoothFn hardy(const StepFunction& x) {
    const auto bp = detail::measure_breakpoints(x.space());
    std::vector<PiecewiseSmoothFn::Piece> pieces(x.size());
    double cumulative = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        pieces[k] = {x[k], cumulative - x[k] * bp[k], 0.0};
        cumulative += x[k] * x.space().width(k);
    }
    return PiecewiseSmoothFn(bp, std::move(pieces));
}

/// H*x(t) = integral_t^l x(s)/s ds; on cell k it is R_k + v_k (log e_k - log t).
inline PiecewiseSmoothFn hardy_dual(const StepFunction& x) {
    const auto bp = detail::measure_breakpoints(x.space());
    std::vector<PiecewiseSmoothFn::Piece> pieces(x.size());
    double tail = 0.0;
    for (std::size_t k = x.size(); k-- > 0;) {
        const double e = bp[k + 1];
        pieces[k] = {tail + x[k] * std::log(e), 0.0, -x[k]};
        if (x[k] != 0.0) {
            if (bp[k] == 0.0) {
                tail = kInf;
            } else {
                tail += x[k] * (std::log(e) - std::log(bp[k]));
            }
        }
    }
    return PiecewiseSmoothFn(bp, std::move(pieces));
}

/// max over `samples` points of |H H* x - H x - H* x|; H H* x is integrated piece by piece.
inline double hardy_identity_residual(const StepFunction& x, int samples = 256) {
    if (x.is_zero()) return 0.0;
    const auto hx = hardy(x);
    const auto hs = hardy_dual(x);
    const auto& bp = hs.breakpoints();
    std::vector<double> prefix(bp.size(), 0.0);
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) prefix[k + 1] = prefix[k] + hs.piece_integral(k, bp[k], bp[k + 1]);
    double worst = 0.0;
    const double lo = std::log(bp[1] * 0.5), hi = std::log(bp.back());
    for (int i = 0; i < samples; ++i) {
        const double t = std::exp(lo + (hi - lo) * (samples == 1 ? 1.0 : static_cast<double>(i) / (samples - 1)));
        const std::size_t k = hs.cell_of(t);
        const double hhs = (prefix[k] + hs.piece_integral(k, bp[k], t)) / t;
        worst = std::max(worst, std::abs(hhs - (hx(t) + hs(t))));
    }
    return worst;
}

// ---------------------------------------------------------------------------------------------

struct OperatorSpec {
    enum class Kind { hardy, hardy_dual, dilation };
    Kind kind = Kind::hardy;
    double s = 1.0;  // dilation factor

    static OperatorSpec h() { return {Kind::hardy, 1.0}; }
    static OperatorSpec h_dual() { return {Kind::hardy_dual, 1.0}; }
    static OperatorSpec dilation(double s) { return {Kind::dilation, s}; }
};

/// Lower bound from a witness family, upper bound from theory when known (else +inf).
struct OperatorBound {
    double lower = 0.0;
    double upper = kInf;
    std::string upper_source;  // empty when no closed-form bound applies
    std::string witness;       // description of the best test function
};

namespace detail {

/// Step function below a piecewise-monotone f: each cell split in `split`, value the smaller end.
inline StepFunction step_below(const PiecewiseSmoothFn& f, const MeasureSpace& like, int split = 8) {
    const auto& bp = f.breakpoints();
    std::vector<double> widths, values;
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        for (int j = 0; j < split; ++j) {
            const double a = bp[k] + (bp[k + 1] - bp[k]) * j / split;
            const double b = j == split - 1 ? bp[k + 1] : bp[k] + (bp[k + 1] - bp[k]) * (j + 1) / split;
            if (!(b > a)) continue;
            const double fa = a == 0.0 ? f.piece_value(k, b) : f.piece_value(k, a);
            const double v = std::min(fa, f.piece_value(k, b));
            widths.push_back(b - a);
            values.push_back(std::isfinite(v) ? std::max(v, 0.0) : 0.0);
        }
    }
    return StepFunction(make_space(MeasureSpace::from_widths(like.kind(), like.left(), like.right(), widths)), values);
}

inline std::vector<std::pair<std::string, StepFunction>> operator_test_family(const SpacePtr& grid) {
    std::vector<std::pair<std::string, StepFunction>> out;
    const auto& bp = grid->breakpoints();
    const double left = grid->left();
    const std::size_t n = grid->cells();
    const std::size_t stride = std::max<std::size_t>(1, n / 16);
    for (std::size_t k = 1; k <= n; k += stride) {
        std::vector<double> v(n, 0.0);
        std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
        out.emplace_back("indicator[0," + std::to_string(bp[k] - left) + "]", StepFunction(grid, v));
    }
    for (double gamma : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 1.0 / 3.0, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65,
                         2.0 / 3.0, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99}) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(bp[i + 1] - left, -gamma);
        out.emplace_back("power t^-" + std::to_string(gamma), StepFunction(grid, v));
    }
    for (double r : {0.5, 2.0}) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = std::pow(r, r < 1.0 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n));
        }
        out.emplace_back("geometric ratio " + std::to_string(r), StepFunction(grid, v));
    }
    return out;
}

inline std::optional<double> power_exponent(const Space& e) {
    // Returns a with ||chi_[0,t]|| proportional to t^a for the table spaces.
    if (const auto p = e.plain_lp()) return *p == kInf ? 0.0 : 1.0 / *p;
    switch (e.kind()) {
        case Space::Kind::lorentz_lambda:
        case Space::Kind::marcinkiewicz:
        case Space::Kind::marcinkiewicz_star:
            return e.phi().pure_power();
        case Space::Kind::lorentz_lambda_p: return e.phi().pure_power();
        default: return std::nullopt;
    }
}

}  // namespace detail

/// Bounds for ||op||_{E->E} on the given grid.
inline OperatorBound operator_norm(const OperatorSpec& op, const Space& e, const SpacePtr& grid) {
    if (!e.primitive()) throw PreconditionError("operator_norm needs a primitive space");
    OperatorBound out;
    for (const auto& [name, x] : detail::operator_test_family(grid)) {
        const double nx = norm_value(e, x);
        if (!(nx > 0.0) || !std::isfinite(nx)) continue;
        double ny = 0.0;
        try {
            switch (op.kind) {
                case OperatorSpec::Kind::hardy: ny = norm_value(e, detail::step_below(hardy(x), *grid)); break;
                case OperatorSpec::Kind::hardy_dual: ny = norm_value(e, detail::step_below(hardy_dual(x), *grid)); break;
                case OperatorSpec::Kind::dilation: ny = norm_value(e, dilate(x, op.s)); break;
            }
        } catch (const NumericError&) {
            continue;
        }
        if (ny / nx > out.lower) {
            out.lower = ny / nx;
            out.witness = name;
        }
    }
    const auto plain = e.plain_lp();
    switch (op.kind) {
        case OperatorSpec::Kind::dilation: {
            const auto a = detail::power_exponent(e);
            if (a && e.symmetric()) {
                out.upper = std::pow(op.s, *a);
                out.upper_source = "closed form s^a for power-type symmetric spaces";
            } else if (e.symmetric()) {
                out.upper = std::max(1.0, op.s);
                out.upper_source = "generic symmetric bound max(1, s)";
            }
            break;
        }
        case OperatorSpec::Kind::hardy:
            if (plain && *plain > 1.0) {
                out.upper = *plain == kInf ? 1.0 : *plain / (*plain - 1.0);
                out.upper_source = "Hardy inequality p/(p-1)";
            }
            break;
        case OperatorSpec::Kind::hardy_dual:
            if (plain && *plain < kInf) {
                out.upper = *plain;
                out.upper_source = "dual Hardy inequality p";
            }
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------------------------

enum class IndexKind { dilation, boyd, simonenko };
enum class IndexMethod { closed_form, grid_estimate };

inline const char* to_string(IndexKind k) {
    switch (k) {
        case IndexKind::dilation: return "dilation";
        case IndexKind::boyd: return "boyd";
        case IndexKind::simonenko: return "simonenko";
    }
    return "unknown";
}
inline const char* to_string(IndexMethod m) { return m == IndexMethod::closed_form ? "closed_form" : "grid_estimate"; }

struct IndexReport {
    double lower = 0.0;
    double upper = 0.0;
    IndexKind kind = IndexKind::dilation;
    IndexMethod method = IndexMethod::grid_estimate;
    std::pair<double, double> truncation{0.0, 0.0};
    std::pair<double, double> t_used{0.0, 0.0};  // arguments at which the limits were estimated
};

struct IndexOptions {
    double lo = 0x1p-40;
    double hi = 1.0;  // 1 for the unit interval, large for the half-line
    int points = 400;
};

/// m_phi(t) = sup{phi(st)/phi(s) : s, st in [lo, hi]}.
inline double dilation_function(const QuasiConcaveFn& phi, double t, const IndexOptions& o = {}) {
    const double a = std::max(o.lo, o.lo / t), b = std::min(o.hi, o.hi / t);
    if (!(a <= b)) throw DomainError("no admissible s for this t");
    const auto ratio = [&](double ls) {
        const double s = std::exp(ls);
        const double den = phi(s);
        if (!(den > 0.0)) throw DomainError("phi vanishes on the truncated interval");
        return phi(s * t) / den;
    };
    const double la = std::log(a), lb = std::log(b);
    double best = ratio(la);
    int arg = 0;
    for (int i = 1; i < o.points; ++i) {
        const double v = ratio(la + (lb - la) * i / (o.points - 1));
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    if (o.points > 2 && lb > la) {
        const double step = (lb - la) / (o.points - 1);
        const double l0 = std::max(la, la + step * (arg - 1)), l1 = std::min(lb, la + step * (arg + 1));
        best = std::max(best, detail::golden_maximize(ratio, l0, l1, 1e-12, 120).value);
    }
    return best;
}

/// Lower/upper dilation indices, estimated at the extreme admissible t.
inline IndexReport dilation_indices(const QuasiConcaveFn& phi, const IndexOptions& o = {}) {
    IndexReport r;
    r.kind = IndexKind::dilation;
    r.truncation = {o.lo, o.hi};
    const double t_small = o.lo / o.hi, t_big = o.hi / o.lo;
    r.t_used = {t_small, t_big};
    if (const auto a = phi.pure_power()) {
        r.lower = r.upper = *a;
        r.method = IndexMethod::closed_form;
        return r;
    }
    r.lower = std::log(dilation_function(phi, t_small, o)) / std::log(t_small);
    r.upper = std::log(dilation_function(phi, t_big, o)) / std::log(t_big);
    r.method = IndexMethod::grid_estimate;
    return r;
}

/// inf and sup of t phi'(t)/phi(t) over the truncated interval.
inline IndexReport simonenko_indices(const QuasiConcaveFn& phi, const IndexOptions& o = {}) {
    IndexReport r;
    r.kind = IndexKind::simonenko;
    r.truncation = {o.lo, o.hi};
    r.t_used = {o.lo, o.hi};
    if (const auto a = phi.pure_power()) {
        r.lower = r.upper = *a;
        r.method = IndexMethod::closed_form;
        return r;
    }
    const auto elasticity = [&](double ls) {
        const double t = std::exp(ls);
        const double v = phi(t);
        if (!(v > 0.0)) throw DomainError("phi vanishes on the truncated interval");
        return t * phi.derivative(t) / v;
    };
    const double la = std::log(o.lo), lb = std::log(o.hi), step = (lb - la) / (o.points - 1);
    double lo = kInf, hi = -kInf;
    int arg_lo = 0, arg_hi = 0;
    for (int i = 0; i < o.points; ++i) {
        const double e = elasticity(la + step * i);
        if (e < lo) {
            lo = e;
            arg_lo = i;
        }
        if (e > hi) {
            hi = e;
            arg_hi = i;
        }
    }
    // Golden refinement between the neighbours of each extreme sample.
    const auto bracket = [&](int i) {
        return std::pair{std::max(la, la + step * (i - 1)), std::min(lb, la + step * (i + 1))};
    };
    const auto [a0, b0] = bracket(arg_lo);
    r.lower = std::min(lo, detail::golden_minimize(elasticity, a0, b0, 1e-13, 200).value);
    const auto [a1, b1] = bracket(arg_hi);
    r.upper = std::max(hi, detail::golden_maximize(elasticity, a1, b1, 1e-13, 200).value);
    r.method = IndexMethod::grid_estimate;
    return r;
}

/// s <= p <= q <= sigma within slack.
inline bool index_chain_holds(const IndexReport& dilation, const IndexReport& simonenko, double slack = 0.02) {
    return simonenko.lower <= dilation.lower + slack && dilation.lower <= dilation.upper + slack &&
           dilation.upper <= simonenko.upper + slack && simonenko.lower >= -slack;
}

/// Boyd indices: closed form for power-type spaces, else estimated from D_s lower bounds at
/// s = 2^{-k} and 2^{k}.
inline IndexReport boyd_indices(const Space& e, const SpacePtr& grid, int k = 8, bool force_estimate = false) {
    IndexReport r;
    r.kind = IndexKind::boyd;
    r.truncation = {grid->left(), grid->right()};
    const double s_small = std::exp2(-k), s_big = std::exp2(k);
    r.t_used = {s_small, s_big};
    if (e.symmetric() && !force_estimate) {
        if (const auto a = detail::power_exponent(e)) {
            r.lower = r.upper = *a;
            r.method = IndexMethod::closed_form;
            return r;
        }
    }
    r.lower = std::log(operator_norm(OperatorSpec::dilation(s_small), e, grid).lower) / std::log(s_small);
    r.upper = std::log(operator_norm(OperatorSpec::dilation(s_big), e, grid).lower) / std::log(s_big);
    r.method = IndexMethod::grid_estimate;
    return r;
}

}  // namespace symspace
