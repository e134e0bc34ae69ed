#pragma once

// Positive functions of t > 0 built from monomials c t^a (1+|log t|)^b by ratio, product and
// running supremum. Used for fundamental functions, Lorentz/Marcinkiewicz parameters and weights.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symspace/error.hpp"
#include "symspace/grid.hpp"
#include "symspace/numeric.hpp"

namespace symspace {

class QuasiConcaveFn {
public:
    enum class Kind { monomial, ratio, product, running_sup };

    /// t^alpha
    static QuasiConcaveFn power(double alpha, double c = 1.0) { return power_log(alpha, 0.0, c); }

    /// c t^alpha (1 + |log t|)^beta
    static QuasiConcaveFn power_log(double alpha, double beta, double c = 1.0) {
        if (!std::isfinite(alpha) || !std::isfinite(beta) || !(c > 0.0) || !std::isfinite(c)) {
            throw DomainError("power_log needs finite exponents and c > 0");
        }
        auto n = std::make_shared<Node>(Kind::monomial);
        n->mono = PowerWeight{c, alpha, beta};
        return QuasiConcaveFn(std::move(n));
    }

    static QuasiConcaveFn ratio(const QuasiConcaveFn& f, const QuasiConcaveFn& g) {
        return combine(Kind::ratio, f, g);
    }
    static QuasiConcaveFn product(const QuasiConcaveFn& f, const QuasiConcaveFn& g) {
        return combine(Kind::product, f, g);
    }
    /// sup_{0 < s <= t} f(s), sampled on a log grid.
    static QuasiConcaveFn running_sup(const QuasiConcaveFn& f) {
        auto n = std::make_shared<Node>(Kind::running_sup);
        n->children = {f};
        return QuasiConcaveFn(std::move(n));
    }

    Kind kind() const noexcept { return node_->kind; }
    const QuasiConcaveFn& first() const { return node_->children.at(0); }
    const QuasiConcaveFn& second() const { return node_->children.at(1); }

    /// Leaf parameters (monomial nodes only).
    const PowerWeight& leaf() const {
        if (kind() != Kind::monomial) throw DomainError("not a monomial node");
        return node_->mono;
    }

    /// The whole tree as a single monomial, when it reduces to one.
    std::optional<PowerWeight> monomial() const {
        switch (kind()) {
            case Kind::monomial: return node_->mono;
            case Kind::ratio: {
                const auto f = first().monomial(), g = second().monomial();
                if (!f || !g) return std::nullopt;
                return PowerWeight{f->c / g->c, f->alpha - g->alpha, f->beta - g->beta};
            }
            case Kind::product: {
                const auto f = first().monomial(), g = second().monomial();
                if (!f || !g) return std::nullopt;
                return f->times(*g);
            }
            case Kind::running_sup: {
                // A non-decreasing monomial is its own running supremum.
                const auto f = first().monomial();
                if (f && f->beta == 0.0 && f->alpha >= 0.0) return f;
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    /// Exponent when the tree is exactly c t^alpha.
    std::optional<double> pure_power() const {
        const auto m = monomial();
        if (m && m->beta == 0.0) return m->alpha;
        return std::nullopt;
    }

    double operator()(double t) const {
        if (!(t >= 0.0)) throw DomainError("quasi-concave function needs t >= 0");
        if (t == 0.0) return at_zero();
        switch (kind()) {
            case Kind::monomial: return node_->mono(t);
            case Kind::ratio: return first()(t) / second()(t);
            case Kind::product: return first()(t) * second()(t);
            case Kind::running_sup: {
                if (const auto m = monomial()) return (*m)(t);
                // Coarse log grid below t, then a golden refinement around the best sample.
                constexpr int kSamples = 240;
                constexpr double kStep = 0.25;
                double best = first()(t);
                int arg = 0;
                for (int i = 1; i <= kSamples; ++i) {
                    const double v = first()(t * std::exp(-kStep * i));
                    if (v > best) {
                        best = v;
                        arg = i;
                    }
                }
                const double lo = -kStep * (arg + 1), hi = std::min(0.0, -kStep * (arg - 1));
                const auto m = detail::golden_maximize([&](double s) { return first()(t * std::exp(s)); }, lo, hi,
                                                       1e-12, 120);
                return std::max(best, m.value);
            }
        }
        return 0.0;
    }

    /// Limit at 0+.
    double at_zero() const {
        if (const auto m = monomial()) return m->limit_at_zero();
        return (*this)(1e-300);
    }

    bool has_closed_derivative() const {
        switch (kind()) {
            case Kind::monomial: return true;
            case Kind::ratio:
            case Kind::product: return first().has_closed_derivative() && second().has_closed_derivative();
            case Kind::running_sup: return monomial().has_value();
        }
        return false;
    }

    /// d/dt; closed form where available, else central difference with step t * 1e-5.
    double derivative(double t) const {
        if (!(t > 0.0)) throw DomainError("derivative needs t > 0");
        switch (kind()) {
            case Kind::monomial: return monomial_derivative(node_->mono, t);
            case Kind::ratio:
                if (has_closed_derivative()) {
                    const double f = first()(t), g = second()(t);
                    return (first().derivative(t) * g - f * second().derivative(t)) / (g * g);
                }
                break;
            case Kind::product:
                if (has_closed_derivative()) {
                    return first().derivative(t) * second()(t) + first()(t) * second().derivative(t);
                }
                break;
            case Kind::running_sup:
                if (const auto m = monomial()) return monomial_derivative(*m, t);
                break;
        }
        const double h = t * 1e-5;
        return ((*this)(t + h) - (*this)(t - h)) / (2.0 * h);
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(12);
        switch (kind()) {
            case Kind::monomial: {
                const auto& m = node_->mono;
                if (m.c != 1.0) os << m.c << "*";
                os << "t^" << m.alpha;
                if (m.beta != 0.0) os << "*(1+|log t|)^" << m.beta;
                break;
            }
            case Kind::ratio: os << "(" << first().describe() << ")/(" << second().describe() << ")"; break;
            case Kind::product: os << "(" << first().describe() << ")*(" << second().describe() << ")"; break;
            case Kind::running_sup: os << "runsup(" << first().describe() << ")"; break;
        }
        return os.str();
    }

private:
    struct Node {
        explicit Node(Kind k) : kind(k) {}
        Kind kind;
        PowerWeight mono;
        std::vector<QuasiConcaveFn> children;
    };

    explicit QuasiConcaveFn(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static QuasiConcaveFn combine(Kind k, const QuasiConcaveFn& f, const QuasiConcaveFn& g) {
        auto n = std::make_shared<Node>(k);
        n->children = {f, g};
        return QuasiConcaveFn(std::move(n));
    }

    static double monomial_derivative(const PowerWeight& m, double t) {
        const double L = std::log(t);
        const double sg = L > 0.0 ? 1.0 : (L < 0.0 ? -1.0 : 0.0);
        const double base = 1.0 + std::abs(L);
        return m.c * std::pow(t, m.alpha - 1.0) * std::pow(base, m.beta - 1.0) *
               (m.alpha * base + m.beta * sg);
    }

    std::shared_ptr<const Node> node_;
};

/// Sampled quasi-concavity: phi non-decreasing and phi(t)/t non-increasing on the given points.
inline bool is_quasi_concave_sampled(const std::vector<double>& ts, const std::vector<double>& values,
                                     double rel_tol = 1e-9) {
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (values[i] < values[i - 1] * (1.0 - rel_tol)) return false;
        if (values[i] / ts[i] > values[i - 1] / ts[i - 1] * (1.0 + rel_tol)) return false;
    }
    return true;
}

inline bool is_quasi_concave_sampled(const QuasiConcaveFn& phi, double lo, double hi, int points = 200) {
    std::vector<double> ts(points), vs(points);
    for (int i = 0; i < points; ++i) {
        ts[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        vs[i] = phi(ts[i]);
    }
    return is_quasi_concave_sampled(ts, vs);
}

}  // namespace symspace
