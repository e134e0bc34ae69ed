#pragma once

// Space descriptors and the norm engine. Primitive descriptors are evaluated by exact piecewise
// quadrature of the step function (or of its decreasing rearrangement); variational descriptors
// (Calderon, product, multiplier, dual) are delegated to the product engine in product.hpp.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "symspace/error.hpp"
#include "symspace/grid.hpp"
#include "symspace/quasi_concave.hpp"
#include "symspace/young.hpp"

namespace symspace {

enum class NormKind { exact, upper_bound, estimate };

inline const char* to_string(NormKind k) {
    switch (k) {
        case NormKind::exact: return "exact";
        case NormKind::upper_bound: return "upper_bound";
        case NormKind::estimate: return "estimate";
    }
    return "unknown";
}

/// z = x * y with the norms achieved; a certificate that ||z||_{E.F} <= product.
struct FactorizationWitness {
    StepFunction x;
    StepFunction y;
    double norm_x = 0.0;
    double norm_y = 0.0;
    double product = 0.0;
    std::string method;  // closed_form | optimizer | constructive
    bool equalized = false;
    bool within_epsilon = true;  // lozanovskii_factorize only
};

struct NormResult {
    double value = 0.0;
    NormKind kind = NormKind::exact;
    std::optional<FactorizationWitness> witness;
    std::vector<std::string> notes;
    std::optional<std::pair<double, double>> truncation;
    bool infinite = false;  // the function is not in the space (multiplier cap exceeded, divergent modular)
};

enum class SymMode { star, doublestar };

inline const char* to_string(SymMode m) { return m == SymMode::star ? "star" : "doublestar"; }

class Space {
public:
    enum class Kind {
        lp,
        lorentz_lambda,
        lorentz_lambda_p,
        marcinkiewicz,
        marcinkiewicz_star,
        linf_weighted,
        orlicz,
        calderon,
        product,
        multiplier,
        dual,
        convexification,
        symmetrization
    };

    /// ||x w||_{L^p}, p in (0, inf]; p < 1 gives a quasi-norm (appears as products of L^p spaces).
    static Space lp(double p, std::optional<QuasiConcaveFn> weight = std::nullopt) {
        if (!(p > 0.0)) throw DomainError("L^p needs p > 0");
        auto n = make(Kind::lp);
        n->p = p;
        n->phi = std::move(weight);
        return Space(std::move(n));
    }

    /// integral of x* d phi, including phi(0+) ||x||_inf.
    static Space lorentz_lambda(QuasiConcaveFn phi) {
        auto n = make(Kind::lorentz_lambda);
        n->phi = std::move(phi);
        return Space(std::move(n));
    }

    /// (integral of (phi x*)^p dt/t)^{1/p}
    static Space lorentz_lambda_p(QuasiConcaveFn phi, double p) {
        if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("Lambda_{phi,p} needs 0 < p < inf");
        auto n = make(Kind::lorentz_lambda_p);
        n->phi = std::move(phi);
        n->p = p;
        return Space(std::move(n));
    }

    /// Classical L^{p,q} as Lambda_{t^{1/p}, q}.
    static Space lorentz_pq(double p, double q) {
        if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("L^{p,q} needs 0 < p < inf");
        Space s = lorentz_lambda_p(QuasiConcaveFn::power(1.0 / p), q);
        s.node_mut().preset = "lorentz_pq";
        s.node_mut().preset_p = p;
        return s;
    }

    /// L^{p,1} with norm (1/p) integral t^{1/p-1} x*(t) dt, which equals Lambda_{t^{1/p}}.
    static Space lorentz_p1(double p) {
        if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("L^{p,1} preset needs 1 <= p < inf");
        Space s = lorentz_lambda(QuasiConcaveFn::power(1.0 / p));
        s.node_mut().preset = "lorentz_p1";
        s.node_mut().preset_p = p;
        return s;
    }

    /// sup phi(t) x**(t)
    static Space marcinkiewicz(QuasiConcaveFn phi) {
        auto n = make(Kind::marcinkiewicz);
        n->phi = std::move(phi);
        return Space(std::move(n));
    }

    /// sup phi(t) x*(t)
    static Space marcinkiewicz_star(QuasiConcaveFn phi) {
        auto n = make(Kind::marcinkiewicz_star);
        n->phi = std::move(phi);
        return Space(std::move(n));
    }

    /// ess sup phi(t) |x(t)|
    static Space linf_weighted(QuasiConcaveFn phi) {
        auto n = make(Kind::linf_weighted);
        n->phi = std::move(phi);
        return Space(std::move(n));
    }

    /// Calderon-Lozanovskii space E_phi with the Luxemburg norm.
    static Space orlicz(const Space& base, YoungFunction phi) {
        auto n = make(Kind::orlicz);
        n->children = {base};
        n->young = std::move(phi);
        return Space(std::move(n));
    }

    static Space calderon(const Space& e, const Space& f, double theta) {
        if (!(theta > 0.0 && theta < 1.0)) throw DomainError("Calderon space needs 0 < theta < 1");
        auto n = make(Kind::calderon);
        n->children = {e, f};
        n->theta = theta;
        return Space(std::move(n));
    }

    static Space product(const Space& e, const Space& f) { return binary(Kind::product, e, f); }
    static Space multiplier(const Space& e, const Space& f) { return binary(Kind::multiplier, e, f); }

    static Space dual(const Space& e) {
        auto n = make(Kind::dual);
        n->children = {e};
        return Space(std::move(n));
    }

    /// ||x||_{E^(p)} = || |x|^p ||_E^{1/p}
    static Space convexification(const Space& e, double p) {
        if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("convexification needs p > 0");
        auto n = make(Kind::convexification);
        n->children = {e};
        n->p = p;
        return Space(std::move(n));
    }

    static Space symmetrization(const Space& e, SymMode mode) {
        auto n = make(Kind::symmetrization);
        n->children = {e};
        n->mode = mode;
        return Space(std::move(n));
    }

    Kind kind() const noexcept { return node_->kind; }
    double p() const noexcept { return node_->p; }
    double theta() const noexcept { return node_->theta; }
    SymMode mode() const noexcept { return node_->mode; }
    const std::optional<QuasiConcaveFn>& fn() const noexcept { return node_->phi; }
    const QuasiConcaveFn& phi() const {
        if (!node_->phi) throw DomainError("descriptor has no quasi-concave parameter");
        return *node_->phi;
    }
    const YoungFunction& young() const {
        if (!node_->young) throw DomainError("descriptor has no Young function");
        return *node_->young;
    }
    const Space& child(std::size_t i = 0) const { return node_->children.at(i); }
    const std::string& preset() const noexcept { return node_->preset; }
    double preset_p() const noexcept { return node_->preset_p; }

    /// Evaluated by closed-form quadrature rather than by optimization.
    bool primitive() const {
        switch (kind()) {
            case Kind::lp:
            case Kind::lorentz_lambda:
            case Kind::lorentz_lambda_p:
            case Kind::marcinkiewicz:
            case Kind::marcinkiewicz_star:
            case Kind::linf_weighted: return true;
            case Kind::orlicz:
            case Kind::convexification:
            case Kind::symmetrization: return child().primitive();
            default: return false;
        }
    }

    /// The norm depends only on the decreasing rearrangement.
    bool symmetric() const {
        switch (kind()) {
            case Kind::lp:
            case Kind::linf_weighted: return !fn() || is_constant(*fn());
            case Kind::lorentz_lambda:
            case Kind::lorentz_lambda_p:
            case Kind::marcinkiewicz:
            case Kind::marcinkiewicz_star:
            case Kind::symmetrization: return true;
            case Kind::orlicz:
            case Kind::convexification:
            case Kind::dual: return child().symmetric();
            case Kind::calderon:
            case Kind::product:
            case Kind::multiplier: return child(0).symmetric() && child(1).symmetric();
        }
        return false;
    }

    /// Unweighted L^p exponent, if this is one.
    std::optional<double> plain_lp() const {
        if (kind() == Kind::lp && (!fn() || is_unit(*fn()))) return p();
        return std::nullopt;
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(12);
        const auto& n = *node_;
        if (n.preset == "lorentz_p1") {
            os << "L^{" << n.preset_p << ",1}";
            return os.str();
        }
        if (n.preset == "lorentz_pq") {
            os << "L^{" << n.preset_p << "," << n.p << "}";
            return os.str();
        }
        switch (n.kind) {
            case Kind::lp:
                os << "L^" << n.p;
                if (n.phi) os << "(" << n.phi->describe() << ")";
                break;
            case Kind::lorentz_lambda: os << "Lambda[" << n.phi->describe() << "]"; break;
            case Kind::lorentz_lambda_p: os << "Lambda[" << n.phi->describe() << "," << n.p << "]"; break;
            case Kind::marcinkiewicz: os << "M[" << n.phi->describe() << "]"; break;
            case Kind::marcinkiewicz_star: os << "M*[" << n.phi->describe() << "]"; break;
            case Kind::linf_weighted: os << "Linf(" << n.phi->describe() << ")"; break;
            case Kind::orlicz: os << "(" << child().describe() << ")_{" << n.young->describe() << "}"; break;
            case Kind::calderon:
                os << "(" << child(0).describe() << ")^{" << 1.0 - n.theta << "}(" << child(1).describe()
                   << ")^{" << n.theta << "}";
                break;
            case Kind::product: os << "(" << child(0).describe() << " . " << child(1).describe() << ")"; break;
            case Kind::multiplier: os << "M(" << child(0).describe() << ", " << child(1).describe() << ")"; break;
            case Kind::dual: os << "(" << child().describe() << ")'"; break;
            case Kind::convexification: os << "(" << child().describe() << ")^(" << n.p << ")"; break;
            case Kind::symmetrization:
                os << "(" << child().describe() << ")^(" << (n.mode == SymMode::star ? "*" : "**") << ")";
                break;
        }
        return os.str();
    }

private:
    struct Node {
        explicit Node(Kind k) : kind(k) {}
        Kind kind;
        double p = 1.0;
        double theta = 0.5;
        SymMode mode = SymMode::star;
        std::optional<QuasiConcaveFn> phi;
        std::optional<YoungFunction> young;
        std::vector<Space> children;
        std::string preset;
        double preset_p = 0.0;
    };

    explicit Space(std::shared_ptr<Node> n) : node_(std::move(n)) {}
    static std::shared_ptr<Node> make(Kind k) { return std::make_shared<Node>(k); }
    Node& node_mut() { return *node_; }

    static Space binary(Kind k, const Space& e, const Space& f) {
        auto n = make(k);
        n->children = {e, f};
        return Space(std::move(n));
    }

    static bool is_constant(const QuasiConcaveFn& w) {
        const auto m = w.monomial();
        return m && m->alpha == 0.0 && m->beta == 0.0;
    }
    static bool is_unit(const QuasiConcaveFn& w) {
        const auto m = w.monomial();
        return m && m->alpha == 0.0 && m->beta == 0.0 && m->c == 1.0;
    }

    // Shared and never mutated after a factory returns.
    std::shared_ptr<Node> node_;
};

inline const char* to_string(Space::Kind k) {
    switch (k) {
        case Space::Kind::lp: return "lp";
        case Space::Kind::lorentz_lambda: return "lorentz_lambda";
        case Space::Kind::lorentz_lambda_p: return "lorentz_lambda_p";
        case Space::Kind::marcinkiewicz: return "marcinkiewicz";
        case Space::Kind::marcinkiewicz_star: return "marcinkiewicz_star";
        case Space::Kind::linf_weighted: return "linf_weighted";
        case Space::Kind::orlicz: return "orlicz";
        case Space::Kind::calderon: return "calderon";
        case Space::Kind::product: return "product";
        case Space::Kind::multiplier: return "multiplier";
        case Space::Kind::dual: return "dual";
        case Space::Kind::convexification: return "convexification";
        case Space::Kind::symmetrization: return "symmetrization";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------------------------

inline NormResult norm(const Space& space, const StepFunction& x);

namespace detail {

// Defined in product.hpp.
inline NormResult variational_norm(const Space& space, const StepFunction& x);

/// A step function as raw cells; bp[0] is the left endpoint (0 for rearranged profiles).
struct Cells {
    std::vector<double> bp;
    std::vector<double> values;
    std::vector<double> widths;

    std::size_t size() const { return values.size(); }
};

inline Cells cells_of(const StepFunction& x) {
    return Cells{x.space().breakpoints(), x.values(), x.space().widths()};
}

/// Decreasing rearrangement laid from 0.
inline Cells profile_of(const Cells& c) {
    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!std::is_sorted(c.values.rbegin(), c.values.rend()) || c.bp.front() != 0.0) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return c.values[a] > c.values[b]; });
    }
    Cells p;
    p.values.resize(c.size());
    p.widths.resize(c.size());
    p.bp.resize(c.size() + 1);
    p.bp[0] = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        p.values[k] = c.values[order[k]];
        p.widths[k] = c.widths[order[k]];
        p.bp[k + 1] = p.bp[k] + p.widths[k];
    }
    return p;
}

/// x** sampled as a step function: each profile cell split in 8, value at each piece's left end
/// (x** is non-increasing, so this dominates it pointwise).
inline Cells double_star_cells(const Cells& profile) {
    Cells out;
    out.bp.push_back(0.0);
    double cumulative = 0.0;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        const double s = profile.bp[k], e = profile.bp[k + 1], v = profile.values[k];
        for (int j = 0; j < 8; ++j) {
            const double a = s + (e - s) * j / 8.0;
            const double b = j == 7 ? e : s + (e - s) * (j + 1) / 8.0;
            const double val = a == 0.0 ? v : (cumulative + v * (a - s)) / a;
            out.values.push_back(val);
            out.widths.push_back(b - a);
            out.bp.push_back(b);
        }
        cumulative += v * (e - s);
    }
    return out;
}

/// Integral of f over [a, b], Gauss-Legendre in log t; a = 0 is handled by sweeping towards 0.
template <class F>
double integrate_fn(const F& f, double a, double b) {
    using boost::math::quadrature::gauss;
    if (b <= a) return 0.0;
    const auto piece = [&](double lo, double hi) {
        double total = 0.0;
        std::vector<double> cuts{lo};
        if (lo < 0.0 && hi > 0.0) cuts.push_back(0.0);
        cuts.push_back(hi);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double len = cuts[k + 1] - cuts[k];
            const int pieces = std::max(1, static_cast<int>(std::ceil(len / 0.5)));
            for (int j = 0; j < pieces; ++j) {
                const double s0 = cuts[k] + len * j / pieces, s1 = cuts[k] + len * (j + 1) / pieces;
                total += gauss<double, 20>::integrate(
                    [&](double s) { return f(std::exp(s)) * std::exp(s); }, s0, s1);
            }
        }
        return total;
    };
    if (a > 0.0) return piece(std::log(a), std::log(b));
    double total = 0.0, hi = std::log(b);
    for (int chunk = 0; chunk < 4000; ++chunk) {
        const double part = piece(hi - 4.0, hi);
        total += part;
        if (!std::isfinite(total)) break;
        if (part <= 1e-18 * total && hi < -1.0) return total;
        hi -= 4.0;
    }
    throw NumericError("weight integral near 0 did not converge");
}

/// Supremum of a positive function over (a, b]: endpoints plus 8 interior samples.
template <class F>
double sampled_sup(const F& f, double a, double b, double at_zero) {
    double best = a == 0.0 ? at_zero : f(a);
    for (int j = 1; j <= 9; ++j) best = std::max(best, f(a + (b - a) * j / 9.0));
    return best;
}

inline double phi_sup_on(const QuasiConcaveFn& phi, double a, double b, bool& estimated) {
    if (const auto m = phi.monomial()) return m->sup_on(a, b);
    estimated = true;
    return sampled_sup(phi, a, b, phi.at_zero());
}

inline double phi_integral(const QuasiConcaveFn& phi, double power, double extra_alpha, double a,
                           double b, bool& estimated) {
    if (const auto m = phi.monomial()) {
        PowerWeight w = m->pow(power);
        w.alpha += extra_alpha;
        return w.integral(a, b);
    }
    estimated = true;
    return integrate_fn([&](double t) { return std::pow(phi(t), power) * std::pow(t, extra_alpha); },
                        a, b);
}

// (sum v^p w)^{1/p} with scaling against overflow.
inline double plain_lp_value(const Cells& c, double p) {
    double mx = 0.0;
    for (double v : c.values) mx = std::max(mx, v);
    if (mx == 0.0) return 0.0;
    if (p == kInf) return mx;
    std::vector<double> terms;
    terms.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.values[i] > 0.0) terms.push_back(std::pow(c.values[i] / mx, p) * c.widths[i]);
    }
    return mx * std::pow(canonical_sum(std::move(terms)), 1.0 / p);
}

inline double lp_value(const Space& s, const Cells& c, bool& estimated) {
    if (!s.fn()) return plain_lp_value(c, s.p());
    const QuasiConcaveFn& w = *s.fn();
    if (s.p() == kInf) {
        double best = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c.values[i] > 0.0) best = std::max(best, c.values[i] * phi_sup_on(w, c.bp[i], c.bp[i + 1], estimated));
        }
        return best;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.values[i] == 0.0) continue;
        acc += std::pow(c.values[i], s.p()) * phi_integral(w, s.p(), 0.0, c.bp[i], c.bp[i + 1], estimated);
    }
    return std::pow(acc, 1.0 / s.p());
}

inline double lorentz_value(const QuasiConcaveFn& phi, const Cells& prof) {
    if (prof.size() == 0) return 0.0;
    const double at0 = phi.at_zero();
    double acc = prof.values[0] > 0.0 ? at0 * prof.values[0] : 0.0;
    double prev = at0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
        const double next = phi(prof.bp[k + 1]);
        if (prof.values[k] > 0.0) acc += prof.values[k] * (next - prev);
        prev = next;
    }
    return acc;
}

inline double lorentz_p_value(const QuasiConcaveFn& phi, double p, const Cells& prof, bool& estimated) {
    double acc = 0.0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
        if (prof.values[k] == 0.0) continue;
        acc += std::pow(prof.values[k], p) * phi_integral(phi, p, -1.0, prof.bp[k], prof.bp[k + 1], estimated);
    }
    return std::pow(acc, 1.0 / p);
}

// sup_t phi(t) x**(t); on a profile cell x** = (A + v t)/t. For pure powers the cell maximum
// sits at an endpoint (the only stationary point is a minimum); otherwise 8 interior samples.
inline double marcinkiewicz_value(const QuasiConcaveFn& phi, const Cells& prof, bool& estimated) {
    const bool power = phi.pure_power().has_value();
    if (!power) estimated = true;
    double best = 0.0;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
        const double s = prof.bp[k], e = prof.bp[k + 1], v = prof.values[k];
        const double A = cumulative - v * s;
        const auto g = [&](double t) { return phi(t) * (A + v * t) / t; };
        best = std::max(best, g(e));
        best = std::max(best, s == 0.0 ? phi.at_zero() * v : g(s));
        if (!power) {
            for (int j = 1; j <= 8; ++j) best = std::max(best, g(s + (e - s) * j / 9.0));
        }
        cumulative += v * (e - s);
    }
    return best;
}

inline double marcinkiewicz_star_value(const QuasiConcaveFn& phi, const Cells& prof, bool& estimated) {
    double best = 0.0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
        if (prof.values[k] == 0.0) continue;
        best = std::max(best, prof.values[k] * phi_sup_on(phi, prof.bp[k], prof.bp[k + 1], estimated));
    }
    return best;
}

/// Norm of a primitive, non-Orlicz descriptor on raw cells.
inline double primitive_value(const Space& s, const Cells& c, bool& estimated);

inline Cells apply_young(const YoungFunction& phi, const Cells& c, double scale, bool& infinite) {
    Cells out = c;
    infinite = false;
    for (double& v : out.values) {
        v = v == 0.0 ? 0.0 : phi(v / scale);
        if (!std::isfinite(v)) {
            infinite = true;
            return out;
        }
    }
    return out;
}

inline double modular_value(const Space& base, const YoungFunction& phi, const Cells& c, double scale,
                            bool& estimated) {
    bool infinite = false;
    const Cells y = apply_young(phi, c, scale, infinite);
    if (infinite) return kInf;
    try {
        return primitive_value(base, y, estimated);
    } catch (const NumericError&) {
        return kInf;
    }
}

/// Luxemburg norm by bisection in log(lambda) to relative 1e-10; returns the feasible end.
inline double luxemburg_value(const Space& base, const YoungFunction& phi, const Cells& c, bool& estimated) {
    double mx = 0.0;
    for (double v : c.values) mx = std::max(mx, v);
    if (mx == 0.0) return 0.0;
    if (phi.kind() == YoungFunction::Kind::power) {
        // Homogeneous: I(x/lambda) = c lambda^{-p} || x^p ||_base.
        Cells xp = c;
        for (double& v : xp.values) v = v == 0.0 ? 0.0 : std::pow(v / mx, phi.p());
        return mx * std::pow(phi.c() * primitive_value(base, xp, estimated), 1.0 / phi.p());
    }
    const auto I = [&](double lambda) { return modular_value(base, phi, c, lambda, estimated); };
    double hi = mx;
    int guard = 0;
    while (I(hi) > 1.0) {
        hi *= 2.0;
        if (++guard > 2000 || !std::isfinite(hi)) throw NumericError("Luxemburg norm diverges");
    }
    double lo = hi;
    guard = 0;
    do {
        lo *= 0.5;
        if (++guard > 2000 || lo == 0.0) return hi;
    } while (I(lo) <= 1.0);
    while (hi / lo - 1.0 > 1e-10) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) break;
        (I(mid) <= 1.0 ? hi : lo) = mid;
    }
    return hi;
}

inline double primitive_value(const Space& s, const Cells& c, bool& estimated) {
    switch (s.kind()) {
        case Space::Kind::lp:
            return s.symmetric() && s.fn() ? lp_value(s, profile_of(c), estimated) : lp_value(s, c, estimated);
        case Space::Kind::lorentz_lambda: return lorentz_value(s.phi(), profile_of(c));
        case Space::Kind::lorentz_lambda_p: return lorentz_p_value(s.phi(), s.p(), profile_of(c), estimated);
        case Space::Kind::marcinkiewicz: return marcinkiewicz_value(s.phi(), profile_of(c), estimated);
        case Space::Kind::marcinkiewicz_star: return marcinkiewicz_star_value(s.phi(), profile_of(c), estimated);
        case Space::Kind::linf_weighted: {
            double best = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (c.values[i] > 0.0) {
                    best = std::max(best, c.values[i] * phi_sup_on(s.phi(), c.bp[i], c.bp[i + 1], estimated));
                }
            }
            return best;
        }
        case Space::Kind::orlicz: return luxemburg_value(s.child(), s.young(), c, estimated);
        case Space::Kind::convexification: {
            Cells xp = c;
            for (double& v : xp.values) v = v == 0.0 ? 0.0 : std::pow(v, s.p());
            return std::pow(primitive_value(s.child(), xp, estimated), 1.0 / s.p());
        }
        case Space::Kind::symmetrization: {
            const Cells prof = profile_of(c);
            if (s.mode() == SymMode::star) return primitive_value(s.child(), prof, estimated);
            const Space& base = s.child();
            if (base.kind() == Space::Kind::linf_weighted) return marcinkiewicz_value(base.phi(), prof, estimated);
            estimated = true;
            return primitive_value(base, double_star_cells(prof), estimated);
        }
        default: throw DomainError("descriptor is not primitive: " + s.describe());
    }
}

inline void attach_truncation(NormResult& r, const StepFunction& x) {
    if (x.space().truncated()) r.truncation = x.space().truncation();
}

}  // namespace detail

/// ||x||_E. Primitive descriptors are exact (or estimate when a sampled/quadrature path was
/// needed); variational descriptors return upper_bound or estimate from the product engine.
inline NormResult norm(const Space& space, const StepFunction& x) {
    NormResult r;
    detail::attach_truncation(r, x);
    if (space.primitive()) {
        bool estimated = false;
        r.value = detail::primitive_value(space, detail::cells_of(x), estimated);
        r.kind = estimated ? NormKind::estimate : NormKind::exact;
        return r;
    }
    switch (space.kind()) {
        case Space::Kind::orlicz: {
            // Variational base: bisection on the modular computed through the full engine.
            const Space& base = space.child();
            const YoungFunction& phi = space.young();
            if (x.is_zero()) return r;
            NormKind kind = NormKind::exact;
            const auto I = [&](double lambda) {
                std::vector<double> v(x.values());
                for (double& e : v) {
                    e = e == 0.0 ? 0.0 : phi(e / lambda);
                    if (!std::isfinite(e)) return kInf;
                }
                const auto inner = norm(base, x.with_values(std::move(v)));
                if (inner.kind != NormKind::exact) kind = NormKind::estimate;
                return inner.value;
            };
            double hi = x.sup();
            for (int g = 0; I(hi) > 1.0; ++g) {
                if (g > 2000) throw NumericError("Luxemburg norm diverges");
                hi *= 2.0;
            }
            double lo = hi * 0.5;
            for (int g = 0; I(lo) <= 1.0 && g < 2000; ++g) lo *= 0.5;
            while (hi / lo - 1.0 > 1e-10) {
                const double mid = std::sqrt(lo * hi);
                (I(mid) <= 1.0 ? hi : lo) = mid;
            }
            r.value = hi;
            r.kind = kind;
            return r;
        }
        case Space::Kind::convexification: {
            const auto inner = norm(space.child(), power(x, space.p()));
            r.value = std::pow(inner.value, 1.0 / space.p());
            r.kind = inner.kind;
            r.infinite = inner.infinite;
            r.notes = inner.notes;
            return r;
        }
        case Space::Kind::symmetrization: {
            if (space.mode() == SymMode::doublestar) {
                throw DomainError("x** symmetrization needs a primitive base space");
            }
            auto inner = norm(space.child(), rearrange(x));
            inner.witness.reset();
            return inner;
        }
        default: return detail::variational_norm(space, x);
    }
}

inline double norm_value(const Space& space, const StepFunction& x) { return norm(space, x).value; }

/// ||phi(|x|)||_base, +inf when a value leaves the domain of phi or the norm diverges.
inline double modular(const Space& base, const YoungFunction& phi, const StepFunction& x) {
    if (!base.primitive()) throw PreconditionError("modular needs a primitive base space");
    bool estimated = false;
    return detail::modular_value(base, phi, detail::cells_of(x), 1.0, estimated);
}

/// inf{lambda > 0 : I_phi(x / lambda) <= 1}
inline NormResult luxemburg_norm(const Space& base, const YoungFunction& phi, const StepFunction& x) {
    return norm(Space::orlicz(base, phi), x);
}

inline NormResult symmetrization_norm(const Space& space, SymMode mode, const StepFunction& x) {
    return norm(Space::symmetrization(space, mode), x);
}

/// ||chi_[0,t]||_E on the given grid; t (measure coordinate) is snapped to the nearest breakpoint.
inline NormResult fundamental(const Space& space, double t, const SpacePtr& grid) {
    if (!(t > 0.0) || t > grid->total_measure() * (1.0 + 1e-12)) {
        throw DomainError("fundamental function needs 0 < t <= total measure");
    }
    double end = grid->snap(grid->left() + t);
    if (end <= grid->left()) end = grid->breakpoints()[1];
    std::vector<double> v(grid->cells(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (grid->breakpoints()[i + 1] <= end) v[i] = 1.0;
    }
    auto r = norm(space, StepFunction(grid, std::move(v)));
    const double snapped = end - grid->left();
    if (snapped != t) {
        std::ostringstream os;
        os.precision(17);
        os << "t snapped from " << t << " to " << snapped;
        r.notes.push_back(os.str());
    }
    return r;
}

/// Measure actually used by fundamental() for a requested t.
inline double snapped_measure(double t, const SpacePtr& grid) {
    double end = grid->snap(grid->left() + t);
    if (end <= grid->left()) end = grid->breakpoints()[1];
    return end - grid->left();
}

/// Symbolic Kothe dual from the duality table; nullopt when the table has no entry.
inline std::optional<Space> dual_descriptor(const Space& space) {
    const auto t_over = [](const QuasiConcaveFn& phi) {
        return QuasiConcaveFn::ratio(QuasiConcaveFn::power(1.0), phi);
    };
    switch (space.kind()) {
        case Space::Kind::lp: {
            const double p = space.p();
            if (p < 1.0) return std::nullopt;
            const double q = p == 1.0 ? kInf : (p == kInf ? 1.0 : p / (p - 1.0));
            if (!space.fn()) return Space::lp(q);
            return Space::lp(q, QuasiConcaveFn::ratio(QuasiConcaveFn::power(0.0), *space.fn()));
        }
        case Space::Kind::lorentz_lambda: return Space::marcinkiewicz(t_over(space.phi()));
        case Space::Kind::marcinkiewicz: return Space::lorentz_lambda(t_over(space.phi()));
        case Space::Kind::convexification: {
            if (space.p() < 1.0) return std::nullopt;
            const auto inner = dual_descriptor(space.child());
            if (!inner) return std::nullopt;
            if (space.p() == 1.0) return inner;
            const double q = space.p() / (space.p() - 1.0);
            return Space::product(Space::convexification(*inner, space.p()), Space::lp(q));
        }
        case Space::Kind::orlicz: {
            // E_phi over L^1(w) with phi = c u^p is L^p((c w)^{1/p}).
            const auto& base = space.child();
            const auto& phi = space.young();
            if (phi.kind() != YoungFunction::Kind::power || base.kind() != Space::Kind::lp || base.p() != 1.0) {
                return std::nullopt;
            }
            const double p = phi.p();
            QuasiConcaveFn w = QuasiConcaveFn::power(0.0, std::pow(phi.c(), 1.0 / p));
            if (base.fn()) {
                const auto m = base.fn()->monomial();
                if (!m) return std::nullopt;
                w = QuasiConcaveFn::power_log(m->alpha / p, m->beta / p, std::pow(phi.c() * m->c, 1.0 / p));
            }
            return dual_descriptor(Space::lp(p, w));
        }
        default: return std::nullopt;
    }
}

}  // namespace symspace

#include "symspace/product.hpp"
