#pragma once

// Young functions as immutable descriptor trees: evaluation, right-continuous inverse,
// the infimal-product (oplus) and supremal-quotient (ominus) operations, relation detection
// between inverses, and the quasi-power condition phi(st) <= C t^alpha phi(s).

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

/// Inner optimization grid used by oplus and ominus nodes.
struct InnerGrid {
    int points = 512;
    double log_span = 46.0;  // search v within e^{+-log_span} of the centre
    double polish_tol = 1e-10;
};

class YoungFunction {
public:
    enum class Kind { power, shifted_power, capped, sum, max, oplus, ominus };

    /// c * u^p
    static YoungFunction power(double c, double p) {
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("power Young function needs c > 0");
        if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("power Young function needs p >= 1");
        auto n = std::make_shared<Node>(Kind::power);
        n->c = c;
        n->p = p;
        return finish(std::move(n));
    }

    /// c * max(0, u - a)^p
    static YoungFunction shifted_power(double a, double c, double p) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("shifted power needs 0 <= a < inf");
        if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("shifted power needs c > 0");
        if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("shifted power needs p >= 1");
        auto n = std::make_shared<Node>(Kind::shifted_power);
        n->shift = a;
        n->c = c;
        n->p = p;
        return finish(std::move(n));
    }

    /// inner(u) for u <= b, +inf beyond.
    static YoungFunction capped(const YoungFunction& inner, double b) {
        if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("capped domain needs 0 < b < inf");
        auto n = std::make_shared<Node>(Kind::capped);
        n->cap = b;
        n->children = {inner};
        return finish(std::move(n));
    }

    static YoungFunction sum(const YoungFunction& f, const YoungFunction& g) {
        return combine(Kind::sum, f, g);
    }
    static YoungFunction max(const YoungFunction& f, const YoungFunction& g) {
        return combine(Kind::max, f, g);
    }

    /// (f oplus g)(u) = inf over u = v w of f(v) + g(w).
    static YoungFunction oplus(const YoungFunction& f, const YoungFunction& g, InnerGrid grid = {}) {
        auto n = std::make_shared<Node>(Kind::oplus);
        n->children = {f, g};
        n->grid = grid;
        return finish(std::move(n));
    }

    /// (phi ominus phi1)(u) = sup over v > 0 with phi1(v) finite of phi(u v) - phi1(v).
    static YoungFunction ominus(const YoungFunction& phi, const YoungFunction& phi1,
                                InnerGrid grid = {}) {
        auto n = std::make_shared<Node>(Kind::ominus);
        n->children = {phi, phi1};
        n->grid = grid;
        return finish(std::move(n));
    }

    Kind kind() const noexcept { return node_->kind; }
    double c() const noexcept { return node_->c; }
    double p() const noexcept { return node_->p; }
    double shift() const noexcept { return node_->shift; }
    double cap() const noexcept { return node_->cap; }
    const InnerGrid& inner_grid() const noexcept { return node_->grid; }
    const YoungFunction& first() const { return node_->children.at(0); }
    const YoungFunction& second() const { return node_->children.at(1); }

    /// sup{u : phi(u) = 0}
    double a() const noexcept { return node_->a_phi; }
    /// sup{u : phi(u) < inf}
    double b() const noexcept { return node_->b_phi; }

    /// oplus and ominus nodes are not required to pass the sampled convexity test.
    bool convexity_exempt() const noexcept {
        return kind() == Kind::oplus || kind() == Kind::ominus;
    }

    double operator()(double u) const { return eval(*node_, u); }

    /// Right-continuous inverse inf{u >= 0 : phi(u) > v}, to relative tolerance 1e-12.
    double inverse(double v) const {
        if (!(v >= 0.0)) throw DomainError("inverse needs v >= 0");
        if (v == kInf) return b();
        if (v == 0.0) return a();
        const auto& f = *this;
        const double bphi = b();
        double lo = a();
        double hi;
        if (std::isfinite(bphi)) {
            if (f(bphi) <= v) return bphi;
            hi = bphi;
        } else {
            hi = std::max(1.0, 2.0 * lo);
            while (f(hi) <= v) {
                lo = hi;
                hi *= 2.0;
                if (!std::isfinite(hi)) throw NumericError("inverse bracket overflow");
            }
        }
        // Invariant: f(lo) <= v < f(hi). Log-bisection while far apart, then Illinois steps.
        double flo = f(lo) - v;
        double fhi = f(hi) - v;
        int side = 0;
        for (int it = 0; it < 400; ++it) {
            if (hi - lo <= 1e-12 * hi) break;
            double mid;
            if (lo > 0.0 && hi > 4.0 * lo) {
                mid = std::sqrt(lo * hi);
            } else if (lo == 0.0 && hi > 1e-300) {
                mid = hi * 0x1p-8;
            } else if (std::isfinite(fhi) && fhi > flo) {
                mid = lo - flo * (hi - lo) / (fhi - flo);
                if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
            } else {
                mid = 0.5 * (lo + hi);
            }
            const double fm = f(mid) - v;
            if (fm <= 0.0) {
                lo = mid;
                flo = fm;
                if (side == -1) fhi *= 0.5;
                side = -1;
            } else {
                hi = mid;
                fhi = fm;
                if (side == 1) flo *= 0.5;
                side = 1;
            }
        }
        return 0.5 * (lo + hi);
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(12);
        const Node& n = *node_;
        switch (n.kind) {
            case Kind::power: os << n.c << "*u^" << n.p; break;
            case Kind::shifted_power: os << n.c << "*max(0,u-" << n.shift << ")^" << n.p; break;
            case Kind::capped: os << "cap(" << first().describe() << ", b=" << n.cap << ")"; break;
            case Kind::sum: os << "(" << first().describe() << " + " << second().describe() << ")"; break;
            case Kind::max: os << "max(" << first().describe() << ", " << second().describe() << ")"; break;
            case Kind::oplus: os << "(" << first().describe() << " (+) " << second().describe() << ")"; break;
            case Kind::ominus: os << "(" << first().describe() << " (-) " << second().describe() << ")"; break;
        }
        return os.str();
    }

private:
    struct Node {
        explicit Node(Kind k) : kind(k) {}
        Kind kind;
        double c = 1.0, p = 1.0, shift = 0.0, cap = kInf;
        std::vector<YoungFunction> children;
        InnerGrid grid;
        double a_phi = 0.0;
        double b_phi = kInf;
    };

    explicit YoungFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static YoungFunction combine(Kind k, const YoungFunction& f, const YoungFunction& g) {
        auto n = std::make_shared<Node>(k);
        n->children = {f, g};
        return finish(std::move(n));
    }

    static YoungFunction finish(std::shared_ptr<Node> n) {
        switch (n->kind) {
            case Kind::power:
                n->a_phi = 0.0;
                n->b_phi = kInf;
                break;
            case Kind::shifted_power:
                n->a_phi = n->shift;
                n->b_phi = kInf;
                break;
            case Kind::capped:
                n->a_phi = std::min(n->children[0].a(), n->cap);
                n->b_phi = std::min(n->children[0].b(), n->cap);
                break;
            case Kind::sum:
            case Kind::max:
                n->a_phi = std::min(n->children[0].a(), n->children[1].a());
                n->b_phi = std::min(n->children[0].b(), n->children[1].b());
                break;
            case Kind::oplus:
                n->a_phi = n->children[0].a() * n->children[1].a();
                n->b_phi = n->children[0].b() * n->children[1].b();
                break;
            case Kind::ominus:
                locate_ominus_thresholds(*n);
                break;
        }
        return YoungFunction(std::shared_ptr<const Node>(std::move(n)));
    }

    static double eval(const Node& n, double u) {
        if (!(u >= 0.0)) throw DomainError("Young function argument must be >= 0");
        switch (n.kind) {
            case Kind::power:
                if (u == kInf) return kInf;
                return n.c * std::pow(u, n.p);
            case Kind::shifted_power:
                if (u == kInf) return kInf;
                return u <= n.shift ? 0.0 : n.c * std::pow(u - n.shift, n.p);
            case Kind::capped:
                return u > n.cap ? kInf : n.children[0](u);
            case Kind::sum:
                return n.children[0](u) + n.children[1](u);
            case Kind::max:
                return std::max(n.children[0](u), n.children[1](u));
            case Kind::oplus:
                return eval_oplus(n, u);
            case Kind::ominus:
                return eval_ominus(n, u);
        }
        return kInf;
    }

    // Symmetric grid in s around v = sqrt(u): swapping the children mirrors every probe exactly.
    static double eval_oplus(const Node& n, double u) {
        if (u == 0.0) return 0.0;
        if (u == kInf) return kInf;
        const auto& f = n.children[0];
        const auto& g = n.children[1];
        if (u > f.b() * g.b()) return kInf;
        const double centre = 0.5 * std::log(u);
        const double span = n.grid.log_span;
        const double hi = std::min(span, std::log(f.b()) - centre);
        const double lo = std::max(-span, centre - std::log(g.b()));
        if (lo > hi) return kInf;
        const auto objective = [&](double s) {
            return f(std::exp(centre + s)) + g(std::exp(centre - s));
        };
        const int m = std::max(3, n.grid.points);
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        const auto node = [&](int i) {
            return mid + half * (static_cast<double>(2 * i - (m - 1)) / static_cast<double>(m - 1));
        };
        int best = 0;
        double best_val = kInf;
        for (int i = 0; i < m; ++i) {
            const double val = objective(node(i));
            if (val < best_val) {
                best_val = val;
                best = i;
            }
        }
        if (best_val == kInf) return kInf;
        const double a = node(std::max(0, best - 1));
        const double b = node(std::min(m - 1, best + 1));
        const auto polished = detail::golden_minimize(objective, a, b, n.grid.polish_tol);
        return std::max(0.0, std::min(best_val, polished.value));
    }

    static double eval_ominus(const Node& n, double u) {
        if (u == 0.0) return 0.0;
        const auto& phi = n.children[0];
        const auto& phi1 = n.children[1];
        const double b1 = phi1.b();
        if (std::isfinite(phi.b()) && (!std::isfinite(b1) || u * b1 > phi.b())) return kInf;
        const double span = n.grid.log_span;
        const double lo = -span;
        const double hi = std::min(span, std::log(b1));
        if (lo >= hi) return 0.0;
        const auto objective = [&](double s) {
            const double v = std::exp(s);
            const double rhs = phi1(v);
            if (rhs == kInf) return -kInf;
            return phi(u * v) - rhs;
        };
        const int m = std::max(3, n.grid.points);
        const auto node = [&](int i) {
            return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
        };
        int best = 0;
        double best_val = -kInf;
        double prev = -kInf;
        for (int i = 0; i < m; ++i) {
            const double val = objective(node(i));
            if (val == kInf) return kInf;
            if (val > best_val) {
                best_val = val;
                best = i;
            }
            if (i == m - 2) prev = val;
        }
        if (best == m - 1 && hi == span && best_val > prev) {
            // Still rising at the edge of the search window: probe far beyond it.
            const double far = objective(2.0 * span);
            if (far > best_val * (1.0 + 1e-9) + 1e-300) return kInf;
        }
        const double a = node(std::max(0, best - 1));
        const double b = node(std::min(m - 1, best + 1));
        const auto polished = detail::golden_maximize(objective, a, b, n.grid.polish_tol);
        return std::max({0.0, best_val, polished.value});
    }

    static void locate_ominus_thresholds(Node& n) {
        const auto value = [&](double u) { return eval_ominus(n, u); };
        constexpr double kLo = 1e-30, kHi = 1e30;
        if (value(kLo) == kInf) throw DomainError("ominus is infinite near 0");
        // b_phi: last finite point.
        if (value(kHi) < kInf) {
            n.b_phi = kInf;
        } else {
            double lo = kLo, hi = kHi;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
                const double mid = hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
                (value(mid) < kInf ? lo : hi) = mid;
            }
            n.b_phi = lo;
        }
        // a_phi: last zero.
        if (value(kLo) > 0.0) {
            n.a_phi = 0.0;
        } else {
            double lo = kLo, hi = std::isfinite(n.b_phi) ? n.b_phi : kHi;
            if (value(hi) == 0.0) {
                n.a_phi = hi;
            } else {
                for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
                    const double mid = hi > 4.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
                    (value(mid) == 0.0 ? lo : hi) = mid;
                }
                n.a_phi = lo;
            }
        }
    }

    std::shared_ptr<const Node> node_;
};

inline const char* to_string(YoungFunction::Kind k) {
    switch (k) {
        case YoungFunction::Kind::power: return "power";
        case YoungFunction::Kind::shifted_power: return "shifted_power";
        case YoungFunction::Kind::capped: return "capped";
        case YoungFunction::Kind::sum: return "sum";
        case YoungFunction::Kind::max: return "max";
        case YoungFunction::Kind::oplus: return "oplus";
        case YoungFunction::Kind::ominus: return "ominus";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------------------------
// Sampled structural invariants

struct YoungInvariantReport {
    bool zero_at_zero = true;
    bool monotone = true;
    bool midpoint_convex = true;
    bool left_continuous_at_b = true;
};

/// Samples phi on a log grid over [lo, hi] and midpoint pairs drawn from the same grid.
inline YoungInvariantReport check_young_invariants(const YoungFunction& phi, double lo = 1e-4,
                                                   double hi = 1e4, int pairs = 256) {
    YoungInvariantReport r;
    r.zero_at_zero = phi(0.0) == 0.0;
    std::vector<double> us(pairs);
    for (int i = 0; i < pairs; ++i) {
        us[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (pairs - 1));
    }
    double prev = 0.0;
    for (double u : us) {
        const double v = phi(u);
        if (v < prev * (1.0 - 1e-12)) r.monotone = false;
        prev = v;
    }
    for (int i = 0; i < pairs; ++i) {
        const double u = us[i];
        const double w = us[(i * 37 + 11) % pairs];
        const double fu = phi(u), fw = phi(w);
        if (!std::isfinite(fu) || !std::isfinite(fw)) continue;
        const double fm = phi(0.5 * (u + w));
        if (fm > 0.5 * (fu + fw) * (1.0 + 1e-9) + 1e-300) r.midpoint_convex = false;
    }
    if (std::isfinite(phi.b())) {
        const double at_b = phi(phi.b());
        const double near_b = phi(phi.b() * (1.0 - 1e-9));
        r.left_continuous_at_b =
            std::isfinite(at_b) ? std::abs(at_b - near_b) <= 1e-6 * std::max(1.0, at_b)
                                : !std::isfinite(near_b);
    }
    return r;
}

// ---------------------------------------------------------------------------------------------
// Relations between phi^{-1} and phi1^{-1} phi2^{-1}

enum class Regime { all, large, small };
enum class Direction { prec, succ, equiv };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::all: return "all";
        case Regime::large: return "large";
        case Regime::small: return "small";
    }
    return "unknown";
}

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::prec: return "prec";
        case Direction::succ: return "succ";
        case Direction::equiv: return "equiv";
    }
    return "unknown";
}

struct RelationOptions {
    double u_min = 1e-30;
    double u_max = 1e30;
    int points = 2048;
    double u0_min = 1e-6;  // candidate threshold range for large/small regimes
    double u0_max = 1e6;
    int u0_points = 64;
    double cap = 1e8;
};

/// C phi1^{-1} phi2^{-1} <= phi^{-1} (prec) and/or phi^{-1} <= D phi1^{-1} phi2^{-1} (succ).
struct RelationCertificate {
    Regime regime = Regime::all;
    Direction direction = Direction::prec;
    bool holds = false;
    std::optional<double> C;   // best lower constant, prec side
    std::optional<double> D;   // best upper constant, succ side
    std::optional<double> u0;  // threshold for large/small regimes
    std::optional<double> witness_u;
    bool sensitive = false;  // constant varies by more than 2x across feasible thresholds

    std::string relation() const {
        return std::string(to_string(direction)) + "_" + to_string(regime);
    }
};

namespace detail {

struct RatioSample {
    double u;
    double ratio;  // phi^{-1}(u) / (phi1^{-1}(u) phi2^{-1}(u))
};

inline std::vector<RatioSample> inverse_ratios(const YoungFunction& phi1, const YoungFunction& phi2,
                                               const YoungFunction& phi, const RelationOptions& o) {
    std::vector<RatioSample> out;
    out.reserve(o.points);
    const double la = std::log(o.u_min), lb = std::log(o.u_max);
    for (int i = 0; i < o.points; ++i) {
        const double u = std::exp(la + (lb - la) * i / (o.points - 1));
        const double denom = phi1.inverse(u) * phi2.inverse(u);
        const double num = phi.inverse(u);
        double r;
        if (denom == 0.0) {
            r = num == 0.0 ? 1.0 : kInf;
        } else {
            r = num / denom;
        }
        out.push_back({u, r});
    }
    return out;
}

struct SideResult {
    double constant;
    double witness;
};

// prec: largest C with C <= ratio; succ: smallest D with ratio <= D.
inline SideResult side_constant(const std::vector<RatioSample>& rs, Direction d, double lo_u,
                                double hi_u) {
    SideResult s{d == Direction::prec ? kInf : 0.0, 0.0};
    for (const auto& r : rs) {
        if (r.u < lo_u || r.u > hi_u) continue;
        if (d == Direction::prec ? r.ratio < s.constant : r.ratio > s.constant) {
            s.constant = r.ratio;
            s.witness = r.u;
        }
    }
    return s;
}

inline bool feasible(double constant, Direction d, double cap) {
    return d == Direction::prec ? constant >= 1.0 / cap : constant <= cap;
}

}  // namespace detail

/// Searches the best constants for the relation on a log u-grid restricted to the regime.
inline RelationCertificate check_relation(const YoungFunction& phi1, const YoungFunction& phi2,
                                          const YoungFunction& phi, Regime regime,
                                          Direction direction, const RelationOptions& o = {}) {
    RelationCertificate cert;
    cert.regime = regime;
    cert.direction = direction;
    const auto ratios = detail::inverse_ratios(phi1, phi2, phi, o);
    std::vector<Direction> sides;
    if (direction != Direction::succ) sides.push_back(Direction::prec);
    if (direction != Direction::prec) sides.push_back(Direction::succ);

    const auto record = [&](Direction side, double constant) {
        (side == Direction::prec ? cert.C : cert.D) = constant;
    };

    if (regime == Regime::all) {
        cert.holds = true;
        for (Direction side : sides) {
            const auto s = detail::side_constant(ratios, side, 0.0, kInf);
            record(side, s.constant);
            if (!detail::feasible(s.constant, side, o.cap)) {
                cert.holds = false;
                cert.witness_u = s.witness;
            }
        }
        return cert;
    }

    // Thresholds ordered so that the first feasible one is the least restrictive.
    std::vector<double> thresholds(o.u0_points);
    for (int i = 0; i < o.u0_points; ++i) {
        thresholds[i] = o.u0_min * std::pow(o.u0_max / o.u0_min, static_cast<double>(i) /
                                                                     (o.u0_points - 1));
    }
    if (regime == Regime::small) std::reverse(thresholds.begin(), thresholds.end());
    const auto window = [&](double u0) {
        return regime == Regime::large ? std::pair{u0, kInf} : std::pair{0.0, u0};
    };
    std::optional<double> chosen;
    std::vector<std::vector<double>> feasible_constants(sides.size());
    for (double u0 : thresholds) {
        const auto [lo, hi] = window(u0);
        bool ok = true;
        std::vector<double> constants;
        for (Direction side : sides) {
            const auto s = detail::side_constant(ratios, side, lo, hi);
            constants.push_back(s.constant);
            ok = ok && detail::feasible(s.constant, side, o.cap);
        }
        if (!ok) continue;
        if (!chosen) {
            chosen = u0;
            for (std::size_t k = 0; k < sides.size(); ++k) record(sides[k], constants[k]);
        }
        for (std::size_t k = 0; k < sides.size(); ++k) feasible_constants[k].push_back(constants[k]);
    }
    if (chosen) {
        cert.holds = true;
        cert.u0 = chosen;
        for (const auto& cs : feasible_constants) {
            const auto [mn, mx] = std::minmax_element(cs.begin(), cs.end());
            if (*mn > 0.0 && *mx / *mn > 2.0) cert.sensitive = true;
        }
        return cert;
    }
    // Refuted: report the worst ratio inside the most favourable window.
    const auto [lo, hi] = window(thresholds.back());
    for (Direction side : sides) {
        const auto s = detail::side_constant(ratios, side, lo, hi);
        record(side, s.constant);
        if (!detail::feasible(s.constant, side, o.cap)) cert.witness_u = s.witness;
    }
    return cert;
}

/// Largest deviation of the two-sided bound phi^{-1}(t) <= phi1^{-1}(t) phi2^{-1}(t) <= phi^{-1}(2t),
/// as max relative excess; <= 0 means both sides hold.
inline double oplus_sandwich_excess(const YoungFunction& phi1, const YoungFunction& phi2,
                                    const YoungFunction& phi, double t) {
    const double mid = phi1.inverse(t) * phi2.inverse(t);
    const double left = phi.inverse(t);
    const double right = phi.inverse(2.0 * t);
    const double scale = std::max(mid, 1e-300);
    return std::max((left - mid) / scale, (mid - right) / scale);
}

// ---------------------------------------------------------------------------------------------
// Quasi-power condition phi(s t) <= C t^alpha phi(s), 0 < t < 1

struct Condition18Result {
    bool holds = false;
    double C = 0.0;
    double alpha = 0.0;
    std::string reason;
};

/// alpha is the largest exponent admissible with C = 1 over all sampled pairs; C is then the
/// smallest constant for that alpha (1 up to rounding). Degenerate inputs that take no finite
/// positive value on the sampled range are reported as refuted.
inline Condition18Result check_condition18(const YoungFunction& phi, double lo = 1e-8,
                                           double hi = 1e8, int points = 257) {
    Condition18Result res;
    std::vector<double> us(points), vals(points);
    const double la = std::log(lo), lb = std::log(hi);
    for (int i = 0; i < points; ++i) {
        us[i] = std::exp(la + (lb - la) * i / (points - 1));
        vals[i] = phi(us[i]);
    }
    double alpha = kInf;
    bool informative = false;
    for (int i = 0; i < points; ++i) {
        if (!(vals[i] > 0.0) || !std::isfinite(vals[i])) continue;
        for (int j = 0; j < i; ++j) {
            if (!(vals[j] > 0.0)) continue;
            informative = true;
            const double ell = std::log(us[i] / us[j]);
            alpha = std::min(alpha, std::log(vals[i] / vals[j]) / ell);
        }
    }
    if (!informative) {
        res.reason = "no pair with finite positive values on the sampled range";
        return res;
    }
    if (!(alpha > 0.0)) {
        res.alpha = alpha;
        res.reason = "no positive exponent admissible";
        return res;
    }
    double C = 0.0;
    for (int i = 0; i < points; ++i) {
        if (!(vals[i] > 0.0) || !std::isfinite(vals[i])) continue;
        for (int j = 0; j < i; ++j) {
            const double t = us[j] / us[i];
            C = std::max(C, vals[j] / (std::pow(t, alpha) * vals[i]));
        }
    }
    res.holds = true;
    res.alpha = alpha;
    res.C = std::max(C, 1.0);
    return res;
}

}  // namespace symspace
