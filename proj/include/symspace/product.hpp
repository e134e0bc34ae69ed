#pragma once

// Variational norms: pointwise products E.F, Calderon spaces, multipliers M(E,F), numeric Kothe
// duals, and factorization witnesses. Values from the optimizer are upper bounds certified by the
// returned witness (product) or lower bounds certified by an explicit test function (multiplier,
// dual).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "symspace/numeric.hpp"
#include "symspace/spaces.hpp"

namespace symspace {

struct ProductOptions {
    int max_sweeps = 5000;
    int starts = 8;  // theta-power starts theta = k/starts, k = 1..starts-1, plus a constant start
    int prune_after = 4;
    int keep = 2;
    double rel_tol = 1e-10;
    bool force_optimizer = false;
    bool monotone = false;  // restrict to non-increasing factors; z must be non-increasing
    std::vector<std::vector<double>> warm_starts;  // extra x profiles, positive on supp z
};

struct AscentOptions {
    int max_sweeps = 400;
    double rel_tol = 1e-9;
    double cap = 1e8;
    bool force_numeric = false;  // skip the symbolic table
};

namespace detail {

/// Norm of a fixed descriptor on a fixed grid, reusing the cell layout between calls.
class SpaceEvaluator {
public:
    SpaceEvaluator(const Space& space, const StepFunction& layout)
        : space_(space), layout_(layout), cells_(cells_of(layout)), primitive_(space.primitive()) {}

    double operator()(const std::vector<double>& values) {
        if (primitive_) {
            cells_.values = values;
            try {
                return primitive_value(space_, cells_, estimated_);
            } catch (const NumericError&) {
                return kInf;
            }
        }
        const auto r = norm(space_, layout_.with_values(values));
        if (r.kind == NormKind::estimate) estimated_ = true;
        return r.value;
    }

    bool estimated() const noexcept { return estimated_; }

private:
    Space space_;
    StepFunction layout_;
    Cells cells_;
    bool primitive_;
    bool estimated_ = false;
};

struct DescentOptions {
    int max_sweeps = 5000;
    double rel_tol = 1e-10;
    int prune_after = 4;
    int keep = 2;
    bool unconstrained = false;  // enables the gradient-sampling phase
    int stall_rounds = 5;
    int bfgs_iterations = 500;
    int sampling_iterations = 30;
    std::uint64_t seed = 0x5eed;
};

struct DescentResult {
    std::vector<double> u;
    double value = kInf;
    int sweeps = 0;
    bool converged = false;
    std::size_t start = 0;
};

template <class F>
std::vector<double> forward_gradient(F&& f, const std::vector<double>& at, double base) {
    std::vector<double> g(at.size()), q(at);
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double h = 1e-7 * std::max(1.0, std::abs(at[i]));
        q[i] = at[i] + h;
        g[i] = (f(q) - base) / h;
        q[i] = at[i];
    }
    return g;
}

/// BFGS with a weak Wolfe line search, which keeps making progress on nonsmooth convex
/// objectives where coordinate moves stall. Returns the new value; `u` is updated in place.
template <class F>
double bfgs_descent(F&& f, std::vector<double>& u, double value, int iterations) {
    const std::size_t m = u.size();
    std::vector<std::vector<double>> H(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) H[i][i] = 1.0;
    auto g = forward_gradient(f, u, value);
    std::vector<double> d(m), trial(m);
    for (int it = 0; it < iterations; ++it) {
        double slope = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            d[i] = 0.0;
            for (std::size_t j = 0; j < m; ++j) d[i] -= H[i][j] * g[j];
            slope += g[i] * d[i];
        }
        if (!(slope < 0.0)) {
            for (std::size_t i = 0; i < m; ++i) {
                std::fill(H[i].begin(), H[i].end(), 0.0);
                H[i][i] = 1.0;
                d[i] = -g[i];
            }
            slope = 0.0;
            for (double x : g) slope -= x * x;
            if (!(slope < 0.0)) break;
        }
        // Weak Wolfe bracketing.
        double lo = 0.0, hi = kInf, t = 1.0, ft = kInf;
        std::vector<double> gt;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = u[i] + t * d[i];
            ft = f(trial);
            if (!(ft < value + 1e-4 * t * slope)) {
                hi = t;
            } else {
                gt = forward_gradient(f, trial, ft);
                double s2 = 0.0;
                for (std::size_t i = 0; i < m; ++i) s2 += gt[i] * d[i];
                if (s2 >= 0.9 * slope) {
                    accepted = true;
                    break;
                }
                lo = t;
            }
            t = std::isinf(hi) ? 2.0 * lo : 0.5 * (lo + hi);
        }
        if (!accepted) {
            if (lo > 0.0) {
                for (std::size_t i = 0; i < m; ++i) u[i] += lo * d[i];
                value = f(u);
            }
            break;
        }
        std::vector<double> sv(m), yv(m);
        double sy = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            sv[i] = t * d[i];
            yv[i] = gt[i] - g[i];
            sy += sv[i] * yv[i];
        }
        u = trial;
        const double improvement = value - ft;
        value = ft;
        g = std::move(gt);
        if (sy > 1e-300) {
            std::vector<double> Hy(m, 0.0);
            double yHy = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) Hy[i] += H[i][j] * yv[j];
                yHy += yv[i] * Hy[i];
            }
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    H[i][j] += (1.0 + rho * yHy) * rho * sv[i] * sv[j] - rho * (Hy[i] * sv[j] + sv[i] * Hy[j]);
                }
            }
        }
        if (improvement < 1e-15 * std::max(1.0, std::abs(value))) break;
    }
    return value;
}

/// Minimum-norm point of the convex hull of the vectors `g` (Wolfe's algorithm).
inline std::vector<double> min_norm_hull(const std::vector<std::vector<double>>& g) {
    const std::size_t k = g.size(), m = g.front().size();
    std::vector<std::vector<double>> gram(k, std::vector<double>(k));
    double scale = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            double d = 0.0;
            for (std::size_t i = 0; i < m; ++i) d += g[a][i] * g[b][i];
            gram[a][b] = gram[b][a] = d;
        }
        scale = std::max(scale, gram[a][a]);
    }
    if (!(scale > 0.0)) return std::vector<double>(m, 0.0);

    // Affine minimizer over the corral: alpha = G^-1 1 / (1' G^-1 1), by Cholesky with a ridge.
    const auto affine = [&](const std::vector<std::size_t>& S) {
        const std::size_t n = S.size();
        std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double v = gram[S[i]][S[j]] + (i == j ? 1e-13 * scale : 0.0);
                for (std::size_t t = 0; t < j; ++t) v -= L[i][t] * L[j][t];
                L[i][j] = i == j ? std::sqrt(std::max(v, 1e-300)) : v / L[j][j];
            }
        }
        std::vector<double> a(n, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < i; ++t) a[i] -= L[i][t] * a[t];
            a[i] /= L[i][i];
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t t = i + 1; t < n; ++t) a[i] -= L[t][i] * a[t];
            a[i] /= L[i][i];
        }
        const double sum = std::accumulate(a.begin(), a.end(), 0.0);
        for (double& v : a) v /= sum;
        return a;
    };

    std::size_t first = 0;
    for (std::size_t a = 1; a < k; ++a) {
        if (gram[a][a] < gram[first][first]) first = a;
    }
    std::vector<std::size_t> S{first};
    std::vector<double> lam{1.0};
    for (int major = 0; major < 1000; ++major) {
        // <x, g_j> for every j, with x = sum lam_i g_{S_i}.
        double xx = 0.0;
        std::size_t j = 0;
        double best = kInf;
        for (std::size_t a = 0; a < k; ++a) {
            double d = 0.0;
            for (std::size_t i = 0; i < S.size(); ++i) d += lam[i] * gram[S[i]][a];
            if (d < best) {
                best = d;
                j = a;
            }
        }
        for (std::size_t i = 0; i < S.size(); ++i) {
            for (std::size_t t = 0; t < S.size(); ++t) xx += lam[i] * lam[t] * gram[S[i]][S[t]];
        }
        if (xx - best <= 1e-12 * scale || std::find(S.begin(), S.end(), j) != S.end()) break;
        S.push_back(j);
        lam.push_back(0.0);
        for (int minor = 0; minor < 1000; ++minor) {
            const auto alpha = affine(S);
            if (std::all_of(alpha.begin(), alpha.end(), [](double v) { return v > 1e-15; })) {
                lam = alpha;
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < S.size(); ++i) {
                if (alpha[i] <= 1e-15) theta = std::min(theta, lam[i] / (lam[i] - alpha[i]));
            }
            std::vector<std::size_t> keepS;
            std::vector<double> keepL;
            for (std::size_t i = 0; i < S.size(); ++i) {
                const double v = (1.0 - theta) * lam[i] + theta * alpha[i];
                if (v > 1e-15) {
                    keepS.push_back(S[i]);
                    keepL.push_back(v);
                }
            }
            if (keepS.empty()) break;
            S = std::move(keepS);
            lam = std::move(keepL);
            const double sum = std::accumulate(lam.begin(), lam.end(), 0.0);
            for (double& v : lam) v /= sum;
        }
    }
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < S.size(); ++i) {
        for (std::size_t t = 0; t < m; ++t) out[t] += lam[i] * g[S[i]][t];
    }
    return out;
}

/// Gradient sampling for nonsmooth objectives: forward-difference gradients at random points
/// of an eps-ball, descent along the minimum-norm hull element, eps shrinks when it vanishes.
/// Returns the new value; `u` is updated in place.
template <class F>
double gradient_sampling(F&& f, std::vector<double>& u, double value, std::mt19937_64& rng, int iterations) {
    const std::size_t m = u.size();
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit;
    double eps = 0.01;
    std::vector<double> p(m), dir(m), moved(m);
    const auto gradient_at = [&](const std::vector<double>& at) {
        std::vector<double> g(m);
        const double base = f(at);
        std::vector<double> q(at);
        for (std::size_t i = 0; i < m; ++i) {
            const double h = 1e-7 * std::max(1.0, std::abs(at[i]));
            q[i] = at[i] + h;
            g[i] = (f(q) - base) / h;
            q[i] = at[i];
        }
        return g;
    };
    const std::size_t few = m + 1, many = 4 * m + 1;
    std::size_t samples = few;
    for (int it = 0; it < iterations && eps > 1e-7; ++it) {
        std::vector<std::vector<double>> grads{gradient_at(u)};
        for (std::size_t k = 0; k < samples; ++k) {
            double len = 0.0;
            for (double& d : dir) {
                d = gauss(rng);
                len += d * d;
            }
            const double r = eps * std::pow(unit(rng), 1.0 / static_cast<double>(m)) / std::sqrt(len);
            for (std::size_t i = 0; i < m; ++i) p[i] = u[i] + r * dir[i];
            grads.push_back(gradient_at(p));
        }
        bool finite = true;
        for (const auto& g : grads) {
            for (double x : g) finite = finite && std::isfinite(x);
        }
        if (!finite) {
            eps *= 0.5;
            continue;
        }
        const auto g = min_norm_hull(grads);
        double gn = 0.0;
        for (double x : g) gn += x * x;
        gn = std::sqrt(gn);
        if (gn < 1e-6) {
            eps *= 0.1;
            continue;
        }
        for (std::size_t i = 0; i < m; ++i) dir[i] = -g[i] / gn;
        const auto h = [&](double a) {
            for (std::size_t i = 0; i < m; ++i) moved[i] = u[i] + a * dir[i];
            return f(moved);
        };
        double hi = eps;
        while (h(2.0 * hi) < h(hi) && hi < 100.0) hi *= 2.0;
        const auto best = golden_minimize(h, 0.0, 2.0 * hi, 1e-4 * hi, 80);
        if (best.value < value) {
            for (std::size_t i = 0; i < m; ++i) u[i] += best.x * dir[i];
            value = best.value;
            samples = few;
        } else if (samples == few) {
            samples = many;
        } else {
            eps *= 0.5;
        }
    }
    return value;
}

/// Multi-start coordinate descent with golden-section line searches and a pattern move after
/// every sweep. `box(i, u)` gives the feasible interval for u[i] with the others fixed.
template <class F, class Box>
DescentResult coordinate_descent(F&& f, const std::vector<std::vector<double>>& starts, Box&& box,
                                 const DescentOptions& o) {
    struct State {
        std::vector<double> u;
        std::vector<double> step;
        double value;
        int sweeps = 0;
        bool converged = false;
        std::size_t index;
    };

    const auto feasible = [&](const std::vector<double>& u) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const auto [lo, hi] = box(i, u);
            if (u[i] < lo - 1e-12 * (1.0 + std::abs(lo)) || u[i] > hi + 1e-12 * (1.0 + std::abs(hi))) {
                return false;
            }
        }
        return true;
    };

    const auto sweep = [&](State& s) {
        const double before = s.value;
        const std::vector<double> previous = s.u;
        std::vector<double> trial = s.u;
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            auto [lo, hi] = box(i, s.u);
            const double centre = s.u[i];
            lo = std::max(lo, centre - s.step[i]);
            hi = std::min(hi, centre + s.step[i]);
            if (!(hi - lo > 1e-13 * (1.0 + std::abs(centre)))) continue;
            trial = s.u;
            const auto g = [&](double t) {
                trial[i] = t;
                return f(trial);
            };
            const auto m = golden_minimize(g, lo, hi, std::max(1e-3 * (hi - lo), 1e-12), 200);
            if (m.value < s.value) {
                const double delta = m.x - centre;
                s.u[i] = m.x;
                s.value = m.value;
                const bool at_edge = std::abs(delta) > 0.9 * s.step[i];
                s.step[i] = at_edge ? s.step[i] * 4.0 : std::max(4.0 * std::abs(delta), 1e-9);
            } else {
                s.step[i] = std::max(s.step[i] * 0.5, 1e-9);
            }
        }
        // Pattern move along the net change of this sweep.
        std::vector<double> dir(s.u.size());
        double len = 0.0;
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            dir[i] = s.u[i] - previous[i];
            len += dir[i] * dir[i];
        }
        if (len > 0.0) {
            std::vector<double> moved(s.u.size());
            const auto h = [&](double a) {
                for (std::size_t i = 0; i < s.u.size(); ++i) moved[i] = s.u[i] + a * dir[i];
                if (!feasible(moved)) return kInf;
                return f(moved);
            };
            const auto m = golden_minimize(h, 0.0, 4.0, 1e-4, 60);
            if (m.value < s.value) {
                for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] += m.x * dir[i];
                s.value = m.value;
            }
        }
        ++s.sweeps;
        if (!(before - s.value > o.rel_tol)) s.converged = true;
    };

    const auto stall_phase = [&](State& s) {
        if (!o.unconstrained) return false;
        const double before = s.value;
        std::mt19937_64 rng(o.seed + s.index);
        for (int round = 0; round < o.stall_rounds; ++round) {
            const double start = s.value;
            s.value = bfgs_descent(f, s.u, s.value, o.bfgs_iterations);
            s.value = gradient_sampling(f, s.u, s.value, rng, o.sampling_iterations);
            if (!(start - s.value > o.rel_tol)) break;
        }
        return before - s.value > o.rel_tol;
    };
    const auto run = [&](State& s) {
        while (s.sweeps < o.max_sweeps) {
            while (!s.converged && s.sweeps < o.max_sweeps) sweep(s);
            if (!s.converged || !stall_phase(s)) break;
            s.converged = false;
            std::fill(s.step.begin(), s.step.end(), 1.0);
        }
    };

    std::vector<State> states;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        State s{starts[k], std::vector<double>(starts[k].size(), 1.0), f(starts[k]), 0, false, k};
        states.push_back(std::move(s));
    }
    if (states.empty()) return {};

    for (auto& s : states) {
        while (!s.converged && s.sweeps < std::min(o.prune_after, o.max_sweeps)) sweep(s);
    }
    std::stable_sort(states.begin(), states.end(), [](const State& a, const State& b) {
        return a.value < b.value || (a.value == b.value && a.index < b.index);
    });
    states.resize(std::min<std::size_t>(states.size(), static_cast<std::size_t>(std::max(o.keep, 1))));
    for (auto& s : states) {
        while (!s.converged && s.sweeps < o.max_sweeps) sweep(s);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < states.size(); ++k) {
        if (states[k].value < states[best].value ||
            (states[k].value == states[best].value && states[k].index < states[best].index)) {
            best = k;
        }
    }
    auto& s = states[best];
    run(s);
    return {s.u, s.value, s.sweeps, s.converged, s.index};
}

inline bool is_plain_linf(const Space& s) {
    if (const auto p = s.plain_lp()) return *p == kInf;
    if (s.kind() == Space::Kind::convexification) return is_plain_linf(s.child());
    return false;
}

/// The norm is subadditive, so E^(p) . E^(q) = E^(r) holds isometrically over it.
inline bool is_banach(const Space& s) {
    switch (s.kind()) {
        case Space::Kind::lp: return s.p() >= 1.0;
        case Space::Kind::marcinkiewicz:
        case Space::Kind::linf_weighted: return true;
        case Space::Kind::lorentz_lambda: {
            const auto a = s.phi().pure_power();
            return a && *a >= 0.0 && *a <= 1.0;
        }
        case Space::Kind::lorentz_lambda_p: {
            const auto a = s.phi().pure_power();
            return a && s.p() >= 1.0 && *a * s.p() >= 0.0 && *a <= 1.0 && *a * s.p() <= 1.0;
        }
        case Space::Kind::orlicz: return is_banach(s.child());
        case Space::Kind::convexification: return s.p() >= 1.0 && is_banach(s.child());
        default: return false;
    }
}

struct Convexified {
    std::optional<Space> base;  // nullopt stands for unweighted L^1
    std::string key;
    double exponent;
};

/// Writes s as base^(exponent) with a canonical key for the base.
inline std::optional<Convexified> as_convexification(const Space& s) {
    if (const auto p = s.plain_lp()) {
        if (*p == kInf) return std::nullopt;
        return Convexified{std::nullopt, "L^1", *p};
    }
    if (s.kind() == Space::Kind::orlicz && s.child().plain_lp() == 1.0 &&
        s.young().kind() == YoungFunction::Kind::power && s.young().c() == 1.0) {
        return Convexified{std::nullopt, "L^1", s.young().p()};
    }
    if (s.kind() == Space::Kind::convexification) {
        auto inner = as_convexification(s.child());
        if (!inner) return std::nullopt;
        inner->exponent *= s.p();
        return inner;
    }
    if (s.primitive() && is_banach(s)) return Convexified{s, s.describe(), 1.0};
    return std::nullopt;
}

inline std::vector<double> support_of(const StepFunction& z) {
    std::vector<double> idx;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] > 0.0) idx.push_back(static_cast<double>(i));
    }
    return idx;
}

inline std::vector<double> pow_values(const StepFunction& z, double e) {
    std::vector<double> v(z.values());
    for (double& x : v) x = x == 0.0 ? 0.0 : std::pow(x, e);
    return v;
}

inline std::optional<NormResult> product_closed_form(const Space& e, const Space& f, const StepFunction& z) {
    NormResult r;
    attach_truncation(r, z);
    std::vector<double> chi(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) chi[i] = z[i] > 0.0 ? 1.0 : 0.0;

    if (is_plain_linf(f) || is_plain_linf(e)) {
        const bool f_inf = is_plain_linf(f);
        const auto inner = norm(f_inf ? e : f, z);
        FactorizationWitness w{f_inf ? z : z.with_values(chi), f_inf ? z.with_values(chi) : z, 0, 0, 0,
                               "closed_form", false, true};
        (f_inf ? w.norm_x : w.norm_y) = inner.value;
        (f_inf ? w.norm_y : w.norm_x) = z.is_zero() ? 0.0 : 1.0;
        w.product = w.norm_x * w.norm_y;
        r.value = w.product;
        r.kind = inner.kind;
        r.witness = std::move(w);
        r.notes.push_back("closed form: E . L^inf = E");
        return r;
    }

    const auto ce = as_convexification(e), cf = as_convexification(f);
    if (!ce || !cf || ce->key != cf->key) return std::nullopt;
    const double p = ce->exponent, q = cf->exponent;
    const double rr = 1.0 / (1.0 / p + 1.0 / q);
    const StepFunction x = z.with_values(pow_values(z, rr / p));
    const StepFunction y = z.with_values(pow_values(z, rr / q));
    double value;
    if (!ce->base) {
        value = plain_lp_value(cells_of(z), rr);
    } else {
        bool estimated = false;
        value = std::pow(primitive_value(*ce->base, cells_of(power(z, rr)), estimated), 1.0 / rr);
        if (estimated) r.kind = NormKind::estimate;
    }
    FactorizationWitness w{x, y, norm(e, x).value, norm(f, y).value, 0.0, "closed_form", false, true};
    w.product = w.norm_x * w.norm_y;
    r.value = value;
    r.witness = std::move(w);
    r.notes.push_back("closed form: E^(p) . E^(q) = E^(r)");
    return r;
}

}  // namespace detail

/// Rescales a witness so that both factors have the same norm; pointwise product and norm
/// product are unchanged.
inline FactorizationWitness equalize_norms(const FactorizationWitness& w, const Space&, const Space&) {
    if (!(w.norm_x > 0.0) || !(w.norm_y > 0.0) || !std::isfinite(w.norm_x) || !std::isfinite(w.norm_y)) {
        return w;
    }
    if (w.norm_x == w.norm_y) {
        FactorizationWitness out = w;
        out.equalized = true;
        return out;
    }
    const double s = std::sqrt(w.norm_x / w.norm_y);
    FactorizationWitness out = w;
    out.x = scale(w.x, 1.0 / s);
    out.y = scale(w.y, s);
    out.norm_x = w.norm_x / s;
    out.norm_y = w.norm_y * s;
    out.product = out.norm_x * out.norm_y;
    out.equalized = true;
    return out;
}

/// ||z||_{E.F} = inf ||x||_E ||y||_F over z = x y. Closed forms where the pair is in the table,
/// otherwise a certified upper bound from the optimizer.
inline NormResult product_norm(const Space& e, const Space& f, const StepFunction& z,
                               const ProductOptions& opts = {}) {
    NormResult r;
    detail::attach_truncation(r, z);
    if (z.is_zero()) {
        r.witness = FactorizationWitness{z, z, 0.0, 0.0, 0.0, "closed_form", true, true};
        return r;
    }
    if (!opts.force_optimizer && !opts.monotone) {
        if (auto c = detail::product_closed_form(e, f, z)) {
            c->witness = equalize_norms(*c->witness, e, f);
            return *c;
        }
    }

    std::vector<std::size_t> supp;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] > 0.0) supp.push_back(i);
    }
    if (opts.monotone) {
        if (!z.is_nonincreasing()) throw PreconditionError("monotone factorization needs non-increasing z");
    }
    const std::size_t m = supp.size();
    std::vector<double> logz(m);
    for (std::size_t k = 0; k < m; ++k) logz[k] = std::log(z[supp[k]]);

    detail::SpaceEvaluator eval_e(e, z), eval_f(f, z);
    std::vector<double> xv(z.size(), 0.0), yv(z.size(), 0.0);
    const auto fill = [&](const std::vector<double>& u) {
        for (std::size_t k = 0; k < m; ++k) {
            xv[supp[k]] = std::exp(u[k]);
            yv[supp[k]] = std::exp(logz[k] - u[k]);
        }
    };
    const auto objective = [&](const std::vector<double>& u) {
        fill(u);
        const double a = eval_e(xv);
        if (!std::isfinite(a)) return kInf;
        const double b = eval_f(yv);
        if (!std::isfinite(b)) return kInf;
        return std::log(a) + std::log(b);
    };
    constexpr double kBig = 700.0;
    const auto box = [&](std::size_t i, const std::vector<double>& u) -> std::pair<double, double> {
        double lo = -kBig, hi = kBig;
        if (opts.monotone) {
            // x non-increasing: u[i-1] >= u[i] >= u[i+1]; y non-increasing bounds the drops of u.
            if (i > 0) {
                hi = std::min(hi, u[i - 1]);
                lo = std::max(lo, u[i - 1] - (logz[i - 1] - logz[i]));
            }
            if (i + 1 < m) {
                lo = std::max(lo, u[i + 1]);
                hi = std::min(hi, u[i + 1] + (logz[i] - logz[i + 1]));
            }
        }
        return {lo, hi};
    };

    std::vector<std::vector<double>> starts;
    const int n_starts = std::max(opts.starts, 2);
    for (int k = 1; k < n_starts; ++k) {
        const double theta = static_cast<double>(k) / n_starts;
        std::vector<double> u(m);
        for (std::size_t j = 0; j < m; ++j) u[j] = theta * logz[j];
        starts.push_back(std::move(u));
    }
    starts.emplace_back(m, 0.0);
    for (const auto& w : opts.warm_starts) {
        if (w.size() != z.size()) throw PreconditionError("warm start length does not match the grid");
        std::vector<double> u(m);
        bool ok = true;
        for (std::size_t j = 0; j < m; ++j) {
            if (!(w[supp[j]] > 0.0)) ok = false;
            u[j] = std::log(w[supp[j]]);
        }
        if (ok) starts.push_back(std::move(u));
    }

    detail::DescentOptions d{opts.max_sweeps, opts.rel_tol, opts.prune_after, opts.keep};
    d.unconstrained = !opts.monotone;
    const auto best = detail::coordinate_descent(objective, starts, box, d);

    fill(best.u);
    FactorizationWitness w{z.with_values(xv), z.with_values(yv), 0.0, 0.0, 0.0, "optimizer", false, true};
    w.norm_x = eval_e(xv);
    w.norm_y = eval_f(yv);
    w.product = w.norm_x * w.norm_y;
    w = equalize_norms(w, e, f);
    r.value = w.product;
    r.kind = NormKind::upper_bound;
    if (!best.converged || eval_e.estimated() || eval_f.estimated()) r.kind = NormKind::estimate;
    if (!best.converged) r.notes.push_back("optimizer hit the sweep cap before converging");
    r.notes.push_back("optimizer: " + std::to_string(best.sweeps) + " sweeps, start " +
                      std::to_string(best.start));
    r.witness = std::move(w);
    return r;
}

/// Calderon space E^{1-theta} F^theta through E^(1/(1-theta)) . F^(1/theta).
inline NormResult calderon_norm(const Space& e, const Space& f, double theta, const StepFunction& z,
                                const ProductOptions& opts = {}) {
    if (!(theta > 0.0 && theta < 1.0)) throw DomainError("Calderon space needs 0 < theta < 1");
    return product_norm(Space::convexification(e, 1.0 / (1.0 - theta)), Space::convexification(f, 1.0 / theta),
                        z, opts);
}

namespace detail {

/// Maximizes num(v)/den(v) over positive test functions exp(v) on `supp` (non-increasing when
/// monotone). Also tries every prefix indicator directly. Returns the best ratio found.
template <class Num, class Den>
double ascend_ratio(Num&& num, Den&& den, std::size_t len, const std::vector<std::vector<double>>& seeds,
                    bool monotone, const AscentOptions& o, bool& converged) {
    constexpr double kBig = 700.0;
    std::vector<double> y(len);
    const auto ratio_of = [&](const std::vector<double>& vals) {
        const double d = den(vals);
        if (!(d > 0.0) || !std::isfinite(d)) return 0.0;
        return num(vals) / d;
    };
    double best = 0.0;
    for (std::size_t k = 1; k <= len; ++k) {
        std::fill(y.begin(), y.end(), 0.0);
        std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
        best = std::max(best, ratio_of(y));
    }
    const auto objective = [&](const std::vector<double>& v) {
        for (std::size_t i = 0; i < len; ++i) y[i] = std::exp(v[i]);
        const double r = ratio_of(y);
        return r > 0.0 ? -std::log(r) : kInf;
    };
    const auto box = [&](std::size_t i, const std::vector<double>& v) -> std::pair<double, double> {
        double lo = -kBig, hi = kBig;
        if (monotone) {
            if (i > 0) hi = std::min(hi, v[i - 1]);
            if (i + 1 < len) lo = std::max(lo, v[i + 1]);
        }
        return {lo, hi};
    };
    DescentOptions d{o.max_sweeps, o.rel_tol, 3, 2};
    const auto res = coordinate_descent(objective, seeds, box, d);
    converged = res.converged;
    if (std::isfinite(res.value)) best = std::max(best, std::exp(-res.value));
    return best;
}

inline std::vector<std::vector<double>> ascent_seeds(const std::vector<double>& profile,
                                                     const std::vector<double>& mids, bool monotone) {
    std::vector<std::vector<double>> seeds;
    const std::size_t len = profile.size();
    for (double g : {0.0, 0.5, 1.0, 2.0}) {
        std::vector<double> v(len);
        for (std::size_t i = 0; i < len; ++i) v[i] = g * std::log(profile[i]);
        if (!monotone || std::is_sorted(v.rbegin(), v.rend())) seeds.push_back(std::move(v));
    }
    for (double beta : {0.25, 0.5, 0.75, 1.0}) {
        std::vector<double> v(len);
        for (std::size_t i = 0; i < len; ++i) v[i] = -beta * std::log(mids[i]);
        if (!monotone || std::is_sorted(v.rbegin(), v.rend())) seeds.push_back(std::move(v));
    }
    return seeds;
}

// Restricts a function to its support, rearranged when requested.
struct Restricted {
    StepFunction layout;
    std::vector<std::size_t> cells;  // cells of `layout` carrying the support, in order
};

inline Restricted restrict_support(const StepFunction& f, bool rearranged) {
    StepFunction layout = rearranged ? rearrange(f) : f;
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        if (layout[i] > 0.0) cells.push_back(i);
    }
    return {layout, cells};
}

inline std::vector<double> mids_of(const StepFunction& layout, const std::vector<std::size_t>& cells) {
    std::vector<double> mids;
    const auto& bp = layout.space().breakpoints();
    const double left = layout.space().left();
    for (std::size_t i : cells) mids.push_back(0.5 * (bp[i] + bp[i + 1]) - left + 1e-300);
    return mids;
}

}  // namespace detail

/// sup ||m y||_F / ||y||_E. Table entries first, otherwise a lower bound from witness ascent
/// over non-increasing test functions (for symmetric E, F) or arbitrary ones.
inline NormResult multiplier_norm(const Space& e, const Space& f, const StepFunction& m,
                                  const AscentOptions& opts = {}) {
    NormResult r;
    detail::attach_truncation(r, m);
    if (m.is_zero()) return r;
    if (opts.force_numeric) {
    } else if (detail::is_plain_linf(e)) {
        auto inner = norm(f, m);
        inner.notes.push_back("table: M(L^inf, F) = F");
        return inner;
    }
    const auto pe = e.plain_lp(), pf = f.plain_lp();
    if (opts.force_numeric) {
    } else if (pe && pf && *pe >= *pf) {
        const double inv = 1.0 / *pf - (*pe == kInf ? 0.0 : 1.0 / *pe);
        r.value = detail::plain_lp_value(detail::cells_of(m), inv == 0.0 ? kInf : 1.0 / inv);
        r.notes.push_back("table: M(L^p, L^q) = L^r, 1/r = 1/q - 1/p");
        return r;
    }
    if (pf && *pf == 1.0 && !opts.force_numeric) {
        if (const auto d = dual_descriptor(e)) {
            auto inner = norm(*d, m);
            inner.notes.push_back("table: M(E, L^1) = E'");
            return inner;
        }
    }

    const bool monotone = e.symmetric() && f.symmetric();
    const auto sup = detail::restrict_support(m, monotone);
    const std::size_t len = sup.cells.size();
    detail::SpaceEvaluator eval_e(e, sup.layout), eval_f(f, sup.layout);
    std::vector<double> full(sup.layout.size(), 0.0);
    const auto spread = [&](const std::vector<double>& y, bool times_m) {
        std::fill(full.begin(), full.end(), 0.0);
        for (std::size_t k = 0; k < len; ++k) {
            full[sup.cells[k]] = times_m ? y[k] * sup.layout[sup.cells[k]] : y[k];
        }
        return full;
    };
    const auto num = [&](const std::vector<double>& y) { return eval_f(spread(y, true)); };
    const auto den = [&](const std::vector<double>& y) { return eval_e(spread(y, false)); };
    std::vector<double> profile(len);
    for (std::size_t k = 0; k < len; ++k) profile[k] = sup.layout[sup.cells[k]];
    bool converged = false;
    const double best = detail::ascend_ratio(num, den, len,
                                             detail::ascent_seeds(profile, detail::mids_of(sup.layout, sup.cells), monotone),
                                             monotone, opts, converged);
    r.kind = NormKind::estimate;
    r.value = best;
    r.notes.push_back("lower bound from witness ascent");
    if (!converged) r.notes.push_back("ascent hit the sweep cap before converging");
    if (best > opts.cap) {
        r.infinite = true;
        r.value = kInf;
        r.notes.push_back("ratio exceeded the cap; multiplier not in M(E,F)");
    }
    return r;
}

/// sup integral(x y) over ||x||_E <= 1, by witness ascent (non-increasing x when E is symmetric).
inline NormResult dual_norm_numeric(const Space& e, const StepFunction& y, const AscentOptions& opts = {}) {
    NormResult r;
    detail::attach_truncation(r, y);
    if (y.is_zero()) return r;
    const bool monotone = e.symmetric();
    const auto sup = detail::restrict_support(y, monotone);
    const std::size_t len = sup.cells.size();
    detail::SpaceEvaluator eval_e(e, sup.layout);
    std::vector<double> full(sup.layout.size(), 0.0);
    std::vector<double> terms(len);
    const auto& widths = sup.layout.space().widths();
    const auto num = [&](const std::vector<double>& x) {
        for (std::size_t k = 0; k < len; ++k) {
            const std::size_t i = sup.cells[k];
            terms[k] = x[k] * sup.layout[i] * widths[i];
        }
        return detail::canonical_sum(terms);
    };
    const auto den = [&](const std::vector<double>& x) {
        std::fill(full.begin(), full.end(), 0.0);
        for (std::size_t k = 0; k < len; ++k) full[sup.cells[k]] = x[k];
        return eval_e(full);
    };
    std::vector<double> profile(len);
    for (std::size_t k = 0; k < len; ++k) profile[k] = sup.layout[sup.cells[k]];
    bool converged = false;
    const double best = detail::ascend_ratio(num, den, len,
                                             detail::ascent_seeds(profile, detail::mids_of(sup.layout, sup.cells), monotone),
                                             monotone, opts, converged);
    r.kind = NormKind::estimate;
    r.value = best;
    r.notes.push_back("lower bound from witness ascent");
    if (!converged) r.notes.push_back("ascent hit the sweep cap before converging");
    if (best > opts.cap) {
        r.infinite = true;
        r.value = kInf;
    }
    return r;
}

/// z = x y with ||x||_E ||y||_{E'} <= (1 + eps) ||z||_1; within_epsilon reports whether eps was met.
inline FactorizationWitness lozanovskii_factorize(const Space& e, const StepFunction& z, double eps,
                                                  const ProductOptions& opts = {}) {
    if (!(eps > 0.0)) throw DomainError("factorization needs eps > 0");
    const auto table = dual_descriptor(e);
    const Space dual = table ? *table : Space::dual(e);
    const auto r = product_norm(e, dual, z, opts);
    FactorizationWitness w = *r.witness;
    const double l1 = integrate(z);
    if (w.product < l1 * (1.0 - 1e-9) - 1e-300) {
        throw NumericError("factorization product undercuts the L^1 norm; dual norm is inconsistent");
    }
    w.within_epsilon = w.product <= (1.0 + eps) * l1;
    return w;
}

/// Constructive factorization z = z1 z2 in E_phi1 . E_phi2 from a relation certificate
/// phi^{-1} <= D phi1^{-1} phi2^{-1}; each factor satisfies ||z_i|| <= sqrt(D ||z||_{E_phi}).
inline FactorizationWitness orlicz_factor_witness(const Space& base, const YoungFunction& phi1,
                                                  const YoungFunction& phi2, const YoungFunction& phi,
                                                  const StepFunction& z, const RelationCertificate& cert) {
    if (!cert.holds || cert.direction == Direction::prec || !cert.D) {
        throw PreconditionError("orlicz_factor_witness needs a relation certificate with an upper constant");
    }
    const double D = *cert.D;
    if (z.is_zero()) return FactorizationWitness{z, z, 0.0, 0.0, 0.0, "constructive", false, true};
    const double lambda = norm(Space::orlicz(base, phi), z).value;
    if (!std::isfinite(lambda)) throw PreconditionError("z is not in E_phi");
    std::vector<double> v1(z.size(), 0.0), v2(z.size(), 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] == 0.0) continue;
        const double y = phi(z[i] / lambda);
        const double i1 = phi1.inverse(y), i2 = phi2.inverse(y);
        if (!(i1 > 0.0) || !(i2 > 0.0)) throw PreconditionError("inverse vanishes on the support of z");
        const double s = std::sqrt(z[i] / (i1 * i2));
        v1[i] = s * i1;
        v2[i] = s * i2;
    }
    FactorizationWitness w{z.with_values(v1), z.with_values(v2), 0.0, 0.0, 0.0, "constructive", false, true};
    w.norm_x = norm(Space::orlicz(base, phi1), w.x).value;
    w.norm_y = norm(Space::orlicz(base, phi2), w.y).value;
    w.product = w.norm_x * w.norm_y;
    const double bound = std::sqrt(D * lambda) * (1.0 + 1e-6);
    if (w.norm_x > bound || w.norm_y > bound) {
        throw NumericError("constructive factor exceeds sqrt(D ||z||); relation constant too small");
    }
    return w;
}

namespace detail {

inline NormResult variational_norm(const Space& space, const StepFunction& x) {
    switch (space.kind()) {
        case Space::Kind::product: return product_norm(space.child(0), space.child(1), x);
        case Space::Kind::calderon: return calderon_norm(space.child(0), space.child(1), space.theta(), x);
        case Space::Kind::multiplier: return multiplier_norm(space.child(0), space.child(1), x);
        case Space::Kind::dual: {
            if (const auto d = dual_descriptor(space.child())) {
                auto r = norm(*d, x);
                r.notes.push_back("duality table: " + d->describe());
                return r;
            }
            return dual_norm_numeric(space.child(), x);
        }
        default: throw DomainError("not a variational descriptor: " + space.describe());
    }
}

}  // namespace detail

}  // namespace symspace
