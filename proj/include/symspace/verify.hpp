#pragma once

// Seeded numerical check suites. Each suite turns one claim into a list of instances
// {inputs, lhs, rhs, constant, tolerance, pass}; reports are deterministic functions of the
// configuration and serialize to JSON and CSV.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "symspace/error.hpp"
#include "symspace/grid.hpp"
#include "symspace/json_io.hpp"
#include "symspace/operators.hpp"
#include "symspace/product.hpp"
#include "symspace/quasi_concave.hpp"
#include "symspace/spaces.hpp"
#include "symspace/young.hpp"

namespace symspace::verify {

using nlohmann::json;
using Rng = std::mt19937_64;

enum class ToleranceKind { paper_constant, optimizer_slack, engineering_choice };

inline const char* to_string(ToleranceKind k) {
    switch (k) {
        case ToleranceKind::paper_constant: return "paper_constant";
        case ToleranceKind::optimizer_slack: return "optimizer_slack";
        case ToleranceKind::engineering_choice: return "engineering_choice";
    }
    return "unknown";
}

struct SuiteConfig {
    std::string suite;
    std::optional<std::uint64_t> seed;        // mandatory at run time
    std::vector<std::size_t> grid_sizes;      // empty: suite default
    int instances = 0;                        // 0: suite default
    std::map<std::string, double> tolerances; // overrides by tolerance key
    std::map<std::string, double> params;     // suite parameters by name
    std::string sub;                          // part selector, e.g. "i" for theorem7
    double cap = 50.0;                        // ceiling for measured equivalence constants
    unsigned threads = 1;                     // does not affect results
};

/// One checked inequality. le: lhs <= constant * rhs + slack; eq: |lhs - constant * rhs| <= slack,
/// where slack is the tolerance, scaled by |constant * rhs| when relative.
struct Instance {
    std::string label;
    json inputs = json::object();
    std::string relation = "le";
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 1.0;
    double tolerance = 0.0;
    bool relative = false;
    ToleranceKind tolerance_kind = ToleranceKind::paper_constant;
    bool pass = false;
    json measured = json::object();
};

struct CheckReport {
    std::string suite;
    json config = json::object();
    std::vector<Instance> instances;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::vector<std::string> notes;
    std::string error;  // non-empty when the run itself failed (including zero instances)
    std::string timestamp;

    bool ok() const noexcept { return error.empty() && failed == 0 && !instances.empty(); }
};

// ---------------------------------------------------------------------------------------------
// Instances

inline bool evaluate(const Instance& in) {
    const double bound = in.constant * in.rhs;
    const double slack = in.relative ? in.tolerance * std::abs(bound) : in.tolerance;
    if (std::isnan(in.lhs) || std::isnan(bound)) return false;
    if (in.relation == "eq") return std::abs(in.lhs - bound) <= slack;
    return in.lhs <= bound + slack;
}

inline Instance le(std::string label, json inputs, double lhs, double rhs, double constant, double tolerance,
                   bool relative, ToleranceKind kind) {
    Instance in{std::move(label), std::move(inputs), "le", lhs, rhs, constant, tolerance, relative, kind};
    in.pass = evaluate(in);
    return in;
}

inline Instance eq(std::string label, json inputs, double lhs, double rhs, double tolerance, bool relative,
                   ToleranceKind kind) {
    Instance in{std::move(label), std::move(inputs), "eq", lhs, rhs, 1.0, tolerance, relative, kind};
    in.pass = evaluate(in);
    return in;
}

/// A measured equivalence constant against the configured cap.
inline Instance under_cap(std::string label, json inputs, double measured, double cap) {
    return le(std::move(label), std::move(inputs), measured, cap, 1.0, 0.0, false,
              ToleranceKind::engineering_choice);
}

// ---------------------------------------------------------------------------------------------
// Seeds and random instances

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// Seed of job `index` in `suite`; independent of thread count and of other suites.
inline std::uint64_t instance_seed(std::uint64_t master, const std::string& suite, std::size_t index) {
    return detail::splitmix64(detail::splitmix64(master ^ detail::fnv1a(suite)) + index);
}

namespace detail {

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

inline std::vector<double> right_ends(const MeasureSpace& s) {
    std::vector<double> out(s.cells());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.cells(); ++i) out[i] = (acc += s.width(i));
    return out;
}

inline std::vector<double> mid_points(const MeasureSpace& s) {
    std::vector<double> out(s.cells());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.cells(); ++i) {
        out[i] = acc + 0.5 * s.width(i);
        acc += s.width(i);
    }
    return out;
}

/// Non-increasing positive profile in measure coordinates. Families: power blow-up at 0,
/// exponential decay, logarithmic growth, random steps; each with multiplicative jitter.
inline StepFunction random_profile(Rng& rng, const SpacePtr& grid) {
    const auto mids = mid_points(*grid);
    const double total = grid->total_measure();
    const int family = std::uniform_int_distribution<int>(0, 3)(rng);
    std::vector<double> v(mids.size());
    const double a = uniform(rng, 0.05, 0.9);
    const double b = uniform(rng, 1.0, 8.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = mids[i];
        switch (family) {
            case 0: v[i] = std::pow(t, -a); break;
            case 1: v[i] = std::exp(-b * t / total); break;
            case 2: v[i] = std::pow(1.0 + std::abs(std::log(t)), 2.0 * a); break;
            default: v[i] = std::exp(uniform(rng, -2.0, 2.0)); break;
        }
        v[i] *= std::exp(uniform(rng, -0.3, 0.3));
    }
    std::sort(v.begin(), v.end(), std::greater<>());
    const double s = uniform(rng, 0.5, 2.0) / v.front();
    for (double& x : v) x *= s;
    return StepFunction(grid, std::move(v));
}

/// A random profile with its cells shuffled.
inline StepFunction random_function(Rng& rng, const SpacePtr& grid) {
    auto v = random_profile(rng, grid).values();
    std::shuffle(v.begin(), v.end(), rng);
    return StepFunction(grid, std::move(v));
}

inline json describe_grid(const MeasureSpace& s, const std::string& builder) {
    return {{"builder", builder}, {"kind", to_string(s.kind())}, {"cells", s.cells()}};
}

inline double integral_of_power(const StepFunction& x, double p) {
    // Long-double accumulation; an independent route to ||x||_p^p.
    long double acc = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += std::pow(static_cast<long double>(x[i]), static_cast<long double>(p)) *
               static_cast<long double>(x.space().width(i));
    }
    return static_cast<double>(acc);
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Suite plumbing

/// Collects the jobs of one suite; each job receives its own seeded generator.
class SuiteBuilder {
public:
    using Job = std::function<std::vector<Instance>(Rng&)>;

    explicit SuiteBuilder(const SuiteConfig& c) : config_(c) {}

    void add(Job job) { jobs_.push_back(std::move(job)); }
    void note(std::string text) { notes_.push_back(std::move(text)); }

    const SuiteConfig& config() const noexcept { return config_; }
    std::vector<Job>& jobs() noexcept { return jobs_; }
    std::vector<std::string>& notes() noexcept { return notes_; }

    double tol(const std::string& key, double fallback) const {
        const auto it = config_.tolerances.find(key);
        return it == config_.tolerances.end() ? fallback : it->second;
    }
    double param(const std::string& key, double fallback) const {
        const auto it = config_.params.find(key);
        return it == config_.params.end() ? fallback : it->second;
    }
    int count(int fallback) const { return config_.instances > 0 ? config_.instances : fallback; }
    std::size_t size(std::size_t fallback) const {
        return config_.grid_sizes.empty() ? fallback : config_.grid_sizes.front();
    }
    std::vector<std::size_t> sizes(std::vector<std::size_t> fallback) const {
        return config_.grid_sizes.empty() ? fallback : config_.grid_sizes;
    }
    bool part(const std::string& name) const { return config_.sub.empty() || config_.sub == name; }
    double cap() const noexcept { return config_.cap; }

private:
    const SuiteConfig& config_;
    std::vector<Job> jobs_;
    std::vector<std::string> notes_;
};

namespace detail {

using QC = QuasiConcaveFn;

/// Two-sided equivalence ||z||_target ~ T, where T is known to lie between the optimizer
/// values `low` and `up` of two proxy problems (up already carries its proof constant).
/// Left-hand spaces of the form E . M(E, F) always embed into F with constant 1, so
/// target <= up is a sound check; the two ratios are the measured constants.
inline std::vector<Instance> bracket_instances(const std::string& label, const json& inputs, double target,
                                               double low, double up, double cap) {
    std::vector<Instance> out;
    Instance sound = le(label + ":target<=upper", inputs, target, up, 1.0, 1e-9, true,
                        ToleranceKind::paper_constant);
    out.push_back(sound);
    auto c1 = under_cap(label + ":const_target_over_product", inputs, target / low, cap);
    auto c2 = under_cap(label + ":const_product_over_target", inputs, up / target, cap);
    for (auto* in : {&c1, &c2}) in->measured = {{"target", target}, {"lower_proxy", low}, {"upper_proxy", up}};
    out.push_back(c1);
    out.push_back(c2);
    return out;
}

inline double value_of(const NormResult& r) { return r.infinite ? kInf : r.value; }

// ---- holder_rogers ---------------------------------------------------------------------------

inline void suite_holder_rogers(SuiteBuilder& b) {
    const int count = b.count(20);
    const double tol = b.tol("holder", 1e-12);
    for (std::size_t n : b.sizes({16, 64})) {
        for (const char* builder : {"unit_interval", "counting"}) {
            for (int k = 0; k < count; ++k) {
                b.add([=](Rng& rng) {
                    auto g = make_space(std::string(builder) == "counting" ? MeasureSpace::counting(n)
                                                                         : MeasureSpace::unit_interval(n));
                    const double p = uniform(rng, 1.0, 8.0), q = uniform(rng, 1.0, 8.0);
                    const double r = 1.0 / (1.0 / p + 1.0 / q);
                    const auto x = random_function(rng, g), y = random_function(rng, g);
                    const double lhs = norm_value(Space::lp(r), multiply(x, y));
                    const double rhs = norm_value(Space::lp(p), x) * norm_value(Space::lp(q), y);
                    json in{{"grid", describe_grid(*g, builder)}, {"p", p}, {"q", q}, {"r", r}};
                    return std::vector<Instance>{
                        le("holder", in, lhs, rhs, 1.0, tol, true, ToleranceKind::paper_constant)};
                });
            }
        }
    }
}

// ---- reverse_chebyshev -----------------------------------------------------------------------

inline void suite_reverse_chebyshev(SuiteBuilder& b) {
    const int count = b.count(200);
    const std::size_t n = b.size(32);
    const double tol = b.tol("reverse_chebyshev", 1e-12);
    for (int k = 0; k < count; ++k) {
        b.add([=](Rng& rng) {
            const int kind = k % 3;
            auto g = make_space(kind == 0   ? MeasureSpace::unit_interval(n)
                                : kind == 1 ? MeasureSpace::half_line(n)
                                            : MeasureSpace::counting(n));
            // A is a random nonempty set of cells; x y = a on A.
            std::vector<std::size_t> cells;
            while (cells.empty()) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (uniform(rng, 0.0, 1.0) < 0.4) cells.push_back(i);
                }
            }
            const double a = uniform(rng, 0.1, 10.0);
            const double spread = uniform(rng, 0.1, 8.0);
            long double mu = 0.0L, ix = 0.0L, iy = 0.0L, ixy = 0.0L;
            for (std::size_t i : cells) {
                const double x = std::exp(uniform(rng, -spread, spread));
                const double y = a / x;
                const long double w = g->width(i);
                mu += w;
                ix += x * w;
                iy += y * w;
                ixy += static_cast<long double>(x) * y * w;
            }
            json in{{"grid", describe_grid(*g, to_string(g->kind()))}, {"a", a}, {"cells_in_A", cells.size()},
                    {"log_spread", spread}};
            return std::vector<Instance>{le("reverse_chebyshev", in, static_cast<double>(mu * ixy),
                                            static_cast<double>(ix * iy), 1.0, tol, true,
                                            ToleranceKind::paper_constant)};
        });
    }
}

// ---- fundamental_product ---------------------------------------------------------------------

inline void suite_fundamental_product(SuiteBuilder& b) {
    const std::size_t n = b.size(12);
    const double slack = b.tol("optimizer_slack", 0.02);
    const std::vector<std::pair<Space, Space>> pairs{
        {Space::lp(3.0), Space::lp(6.0)},
        {Space::lorentz_lambda(QC::power(0.6)), Space::marcinkiewicz_star(QC::power(0.3))},
        {Space::lorentz_lambda(QC::power(0.6)), Space::marcinkiewicz(QC::power(0.3))}};
    b.note("M* carries a quasi-norm; for the (Lambda, M*) pair the factors x = (s/t)^0.3, y = (t/s)^0.3 "
           "on [0, t] give ||chi_[0,t]|| <= 0.834 f_E(t) f_F(t), so its lower_bound rows are expected to fail");
    for (const auto& [e, f] : pairs) {
        for (int j = 8; j >= 1; --j) {
            b.add([=, e = e, f = f](Rng&) {
                auto g = make_space(MeasureSpace::dyadic(n));
                const double t = std::exp2(-j);
                const auto chi = StepFunction::indicator(g, 0.0, t);
                const double fe = fundamental(e, t, g).value, ff = fundamental(f, t, g).value;
                const auto r = product_norm(e, f, chi);
                json in{{"grid", describe_grid(*g, "dyadic")}, {"E", e.describe()}, {"F", f.describe()}, {"t", t}};
                auto lower = le("lower_bound", in, fe * ff, r.value, 1.0, 1e-12, true, ToleranceKind::paper_constant);
                auto upper = le("upper_bound", in, r.value, fe * ff, 1.0 + slack, 0.0, false,
                                ToleranceKind::optimizer_slack);
                for (auto* x : {&lower, &upper}) x->measured = {{"kind", to_string(r.kind)}, {"ratio", r.value / (fe * ff)}};
                return std::vector<Instance>{lower, upper};
            });
        }
    }
}

// ---- product_lp ------------------------------------------------------------------------------

inline void suite_product_lp(SuiteBuilder& b) {
    const int count = b.count(50);
    const std::size_t n = b.size(64);
    const int forced = static_cast<int>(b.param("forced_optimizer_instances", 5));
    const double tol = b.tol("product", 1e-4), wtol = b.tol("witness", 1e-10);
    for (int k = 0; k < count; ++k) {
        b.add([=](Rng& rng) {
            auto g = make_space(MeasureSpace::unit_interval(n));
            const auto z = random_function(rng, g);
            const double oracle = std::sqrt(integral_of_power(z, 2.0));
            const Space e = Space::lp(3.0), f = Space::lp(6.0);
            json in{{"grid", describe_grid(*g, "unit_interval")}, {"E", "L^3"}, {"F", "L^6"}};
            std::vector<Instance> out;
            const auto r = product_norm(e, f, z);
            out.push_back(eq("product_equals_L2", in, r.value, oracle, tol, true, ToleranceKind::engineering_choice));
            out.back().measured = {{"kind", to_string(r.kind)}};
            const auto x = power(z, 2.0 / 3.0), y = power(z, 1.0 / 3.0);
            const double w = norm_value(e, x) * norm_value(f, y);
            out.push_back(eq("witness_z^(2/3)", in, w, oracle, wtol, true, ToleranceKind::engineering_choice));
            if (k < forced) {
                ProductOptions o;
                o.force_optimizer = true;
                const auto s = product_norm(e, f, z, o);
                out.push_back(eq("optimizer_equals_L2", in, s.value, oracle, tol, true, ToleranceKind::optimizer_slack));
            }
            return out;
        });
    }
}

// ---- theorem7 --------------------------------------------------------------------------------

inline void suite_theorem7(SuiteBuilder& b) {
    const int count = b.count(20);
    const std::size_t n = b.size(32);
    const double cap = b.cap();
    if (b.part("i")) {
        const double tol = b.tol("sandwich", 1e-6);
        for (int k = 0; k < count; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(n));
                const auto phi = QC::power(0.5), psi = QC::power(0.3);
                const auto z = random_profile(rng, g);
                const double target = norm_value(Space::marcinkiewicz_star(QC::product(phi, psi)), z);
                // x = 1/phi at right cell ends; z / x is dominated by ||z|| / psi.
                ProductOptions o;
                std::vector<double> warm;
                for (double t : right_ends(*g)) warm.push_back(1.0 / phi(t));
                o.warm_starts.push_back(warm);
                const auto r = product_norm(Space::marcinkiewicz_star(phi), Space::marcinkiewicz_star(psi), z, o);
                json in{{"part", "i"}, {"grid", describe_grid(*g, "unit_interval")}, {"phi", "t^0.5"}, {"psi", "t^0.3"}};
                auto up = le("i:product<=M*", in, r.value, target, 1.0, tol, false, ToleranceKind::paper_constant);
                auto dn = le("i:M*<=2product", in, target, r.value, 2.0, tol, false, ToleranceKind::paper_constant);
                for (auto* x : {&up, &dn}) x->measured = {{"ratio", r.value / target}};
                return std::vector<Instance>{up, dn};
            });
        }
    }
    if (b.part("ii")) {
        const std::vector<std::pair<double, double>> exps{{0.5, 0.3}, {0.7, 0.2}};
        for (const auto& [alpha, beta] : exps) {
            for (int k = 0; k < std::max(1, count / 2); ++k) {
                b.add([=](Rng& rng) {
                    auto g = make_space(MeasureSpace::unit_interval(std::min<std::size_t>(n, 24)));
                    const auto phi = QC::power(alpha), psi = QC::power(beta), prod = QC::product(phi, psi);
                    const double a = simonenko_indices(phi).lower, bb = simonenko_indices(prod).lower;
                    const auto z = random_profile(rng, g);
                    const double target = norm_value(Space::lorentz_lambda(prod), z);
                    const auto r = product_norm(Space::lorentz_lambda(phi), Space::marcinkiewicz_star(psi), z);
                    json in{{"part", "ii"}, {"grid", describe_grid(*g, "unit_interval")},
                            {"phi_exponent", alpha}, {"psi_exponent", beta}, {"a", a}, {"b", bb}};
                    auto first = le("ii:Lambda<=(4+4/a)product", in, target, r.value, 4.0 + 4.0 / a, 1e-9, true,
                                    ToleranceKind::paper_constant);
                    auto second = le("ii:product<=(2/b)Lambda", in, r.value, target, 2.0 / bb, 1e-9, true,
                                     ToleranceKind::paper_constant);
                    for (auto* x : {&first, &second}) {
                        x->measured = {{"product_over_target", r.value / target}, {"target_over_product", target / r.value}};
                    }
                    return std::vector<Instance>{first, second};
                });
            }
        }
    }
    if (b.part("iii")) {
        const auto phi = QC::power(0.5), psi = QC::power(0.3), prod = QC::product(phi, psi);
        struct Case {
            std::string name;
            Space e, f, target;
        };
        const std::vector<Case> cases{
            {"Lambda1.Lambda1=Lambda_half", Space::lorentz_lambda_p(phi, 1.0), Space::lorentz_lambda_p(psi, 1.0),
             Space::lorentz_lambda_p(prod, 0.5)},
            {"Lambda1.M*=Lambda1", Space::lorentz_lambda_p(phi, 1.0), Space::marcinkiewicz_star(psi),
             Space::lorentz_lambda_p(prod, 1.0)},
            {"M*.M*=M*", Space::marcinkiewicz_star(phi), Space::marcinkiewicz_star(psi),
             Space::marcinkiewicz_star(prod)}};
        for (const auto& c : cases) {
            for (int k = 0; k < std::max(1, count / 2); ++k) {
                b.add([=](Rng& rng) {
                    auto g = make_space(MeasureSpace::unit_interval(std::min<std::size_t>(n, 24)));
                    const auto z = random_profile(rng, g);
                    const double target = norm_value(c.target, z);
                    const auto r = product_norm(c.e, c.f, z);
                    json in{{"part", "iii"}, {"case", c.name}, {"grid", describe_grid(*g, "unit_interval")}};
                    auto c1 = under_cap("iii:" + c.name + ":const_target_over_product", in, target / r.value, cap);
                    auto c2 = under_cap("iii:" + c.name + ":const_product_over_target", in, r.value / target, cap);
                    return std::vector<Instance>{c1, c2};
                });
            }
        }
    }
}

// ---- oplus_sandwich --------------------------------------------------------------------------

inline void suite_oplus_sandwich(SuiteBuilder& b) {
    const int points = static_cast<int>(b.param("points", 2048));
    const double tol = b.tol("sandwich", 1e-9);
    using Y = YoungFunction;
    const std::vector<std::pair<std::string, std::pair<Y, Y>>> pairs{
        {"u^2,u^2", {Y::power(1.0, 2.0), Y::power(1.0, 2.0)}},
        {"u^2,u^3", {Y::power(1.0, 2.0), Y::power(1.0, 3.0)}},
        {"u^1.5,3u^4", {Y::power(1.0, 1.5), Y::power(3.0, 4.0)}},
        {"shifted(0.5,1,2),u^3", {Y::shifted_power(0.5, 1.0, 2.0), Y::power(1.0, 3.0)}}};
    for (const auto& [name, pr] : pairs) {
        b.add([=, name = name, pr = pr](Rng&) {
            const auto phi = Y::oplus(pr.first, pr.second);
            double worst = -kInf, worst_t = 0.0;
            for (int i = 0; i < points; ++i) {
                const double t = std::pow(10.0, -4.0 + 8.0 * i / (points - 1));
                const double ex = oplus_sandwich_excess(pr.first, pr.second, phi, t);
                if (ex > worst) {
                    worst = ex;
                    worst_t = t;
                }
            }
            json in{{"pair", name}, {"points", points}, {"t_range", {1e-4, 1e4}}};
            auto out = le("sandwich_max_excess", in, worst, 0.0, 1.0, tol, false, ToleranceKind::engineering_choice);
            out.measured = {{"worst_t", worst_t}};
            return std::vector<Instance>{out};
        });
    }
    b.add([=](Rng&) {
        const auto sq = Y::power(1.0, 2.0);
        const auto phi = Y::oplus(sq, sq);
        double worst = 0.0;
        for (int i = 0; i < 512; ++i) {
            const double u = std::pow(10.0, -3.0 + 6.0 * i / 511.0);
            worst = std::max(worst, std::abs(phi(u) - 2.0 * u) / (2.0 * u));
        }
        json in{{"pair", "u^2,u^2"}, {"points", 512}, {"u_range", {1e-3, 1e3}}};
        return std::vector<Instance>{
            le("oplus_equals_2u", in, worst, 0.0, 1.0, b.tol("oplus_closed_form", 1e-8), false,
               ToleranceKind::engineering_choice)};
    });
}

// ---- theorem6 --------------------------------------------------------------------------------

inline void suite_theorem6(SuiteBuilder& b) {
    const int count = b.count(5);
    const std::size_t n = b.size(16);
    const double cap = b.cap();
    using Y = YoungFunction;
    const std::vector<std::pair<std::string, std::pair<Y, Y>>> pairs{
        {"u^2,u^2", {Y::power(1.0, 2.0), Y::power(1.0, 2.0)}},
        {"u^2,u^4", {Y::power(1.0, 2.0), Y::power(1.0, 4.0)}},
        {"2u^3,u^1.5", {Y::power(2.0, 3.0), Y::power(1.0, 1.5)}}};
    const Space base = Space::lp(1.0);
    for (const auto& [name, pr] : pairs) {
        for (int k = 0; k < count; ++k) {
            b.add([=, name = name, pr = pr](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(n));
                const auto z = random_function(rng, g);
                const auto phi = Y::oplus(pr.first, pr.second);
                const double target = norm_value(Space::orlicz(base, phi), z);
                const auto r = product_norm(Space::orlicz(base, pr.first), Space::orlicz(base, pr.second), z);
                json in{{"pair", name}, {"base", "L^1"}, {"grid", describe_grid(*g, "unit_interval")}};
                auto c1 = under_cap("const_target_over_product", in, target / r.value, cap);
                auto c2 = under_cap("const_product_over_target", in, r.value / target, cap);
                for (auto* x : {&c1, &c2}) x->measured = {{"kind", to_string(r.kind)}};
                return std::vector<Instance>{c1, c2};
            });
        }
    }
}

// ---- theorem5_witness ------------------------------------------------------------------------

inline void suite_theorem5_witness(SuiteBuilder& b) {
    const int count = b.count(20);
    const std::size_t n = b.size(32);
    const double ntol = b.tol("witness_norm", 1e-8), ptol = b.tol("witness_product", 1e-10);
    using Y = YoungFunction;
    struct Case {
        std::string name;
        Y phi, phi1, phi2;
        int share;  // instances per `count`, in percent
    };
    const std::vector<Case> cases{
        {"u^2=u^4.u^4", Y::power(1.0, 2.0), Y::power(1.0, 4.0), Y::power(1.0, 4.0), 100},
        {"shifted(0.25,1,2)=shifted(0.5,1,4)^2", Y::shifted_power(0.25, 1.0, 2.0), Y::shifted_power(0.5, 1.0, 4.0),
         Y::shifted_power(0.5, 1.0, 4.0), 50}};
    const Space base = Space::lp(1.0);
    for (const auto& c : cases) {
        const int m = std::max(1, count * c.share / 100);
        for (int k = 0; k < m; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(n));
                const auto z = random_function(rng, g);
                const auto cert = check_relation(c.phi1, c.phi2, c.phi, Regime::all, Direction::succ);
                json in{{"case", c.name}, {"base", "L^1"}, {"grid", describe_grid(*g, "unit_interval")}};
                if (!cert.holds || !cert.D) {
                    return std::vector<Instance>{le("certificate", in, 1.0, 0.0, 1.0, 0.0, false,
                                                    ToleranceKind::paper_constant)};
                }
                const double D = *cert.D;
                in["D"] = D;
                const double lambda = norm_value(Space::orlicz(base, c.phi), z);
                const auto w = orlicz_factor_witness(base, c.phi1, c.phi2, c.phi, z, cert);
                const double bound = std::sqrt(D * lambda);
                double defect = 0.0;
                for (std::size_t i = 0; i < z.size(); ++i) {
                    defect = std::max(defect, std::abs(w.x[i] * w.y[i] - z[i]) / std::max(1.0, z[i]));
                }
                return std::vector<Instance>{
                    le("norm_z1<=sqrt(D|z|)", in, w.norm_x, bound, 1.0, ntol, false, ToleranceKind::paper_constant),
                    le("norm_z2<=sqrt(D|z|)", in, w.norm_y, bound, 1.0, ntol, false, ToleranceKind::paper_constant),
                    le("z1*z2=|z|", in, defect, 0.0, 1.0, ptol, false, ToleranceKind::engineering_choice)};
            });
        }
    }
}

// ---- lozanovskii -----------------------------------------------------------------------------

inline void suite_lozanovskii(SuiteBuilder& b) {
    const int count = b.count(20);
    const std::size_t n = std::min<std::size_t>(b.size(16), 32);
    const double eps = b.param("eps", 0.05);
    const std::vector<std::pair<std::string, Space>> spaces{
        {"L^1.5", Space::lp(1.5)},
        {"L^3", Space::lp(3.0)},
        {"Lambda[t^0.6]", Space::lorentz_lambda(QC::power(0.6))},
        {"(L^1)_{u^2}", Space::orlicz(Space::lp(1.0), YoungFunction::power(1.0, 2.0))}};
    for (const auto& [name, e] : spaces) {
        for (int k = 0; k < count; ++k) {
            b.add([=, name = name, e = e](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(n));
                const auto z = random_function(rng, g);
                const double l1 = integrate(z);
                const auto w = lozanovskii_factorize(e, z, eps);
                json in{{"E", name}, {"eps", eps}, {"grid", describe_grid(*g, "unit_interval")}};
                auto up = le("product<=(1+eps)|z|_1", in, w.product, l1, 1.0 + eps, 0.0, false,
                             ToleranceKind::paper_constant);
                auto floor = le("holder_floor", in, l1, w.product, 1.0, 1e-9, false, ToleranceKind::paper_constant);
                for (auto* x : {&up, &floor}) x->measured = {{"ratio", w.product / l1}, {"method", w.method}};
                return std::vector<Instance>{up, floor};
            });
        }
    }
}

// ---- cancellation ----------------------------------------------------------------------------

inline void suite_cancellation(SuiteBuilder& b) {
    const int count = b.count(10);
    const std::size_t n = std::min<std::size_t>(b.size(8), 8);
    const double lo = b.param("ratio_low", 0.8), hi = b.param("ratio_high", 1.25);
    const double theta = b.param("theta", 0.5);
    const Space e = Space::lp(2.0), f = Space::lp(4.0), gsp = Space::lp(3.0);
    AscentOptions numeric;
    numeric.force_numeric = true;
    const auto ratio_pair = [=](const std::string& label, const json& in, double a, double c) {
        auto first = le(label + ":lhs<=hi*rhs", in, a, c, hi, 0.0, false, ToleranceKind::optimizer_slack);
        auto second = le(label + ":rhs<=lhs/lo", in, c, a, 1.0 / lo, 0.0, false, ToleranceKind::optimizer_slack);
        for (auto* x : {&first, &second}) x->measured = {{"ratio", a / c}};
        return std::vector<Instance>{first, second};
    };
    for (int k = 0; k < count; ++k) {
        b.add([=](Rng& rng) {
            auto g = make_space(MeasureSpace::counting(n));
            const auto m = random_function(rng, g);
            json in{{"E", "l^2"}, {"F", "l^4"}, {"G", "l^3"}, {"grid", describe_grid(*g, "counting")}};
            const double a = value_of(multiplier_norm(Space::product(e, f), Space::product(e, gsp), m, numeric));
            const double c = value_of(multiplier_norm(f, gsp, m, numeric));
            auto out = ratio_pair("cancellation", in, a, c);
            // M(G, E) against M(G^{1-theta} F^theta, E^{1-theta} F^theta)^{(1-theta)}.
            json in2 = in;
            in2["theta"] = theta;
            const double direct = value_of(multiplier_norm(gsp, e, m, numeric));
            const double inner = value_of(multiplier_norm(Space::calderon(gsp, f, theta), Space::calderon(e, f, theta),
                                                          power(m, 1.0 - theta), numeric));
            const auto more = ratio_pair("calderon_form", in2, direct, std::pow(inner, 1.0 / (1.0 - theta)));
            out.insert(out.end(), more.begin(), more.end());
            return out;
        });
    }
}

// ---- duality_product -------------------------------------------------------------------------

inline void suite_duality_product(SuiteBuilder& b) {
    const int count = b.count(5);
    const double slack = b.tol("duality", 0.10);
    struct Case {
        std::string name;
        Space e, f;
        bool counting;
        std::size_t n;
    };
    const std::vector<Case> cases{
        {"l^2,l^4", Space::lp(2.0), Space::lp(4.0), true, 6},
        {"l^3,l^3", Space::lp(3.0), Space::lp(3.0), true, 6},
        {"Lambda[t^0.6],Linf", Space::lorentz_lambda(QC::power(0.6)), Space::lp(kInf), false, 8}};
    AscentOptions numeric;
    numeric.force_numeric = true;
    for (const auto& c : cases) {
        for (int k = 0; k < count; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(c.counting ? MeasureSpace::counting(c.n) : MeasureSpace::unit_interval(c.n));
                const auto y = random_profile(rng, g);
                const double dual = value_of(dual_norm_numeric(Space::product(c.e, c.f), y, numeric));
                const double mult = value_of(multiplier_norm(c.f, Space::dual(c.e), y, numeric));
                json in{{"case", c.name}, {"grid", describe_grid(*g, c.counting ? "counting" : "unit_interval")}};
                auto first = le("dual<=(1+s)multiplier", in, dual, mult, 1.0 + slack, 0.0, false,
                                ToleranceKind::optimizer_slack);
                auto second = le("multiplier<=(1+s)dual", in, mult, dual, 1.0 + slack, 0.0, false,
                                 ToleranceKind::optimizer_slack);
                for (auto* x : {&first, &second}) x->measured = {{"ratio", dual / mult}};
                return std::vector<Instance>{first, second};
            });
        }
    }
}

// ---- theorem10 -------------------------------------------------------------------------------

inline void suite_theorem10(SuiteBuilder& b) {
    const int count = b.count(8);
    const std::size_t n = b.size(16);
    const double cap = b.cap();
    // psi / phi must be non-decreasing, so the psi exponent is the larger one.
    const std::vector<std::pair<double, double>> exps{{0.3, 0.7}, {0.5, 0.8}};
    for (const auto& [a, bexp] : exps) {
        for (int k = 0; k < count; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(n));
                const auto z = random_profile(rng, g);
                const auto phi = QC::power(a), omega = QC::power(bexp - a);
                const double s = simonenko_indices(phi).lower;
                const double target = norm_value(Space::lorentz_lambda(QC::power(bexp)), z);
                const double low = product_norm(Space::lorentz_lambda(phi), Space::marcinkiewicz(omega), z).value;
                const double up = product_norm(Space::lorentz_lambda(phi), Space::marcinkiewicz_star(omega), z).value / s;
                json in{{"phi_exponent", a}, {"psi_exponent", bexp}, {"grid", describe_grid(*g, "unit_interval")}};
                return bracket_instances("Lambda.M(Lambda,Lambda)=Lambda", in, target, low, up, cap);
            });
        }
    }
}

// ---- example3_4 ------------------------------------------------------------------------------

inline void suite_example3_4(SuiteBuilder& b) {
    const int count = b.count(5);
    const std::size_t n = b.size(16);
    const double cap = b.cap();
    const auto add_case = [&](const std::string& name, std::function<std::vector<Instance>(const StepFunction&, json)> fn) {
        for (int k = 0; k < count; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(n));
                const auto z = random_profile(rng, g);
                return fn(z, json{{"case", name}, {"grid", describe_grid(*g, "unit_interval")}});
            });
        }
    };
    // L^{p,1} = L^{q,1} . M(L^{q,1}, L^{p,1}); M(...) sits between M_w (constant 1) and M*_w (constant q).
    for (const auto& [p, q] : std::vector<std::pair<double, double>>{{2.0, 4.0}, {1.5, 3.0}}) {
        add_case("3a:p=" + std::to_string(p) + ",q=" + std::to_string(q), [=](const StepFunction& z, json in) {
            const auto w = QC::power(1.0 / p - 1.0 / q);
            const double target = norm_value(Space::lorentz_p1(p), z);
            const double low = product_norm(Space::lorentz_p1(q), Space::marcinkiewicz(w), z).value;
            const double up = q * product_norm(Space::lorentz_p1(q), Space::marcinkiewicz_star(w), z).value;
            return bracket_instances("3a", in, target, low, up, cap);
        });
    }
    // L^{p,inf} = L^{q,inf} . M(L^{q,inf}, L^{p,inf}); the multiplier is M*_{t^{1/p-1/q}} up to ||D_2|| = 2^{1/p}.
    for (const auto& [p, q] : std::vector<std::pair<double, double>>{{2.0, 4.0}, {1.5, 6.0}}) {
        add_case("3b:p=" + std::to_string(p) + ",q=" + std::to_string(q), [=](const StepFunction& z, json in) {
            const double target = norm_value(Space::marcinkiewicz_star(QC::power(1.0 / p)), z);
            const double low = product_norm(Space::marcinkiewicz_star(QC::power(1.0 / q)),
                                            Space::marcinkiewicz_star(QC::power(1.0 / p - 1.0 / q)), z)
                                   .value;
            return bracket_instances("3b", in, target, low, std::exp2(1.0 / p) * low, cap);
        });
    }
    // L^{p,1} = L^{q,inf} . M(L^{q,inf}, L^{p,1}); the multiplier is (1/p) Lambda_{t^{1/p-1/q},1} up to 2^{1/p}.
    for (const auto& [p, q] : std::vector<std::pair<double, double>>{{2.0, 4.0}}) {
        add_case("3c:p=" + std::to_string(p) + ",q=" + std::to_string(q), [=](const StepFunction& z, json in) {
            const double target = norm_value(Space::lorentz_p1(p), z);
            const double low =
                product_norm(Space::marcinkiewicz_star(QC::power(1.0 / q)),
                             Space::lorentz_lambda_p(QC::power(1.0 / p - 1.0 / q, 1.0 / p), 1.0), z)
                    .value;
            return bracket_instances("3c", in, target, low, std::exp2(1.0 / p) * low, cap);
        });
    }
    // L^{p,r} = L^{q,r} . M(L^{q,r}, L^{p,r}) for r <= p < q, through r-convexification.
    for (const auto& [p, q, r] : std::vector<std::tuple<double, double, double>>{{2.0, 3.0, 2.0}, {3.0, 5.0, 2.0}}) {
        add_case("4:p=" + std::to_string(p) + ",q=" + std::to_string(q) + ",r=" + std::to_string(r),
                 [=](const StepFunction& z, json in) {
                     const auto w = QC::power(r / p - r / q);
                     const double norming = std::pow(p / q, 1.0 / r);
                     const double target = norm_value(Space::lorentz_pq(p, r), z);
                     const double low = norming * product_norm(Space::lorentz_pq(q, r),
                                                               Space::convexification(Space::marcinkiewicz(w), r), z)
                                                      .value;
                     const double up =
                         norming * std::pow(q / r, 1.0 / r) *
                         product_norm(Space::lorentz_pq(q, r), Space::convexification(Space::marcinkiewicz_star(w), r), z)
                             .value;
                     return bracket_instances("4", in, target, low, up, cap);
                 });
    }
}

// ---- theorem11_instances ---------------------------------------------------------------------

inline void suite_theorem11(SuiteBuilder& b) {
    const int count = b.count(5);
    const std::size_t n = b.size(16);
    const std::size_t small = std::min<std::size_t>(n, 8);
    const double cap = b.cap();
    // F = M*_phi . M(M*_phi, F) with M(M*_phi, F) equal to F(1/phi)^(*) up to ||D_2||_F = 2^{1/p}.
    // For F = L^{p,r} and phi = t^{1/s} that space is Lambda_{t^{1/p-1/s}, r}.
    struct Star {
        std::string name;
        double p, r, s;
    };
    const std::vector<Star> stars{{"5a:L^{2,inf}.M(L^{2,inf},L^1)=L^1", 1.0, 1.0, 2.0},
                                  {"5a:L^{4,inf}.M(L^{4,inf},L^2)=L^2", 2.0, 2.0, 4.0},
                                  {"5b:L^{3,inf}.M(L^{3,inf},L^{2,1})=L^{2,1}", 2.0, 1.0, 3.0}};
    for (const auto& c : stars) {
        for (int k = 0; k < count; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(n));
                const auto z = random_profile(rng, g);
                const Space target_space = c.p == c.r ? Space::lp(c.p) : Space::lorentz_pq(c.p, c.r);
                const double target = norm_value(target_space, z);
                const double low = product_norm(Space::marcinkiewicz_star(QC::power(1.0 / c.s)),
                                                Space::lorentz_lambda_p(QC::power(1.0 / c.p - 1.0 / c.s), c.r), z)
                                       .value;
                json in{{"case", c.name}, {"grid", describe_grid(*g, "unit_interval")}};
                return bracket_instances(c.name, in, target, low, std::exp2(1.0 / c.p) * low, cap);
            });
        }
    }
    // F = L^q . M(L^q, F) for F = L^{r,1}, r < q: split z = x (z / x) over a witness family and
    // price z / x by the numeric multiplier norm. Both directions are measured estimates.
    for (const auto& [r, q] : std::vector<std::pair<double, double>>{{2.0, 4.0}}) {
        for (int k = 0; k < count; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(small));
                const auto z = random_profile(rng, g);
                const Space e = Space::lp(q), f = Space::lorentz_p1(r);
                const double target = norm_value(f, z);
                double best = kInf;
                for (double s : {0.25, 0.5, 0.75, 1.0}) {
                    const auto x = power(z, s);
                    std::vector<double> yv(z.size());
                    for (std::size_t i = 0; i < z.size(); ++i) yv[i] = z[i] / x[i];
                    const double m = value_of(multiplier_norm(e, f, z.with_values(yv)));
                    best = std::min(best, norm_value(e, x) * m);
                }
                json in{{"case", "5a:L^q.M(L^q,L^{r,1})=L^{r,1}"}, {"q", q}, {"r", r},
                        {"grid", describe_grid(*g, "unit_interval")}};
                auto c1 = under_cap("5a:L^q:const_target_over_product", in, target / best, cap);
                auto c2 = under_cap("5a:L^q:const_product_over_target", in, best / target, cap);
                return std::vector<Instance>{c1, c2};
            });
        }
    }
}

// ---- perfectness -----------------------------------------------------------------------------

inline void suite_perfectness(SuiteBuilder& b) {
    const int count = b.count(8);
    const std::size_t n = std::min<std::size_t>(b.size(5), 8);
    const double slack = b.tol("optimizer_slack", 0.10);
    const std::vector<std::pair<double, double>> pairs{{4.0, 2.0}, {3.0, 1.0}};
    AscentOptions numeric;
    numeric.force_numeric = true;
    for (const auto& [pe, pf] : pairs) {
        for (int k = 0; k < count; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(MeasureSpace::counting(n));
                const auto m = random_function(rng, g);
                const Space e = Space::lp(pe), f = Space::lp(pf);
                const double direct = norm_value(e, m);
                const double twice = value_of(multiplier_norm(Space::multiplier(e, f), f, m, numeric));
                json in{{"E", "l^" + std::to_string(pe)}, {"F", "l^" + std::to_string(pf)},
                        {"grid", describe_grid(*g, "counting")}};
                // The numeric multiplier is a lower bound, so only the lower side carries slack.
                auto up = le("M(M(E,F),F)<=E", in, twice, direct, 1.0, 1e-9, true, ToleranceKind::paper_constant);
                auto dn = le("E<=M(M(E,F),F)", in, direct, twice, 1.0 + slack, 0.0, false,
                             ToleranceKind::optimizer_slack);
                for (auto* x : {&up, &dn}) x->measured = {{"ratio", twice / direct}};
                return std::vector<Instance>{up, dn};
            });
        }
    }
}

// ---- hardy_identity --------------------------------------------------------------------------

inline void suite_hardy_identity(SuiteBuilder& b) {
    const int count = b.count(100);
    const std::size_t n = b.size(32);
    const double tol = b.tol("residual", 1e-8);
    for (int k = 0; k < count; ++k) {
        b.add([=](Rng& rng) {
            const bool half = k % 2 == 1;
            auto g = make_space(half ? MeasureSpace::half_line(n) : MeasureSpace::unit_interval(n));
            std::vector<double> v(n);
            for (double& x : v) x = uniform(rng, 0.0, 5.0);
            const StepFunction x(g, std::move(v));
            json in{{"grid", describe_grid(*g, half ? "half_line" : "unit_interval")}};
            return std::vector<Instance>{le("HH*-H-H*", in, hardy_identity_residual(x), 0.0, 1.0, tol, false,
                                            ToleranceKind::engineering_choice)};
        });
    }
}

// ---- lemma4_instances ------------------------------------------------------------------------

/// Hardy-operator bounds on L^p with multiplicative power weight t^g (norm ||x t^g||_p):
/// ||H|| = 1 / (1 - 1/p - g), ||H*|| = 1 / (g + 1/p), ||D_2|| on decreasing functions 2^{1/p + g}.
struct WeightedLp {
    double p;
    double g;
    Space space() const { return Space::lp(p, QC::power(g)); }
    double inv_p() const { return std::isfinite(p) ? 1.0 / p : 0.0; }
    double hardy() const { return 1.0 / (1.0 - inv_p() - g); }
    double hardy_dual() const { return 1.0 / (g + inv_p()); }
    double dilation2() const { return std::exp2(inv_p() + g); }
};

inline void suite_lemma4(SuiteBuilder& b) {
    const int count = b.count(5);
    const std::size_t n = b.size(16);
    struct Case {
        std::string name;
        WeightedLp e, f;
        double theta;
    };
    const std::vector<Case> cases{{"L^1(t^-0.5),Linf(t^0.5)", {1.0, -0.5}, {kInf, 0.5}, 0.5},
                                  {"L^2(t^0.1),Linf(t^0.4)", {2.0, 0.1}, {kInf, 0.4}, 0.3}};
    for (const auto& c : cases) {
        for (int k = 0; k < count; ++k) {
            b.add([=](Rng& rng) {
                auto g = make_space(MeasureSpace::unit_interval(n));
                const auto z = random_function(rng, g);
                const auto zs = rearrange(z);
                // E^theta F^{1-theta} of weighted L^p is L^p(w) with 1/p = theta/p0 + (1-theta)/p1.
                const double inv_p = c.theta * c.e.inv_p() + (1.0 - c.theta) * c.f.inv_p();
                const double p = inv_p > 0.0 ? 1.0 / inv_p : kInf;
                const Space mixed = Space::lp(p, QC::power(c.theta * c.e.g + (1.0 - c.theta) * c.f.g));
                const double t = 1.0 - c.theta;  // calderon(E, F, t) is E^{1-t} F^t
                const auto mix = [&](double x, double y) { return std::pow(x, c.theta) * std::pow(y, 1.0 - c.theta); };
                const double c1 = mix(c.e.dilation2(), c.f.dilation2());
                const double c2 = mix(c.e.hardy() * c.e.hardy_dual(), c.f.hardy() * c.f.hardy_dual());
                const double c3 = mix(c.e.hardy() * c.e.hardy() * c.e.hardy() * c.e.hardy_dual(),
                                      c.f.hardy() * c.f.hardy() * c.f.hardy() * c.f.hardy_dual());
                const auto sym = [](const Space& s, SymMode m) { return Space::symmetrization(s, m); };
                const double a1 = calderon_norm(sym(c.e.space(), SymMode::star), sym(c.f.space(), SymMode::star), t, z).value;
                const double b1 = norm_value(mixed, zs);
                const double a2 =
                    calderon_norm(sym(c.e.space(), SymMode::doublestar), sym(c.f.space(), SymMode::doublestar), t, z).value;
                const double b2 = norm_value(sym(mixed, SymMode::doublestar), z);
                json in{{"case", c.name}, {"theta", c.theta}, {"grid", describe_grid(*g, "unit_interval")},
                        {"C1", c1}, {"C2", c2}, {"C3", c3}};
                std::vector<Instance> out{
                    le("star:left(C1)", in, b1, a1, c1, 1e-9, true, ToleranceKind::paper_constant),
                    le("star:right(C2)", in, a1, b1, c2, 1e-9, true, ToleranceKind::paper_constant),
                    le("doublestar:left(1)", in, b2, a2, 1.0, 1e-9, true, ToleranceKind::paper_constant),
                    le("doublestar:right(C3)", in, a2, b2, c3, 1e-9, true, ToleranceKind::paper_constant)};
                out[0].measured = out[1].measured = {{"calderon_of_star", a1}, {"star_of_calderon", b1}};
                out[2].measured = out[3].measured = {{"calderon_of_doublestar", a2}, {"doublestar_of_calderon", b2}};
                return out;
            });
        }
    }
}

// ---- negative_example2 -----------------------------------------------------------------------

inline void suite_negative_example2(SuiteBuilder& b) {
    const double p = b.param("p", 2.0);
    const double growth = b.param("growth", 1.5);
    const auto sizes = b.sizes({64, 128, 256, 512, 1024});
    b.add([=](Rng&) {
        std::vector<double> ratios;
        for (std::size_t n : sizes) {
            auto g = make_space(MeasureSpace::unit_interval(n));
            std::vector<double> v;
            for (double t : right_ends(*g)) v.push_back(std::pow(t, -1.0 / p) / (1.0 + std::log(1.0 / t)));
            const StepFunction z(g, std::move(v));
            const double prod = product_norm(Space::lorentz_p1(p), Space::lp(kInf), z).value;
            ratios.push_back(prod / norm_value(Space::lp(p), z));
        }
        std::vector<Instance> out;
        for (std::size_t i = 1; i < sizes.size(); ++i) {
            json in{{"p", p}, {"n_from", sizes[i - 1]}, {"n_to", sizes[i]}};
            out.push_back(le("ratio_increases", in, ratios[i - 1], ratios[i], 1.0, 0.0, false,
                             ToleranceKind::engineering_choice));
        }
        json in{{"p", p}, {"sizes", sizes}, {"ratios", ratios}};
        out.push_back(le("growth>=" + std::to_string(growth).substr(0, 4), in, growth, ratios.back() / ratios.front(),
                         1.0, 0.0, false, ToleranceKind::engineering_choice));
        return out;
    });
}

struct Registered {
    const char* name;
    void (*build)(SuiteBuilder&);
};

inline const std::vector<Registered>& registry() {
    static const std::vector<Registered> suites{
        {"holder_rogers", suite_holder_rogers},
        {"reverse_chebyshev", suite_reverse_chebyshev},
        {"fundamental_product", suite_fundamental_product},
        {"product_lp", suite_product_lp},
        {"theorem7", suite_theorem7},
        {"oplus_sandwich", suite_oplus_sandwich},
        {"theorem6", suite_theorem6},
        {"theorem5_witness", suite_theorem5_witness},
        {"lozanovskii", suite_lozanovskii},
        {"cancellation", suite_cancellation},
        {"duality_product", suite_duality_product},
        {"theorem10", suite_theorem10},
        {"example3_4", suite_example3_4},
        {"theorem11_instances", suite_theorem11},
        {"perfectness", suite_perfectness},
        {"hardy_identity", suite_hardy_identity},
        {"lemma4_instances", suite_lemma4},
        {"negative_example2", suite_negative_example2}};
    return suites;
}

/// Runs f(0..n-1) on up to `threads` workers; the first exception (by index) is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    std::vector<std::exception_ptr> errors(n);
    const auto work = [&](std::size_t i) {
        try {
            f(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::min<std::size_t>(threads, n); ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) work(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

inline std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace detail

inline std::vector<std::string> registered_suites() {
    std::vector<std::string> out;
    for (const auto& s : detail::registry()) out.emplace_back(s.name);
    return out;
}

inline json to_json(const SuiteConfig& c) {
    return {{"suite", c.suite},
            {"seed", c.seed ? json(*c.seed) : json(nullptr)},
            {"grid_sizes", c.grid_sizes},
            {"instances", c.instances},
            {"tolerances", c.tolerances},
            {"params", c.params},
            {"sub", c.sub},
            {"cap", c.cap}};
}

/// Runs one registered suite. Job failures become failing instances labelled "error".
inline CheckReport run_suite(const std::string& name, SuiteConfig config) {
    const auto& reg = detail::registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& s) { return name == s.name; });
    if (it == reg.end()) {
        std::string names;
        for (const auto& s : reg) names += std::string(names.empty() ? "" : ", ") + s.name;
        throw DomainError("unknown suite '" + name + "'; registered suites: " + names);
    }
    if (!config.seed) throw PreconditionError("suite configuration needs a seed");
    config.suite = name;

    CheckReport report;
    report.suite = name;
    report.config = to_json(config);
    report.timestamp = detail::utc_now();

    SuiteBuilder builder(config);
    it->build(builder);
    auto& jobs = builder.jobs();
    std::vector<std::vector<Instance>> results(jobs.size());
    detail::parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
        Rng rng(instance_seed(*config.seed, name, i));
        try {
            results[i] = jobs[i](rng);
        } catch (const std::exception& e) {
            Instance bad = le("error", json{{"job", i}, {"what", e.what()}}, 1.0, 0.0, 1.0, 0.0, false,
                              ToleranceKind::engineering_choice);
            results[i] = {bad};
        }
    });
    for (auto& r : results) {
        for (auto& in : r) report.instances.push_back(std::move(in));
    }
    for (const auto& in : report.instances) (in.pass ? report.passed : report.failed)++;
    report.notes = std::move(builder.notes());
    if (report.instances.empty()) report.error = "suite produced no instances";
    return report;
}

/// Every registered suite, or the one named in config.suite; suites run concurrently when
/// threads > 1 and are reported in registry order.
inline std::vector<CheckReport> run_suites(const SuiteConfig& config) {
    const auto names = config.suite.empty() || config.suite == "all" ? registered_suites()
                                                                      : std::vector<std::string>{config.suite};
    std::vector<CheckReport> out(names.size());
    SuiteConfig inner = config;
    const unsigned outer = names.size() > 1 ? config.threads : 1;
    if (outer > 1) inner.threads = 1;
    detail::parallel_for(names.size(), outer, [&](std::size_t i) { out[i] = run_suite(names[i], inner); });
    return out;
}

// ---------------------------------------------------------------------------------------------
// Output

namespace detail {

/// 12 significant digits; non-finite values become strings so that the JSON stays valid.
inline json rounded(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline json round_all(const json& j) {
    if (j.is_number_float()) return rounded(j.get<double>());
    if (j.is_array() || j.is_object()) {
        json out = j;
        for (auto it = out.begin(); it != out.end(); ++it) *it = round_all(*it);
        return out;
    }
    return j;
}

inline std::string full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace detail

inline json to_json(const Instance& in, std::size_t index) {
    return {{"index", index},
            {"label", in.label},
            {"relation", in.relation},
            {"lhs", detail::rounded(in.lhs)},
            {"rhs", detail::rounded(in.rhs)},
            {"constant", detail::rounded(in.constant)},
            {"tolerance", detail::rounded(in.tolerance)},
            {"relative", in.relative},
            {"tolerance_kind", to_string(in.tolerance_kind)},
            {"pass", in.pass},
            {"inputs", detail::round_all(in.inputs)},
            {"measured", detail::round_all(in.measured)}};
}

/// Full report; the timestamp is the only field that varies between identical runs.
inline json to_json(const CheckReport& r, bool with_timestamp = true) {
    json j{{"suite", r.suite},
           {"config", detail::round_all(r.config)},
           {"summary", {{"instances", r.instances.size()}, {"passed", r.passed}, {"failed", r.failed}, {"pass", r.ok()}}},
           {"notes", r.notes},
           {"error", r.error.empty() ? json(nullptr) : json(r.error)}};
    json list = json::array();
    for (std::size_t i = 0; i < r.instances.size(); ++i) list.push_back(to_json(r.instances[i], i));
    j["instances"] = std::move(list);
    if (with_timestamp) j["timestamp"] = r.timestamp;
    return j;
}

inline json to_json(const std::vector<CheckReport>& reports, bool with_timestamp = true) {
    json suites = json::array();
    bool ok = true;
    for (const auto& r : reports) {
        suites.push_back(to_json(r, with_timestamp));
        ok = ok && r.ok();
    }
    return {{"pass", ok}, {"suites", suites}};
}

/// Flat instance table at full precision.
inline std::string to_csv(const std::vector<CheckReport>& reports) {
    std::ostringstream os;
    os << "suite,index,label,relation,lhs,rhs,constant,tolerance,relative,tolerance_kind,pass,inputs\n";
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.instances.size(); ++i) {
            const auto& in = r.instances[i];
            os << r.suite << ',' << i << ',' << detail::csv_quote(in.label) << ',' << in.relation << ','
               << detail::full(in.lhs) << ',' << detail::full(in.rhs) << ',' << detail::full(in.constant) << ','
               << detail::full(in.tolerance) << ',' << (in.relative ? "true" : "false") << ','
               << to_string(in.tolerance_kind) << ',' << (in.pass ? "true" : "false") << ','
               << detail::csv_quote(in.inputs.dump()) << '\n';
        }
    }
    return os.str();
}

}  // namespace symspace::verify
