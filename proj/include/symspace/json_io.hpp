#pragma once

// JSON forms of measure spaces, step functions, quasi-concave functions, Young functions,
// space descriptors, witnesses and index reports. Doubles are written in shortest
// round-trip form, so parse(dump(x)) reproduces every breakpoint and value exactly.

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "symspace/error.hpp"
#include "symspace/grid.hpp"
#include "symspace/operators.hpp"
#include "symspace/product.hpp"
#include "symspace/quasi_concave.hpp"
#include "symspace/spaces.hpp"
#include "symspace/young.hpp"

namespace symspace::json_io {

using nlohmann::json;

namespace detail {

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

inline double number(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (v.is_number()) return v.get<double>();
    // Decimal strings are accepted so that breakpoints can be written exactly by hand.
    if (v.is_string()) {
        try {
            return std::stod(v.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    throw ParseError(std::string("field \"") + key + "\" must be a number");
}

// JSON has no infinity, so exponents such as p = inf are written as strings.
inline json real(double v) { return std::isfinite(v) ? json(v) : json(v > 0 ? "inf" : "-inf"); }

inline double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

inline std::string text(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_string()) throw ParseError(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

inline std::vector<double> numbers(const json& v, const char* what) {
    if (!v.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (e.is_number()) {
            out.push_back(e.get<double>());
        } else if (e.is_string()) {
            try {
                out.push_back(std::stod(e.get<std::string>()));
            } catch (const std::exception&) {
                throw ParseError(std::string(what) + " holds a non-numeric string");
            }
        } else {
            throw ParseError(std::string(what) + " must hold numbers");
        }
    }
    return out;
}

// Library validation errors surface as parse errors when they come from a file.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Grids and step functions

inline json to_json(const MeasureSpace& s) {
    return {{"kind", to_string(s.kind())}, {"breakpoints", s.breakpoints()}};
}

inline MeasureSpace measure_space_from_json(const json& j) {
    const auto kind = detail::guarded([&] { return space_kind_from_string(detail::text(j, "kind")); });
    auto bp = detail::numbers(detail::field(j, "breakpoints"), "breakpoints");
    return detail::guarded([&] { return MeasureSpace::from_breakpoints(kind, std::move(bp)); });
}

inline json to_json(const StepFunction& x) {
    return {{"space", to_json(x.space())}, {"values", x.values()}};
}

inline StepFunction step_function_from_json(const json& j) {
    auto space = make_space(measure_space_from_json(detail::field(j, "space")));
    auto values = detail::numbers(detail::field(j, "values"), "values");
    return detail::guarded([&] { return StepFunction(std::move(space), std::move(values)); });
}

// ---------------------------------------------------------------------------------------------
// Quasi-concave functions

inline json to_json(const QuasiConcaveFn& f) {
    using K = QuasiConcaveFn::Kind;
    switch (f.kind()) {
        case K::monomial: {
            const auto& m = f.leaf();
            return {{"kind", "power"}, {"alpha", m.alpha}, {"beta", m.beta}, {"c", m.c}};
        }
        case K::ratio: return {{"kind", "ratio"}, {"f", to_json(f.first())}, {"g", to_json(f.second())}};
        case K::product: return {{"kind", "product"}, {"f", to_json(f.first())}, {"g", to_json(f.second())}};
        case K::running_sup: return {{"kind", "running_sup"}, {"f", to_json(f.first())}};
    }
    throw DomainError("unknown quasi-concave node");
}

inline QuasiConcaveFn quasi_concave_from_json(const json& j) {
    const auto kind = detail::text(j, "kind");
    if (kind == "power") {
        return detail::guarded([&] {
            return QuasiConcaveFn::power_log(detail::number(j, "alpha"), detail::number_or(j, "beta", 0.0),
                                             detail::number_or(j, "c", 1.0));
        });
    }
    if (kind == "ratio" || kind == "product") {
        const auto f = quasi_concave_from_json(detail::field(j, "f"));
        const auto g = quasi_concave_from_json(detail::field(j, "g"));
        return kind == "ratio" ? QuasiConcaveFn::ratio(f, g) : QuasiConcaveFn::product(f, g);
    }
    if (kind == "running_sup") return QuasiConcaveFn::running_sup(quasi_concave_from_json(detail::field(j, "f")));
    throw ParseError("unknown quasi-concave kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------------------------
// Young functions

inline json to_json(const YoungFunction& f) {
    using K = YoungFunction::Kind;
    const auto grid = [&] {
        const auto& g = f.inner_grid();
        return json{{"points", g.points}, {"log_span", g.log_span}, {"polish_tol", g.polish_tol}};
    };
    switch (f.kind()) {
        case K::power: return {{"kind", "power"}, {"c", f.c()}, {"p", f.p()}};
        case K::shifted_power: return {{"kind", "shifted_power"}, {"a", f.shift()}, {"c", f.c()}, {"p", f.p()}};
        case K::capped: return {{"kind", "capped"}, {"inner", to_json(f.first())}, {"b", f.cap()}};
        case K::sum: return {{"kind", "sum"}, {"first", to_json(f.first())}, {"second", to_json(f.second())}};
        case K::max: return {{"kind", "max"}, {"first", to_json(f.first())}, {"second", to_json(f.second())}};
        case K::oplus:
            return {{"kind", "oplus"}, {"first", to_json(f.first())}, {"second", to_json(f.second())},
                    {"grid", grid()}};
        case K::ominus:
            return {{"kind", "ominus"}, {"first", to_json(f.first())}, {"second", to_json(f.second())},
                    {"grid", grid()}};
    }
    throw DomainError("unknown Young node");
}

inline YoungFunction young_from_json(const json& j) {
    const auto kind = detail::text(j, "kind");
    return detail::guarded([&]() -> YoungFunction {
        if (kind == "power") return YoungFunction::power(detail::number_or(j, "c", 1.0), detail::number(j, "p"));
        if (kind == "shifted_power") {
            return YoungFunction::shifted_power(detail::number(j, "a"), detail::number_or(j, "c", 1.0),
                                                detail::number(j, "p"));
        }
        if (kind == "capped") return YoungFunction::capped(young_from_json(detail::field(j, "inner")), detail::number(j, "b"));
        if (kind == "sum" || kind == "max" || kind == "oplus" || kind == "ominus") {
            const auto a = young_from_json(detail::field(j, "first"));
            const auto b = young_from_json(detail::field(j, "second"));
            if (kind == "sum") return YoungFunction::sum(a, b);
            if (kind == "max") return YoungFunction::max(a, b);
            InnerGrid g;
            if (j.contains("grid")) {
                const auto& gj = j.at("grid");
                g.points = static_cast<int>(detail::number_or(gj, "points", g.points));
                g.log_span = detail::number_or(gj, "log_span", g.log_span);
                g.polish_tol = detail::number_or(gj, "polish_tol", g.polish_tol);
            }
            return kind == "oplus" ? YoungFunction::oplus(a, b, g) : YoungFunction::ominus(a, b, g);
        }
        throw ParseError("unknown Young function kind \"" + kind + "\"");
    });
}

// ---------------------------------------------------------------------------------------------
// Space descriptors

inline json to_json(const Space& s) {
    using K = Space::Kind;
    if (s.preset() == "lorentz_p1") return {{"kind", "lorentz_p1"}, {"p", detail::real(s.preset_p())}};
    if (s.preset() == "lorentz_pq") return {{"kind", "lorentz_pq"}, {"p", detail::real(s.preset_p())}, {"q", detail::real(s.p())}};
    json j{{"kind", to_string(s.kind())}};
    switch (s.kind()) {
        case K::lp:
            j["p"] = detail::real(s.p());
            if (s.fn()) j["weight"] = to_json(*s.fn());
            break;
        case K::lorentz_lambda:
        case K::marcinkiewicz:
        case K::marcinkiewicz_star:
        case K::linf_weighted: j["phi"] = to_json(s.phi()); break;
        case K::lorentz_lambda_p:
            j["phi"] = to_json(s.phi());
            j["p"] = detail::real(s.p());
            break;
        case K::orlicz:
            j["base"] = to_json(s.child());
            j["phi"] = to_json(s.young());
            break;
        case K::calderon:
            j["E"] = to_json(s.child(0));
            j["F"] = to_json(s.child(1));
            j["theta"] = s.theta();
            break;
        case K::product:
        case K::multiplier:
            j["E"] = to_json(s.child(0));
            j["F"] = to_json(s.child(1));
            break;
        case K::dual: j["E"] = to_json(s.child()); break;
        case K::convexification:
            j["E"] = to_json(s.child());
            j["p"] = detail::real(s.p());
            break;
        case K::symmetrization:
            j["E"] = to_json(s.child());
            j["mode"] = to_string(s.mode());
            break;
    }
    return j;
}

inline Space space_from_json(const json& j) {
    const auto kind = detail::text(j, "kind");
    const auto sub = [&](const char* key) { return space_from_json(detail::field(j, key)); };
    const auto qc = [&] { return quasi_concave_from_json(detail::field(j, "phi")); };
    return detail::guarded([&]() -> Space {
        if (kind == "lp") {
            std::optional<QuasiConcaveFn> w;
            if (j.contains("weight")) w = quasi_concave_from_json(j.at("weight"));
            return Space::lp(detail::number(j, "p"), w);
        }
        if (kind == "lorentz_p1") return Space::lorentz_p1(detail::number(j, "p"));
        if (kind == "lorentz_pq") return Space::lorentz_pq(detail::number(j, "p"), detail::number(j, "q"));
        if (kind == "lorentz_lambda") return Space::lorentz_lambda(qc());
        if (kind == "lorentz_lambda_p") return Space::lorentz_lambda_p(qc(), detail::number(j, "p"));
        if (kind == "marcinkiewicz") return Space::marcinkiewicz(qc());
        if (kind == "marcinkiewicz_star") return Space::marcinkiewicz_star(qc());
        if (kind == "linf_weighted") return Space::linf_weighted(qc());
        if (kind == "orlicz") return Space::orlicz(sub("base"), young_from_json(detail::field(j, "phi")));
        if (kind == "calderon") return Space::calderon(sub("E"), sub("F"), detail::number(j, "theta"));
        if (kind == "product") return Space::product(sub("E"), sub("F"));
        if (kind == "multiplier") return Space::multiplier(sub("E"), sub("F"));
        if (kind == "dual") return Space::dual(sub("E"));
        if (kind == "convexification") return Space::convexification(sub("E"), detail::number(j, "p"));
        if (kind == "symmetrization") {
            const auto mode = detail::text(j, "mode");
            if (mode != "star" && mode != "doublestar") throw ParseError("mode must be star or doublestar");
            return Space::symmetrization(sub("E"), mode == "star" ? SymMode::star : SymMode::doublestar);
        }
        throw ParseError("unknown space kind \"" + kind + "\"");
    });
}

// ---------------------------------------------------------------------------------------------
// Results

inline json to_json(const FactorizationWitness& w) {
    return {{"x", to_json(w.x)},           {"y", to_json(w.y)},
            {"norm_x", w.norm_x},          {"norm_y", w.norm_y},
            {"product", w.product},        {"method", w.method},
            {"equalized", w.equalized},    {"within_epsilon", w.within_epsilon}};
}

inline FactorizationWitness witness_from_json(const json& j) {
    FactorizationWitness w{step_function_from_json(detail::field(j, "x")),
                           step_function_from_json(detail::field(j, "y")), 0.0, 0.0, 0.0, "", false, true};
    w.norm_x = detail::number(j, "norm_x");
    w.norm_y = detail::number(j, "norm_y");
    w.product = detail::number(j, "product");
    w.method = j.contains("method") ? detail::text(j, "method") : "";
    w.equalized = j.value("equalized", false);
    w.within_epsilon = j.value("within_epsilon", true);
    return w;
}

inline json to_json(const NormResult& r) {
    json j{{"value", r.value}, {"kind", to_string(r.kind)}, {"infinite", r.infinite}, {"notes", r.notes}};
    if (r.truncation) j["truncation"] = {r.truncation->first, r.truncation->second};
    if (r.witness) j["witness"] = to_json(*r.witness);
    return j;
}

inline json to_json(const IndexReport& r) {
    return {{"kind", to_string(r.kind)},
            {"lower", r.lower},
            {"upper", r.upper},
            {"method", to_string(r.method)},
            {"truncation", {r.truncation.first, r.truncation.second}},
            {"t_used", {r.t_used.first, r.t_used.second}}};
}

inline json to_json(const RelationCertificate& c) {
    json j{{"relation", c.relation()}, {"holds", c.holds}, {"sensitive", c.sensitive}};
    j["C"] = c.C ? json(*c.C) : json(nullptr);
    j["D"] = c.D ? json(*c.D) : json(nullptr);
    j["u0"] = c.u0 ? json(*c.u0) : json(nullptr);
    j["witness_u"] = c.witness_u ? json(*c.witness_u) : json(nullptr);
    return j;
}

}  // namespace symspace::json_io
