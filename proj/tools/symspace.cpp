// Command-line front end: norms, products, factorizations, multiplier norms, Young-function
// operations, indices and the verification suites.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "symspace/json_io.hpp"
#include "symspace/verify.hpp"

namespace {

using namespace symspace;
using json_io::json;

enum class Format { table, json, csv };

/// Usage or input problems; mapped to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Arguments starting with '{' are inline JSON, anything else is a file path.
json load(const std::string& arg, const char* what) {
    if (arg.empty()) throw UsageError(std::string("missing ") + what);
    std::string text;
    if (arg.front() == '{') {
        text = arg;
    } else {
        std::ifstream in(arg);
        if (!in) throw UsageError(std::string("cannot open ") + what + " file '" + arg + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

void save(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string cell(const json& v) {
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
        std::string out;
        for (const auto& e : v) out += (out.empty() ? "" : " ") + cell(e);
        return v.size() > 8 ? "[" + std::to_string(v.size()) + " values]" : out;
    }
    if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); })) {
        std::string out;
        for (const auto& e : v) out += (out.empty() ? "" : "; ") + e.get<std::string>();
        return out;
    }
    if (v.is_array()) return "[" + std::to_string(v.size()) + " entries]";
    if (v.is_object()) return "{...}";
    return v.dump();
}

/// Prints the scalar fields of a flat result object. Nested objects are left to --output.
void emit(const json& result, Format format, const std::string& output) {
    const json machine = verify::detail::round_all(result);
    if (!output.empty()) save(output, machine.dump(2));
    switch (format) {
        case Format::json: std::cout << machine.dump(2) << '\n'; return;
        case Format::csv:
            std::cout << "key,value\n";
            for (const auto& [k, v] : result.items()) {
                if (v.is_object()) continue;
                std::cout << k << ',' << (v.is_number_float() ? verify::detail::full(v.get<double>()) : cell(v))
                          << '\n';
            }
            return;
        case Format::table: {
            std::size_t width = 0;
            for (const auto& [k, v] : result.items()) width = std::max(width, k.size());
            for (const auto& [k, v] : result.items()) {
                if (v.is_object()) continue;
                std::cout << k << std::string(width + 2 - k.size(), ' ') << cell(v) << '\n';
            }
            return;
        }
    }
}

/// key=value pairs for --tol and --param.
std::map<std::string, double> key_values(const std::vector<std::string>& items, const char* flag) {
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        char* end = nullptr;
        const double v = eq == std::string::npos ? 0.0 : std::strtod(item.c_str() + eq + 1, &end);
        if (eq == std::string::npos || eq == 0 || end == item.c_str() + eq + 1 || *end != '\0') {
            throw UsageError(std::string(flag) + " expects key=value, got '" + item + "'");
        }
        out[item.substr(0, eq)] = v;
    }
    return out;
}

std::size_t default_grid_size() {
    if (const char* env = std::getenv("SYMSPACE_GRID_SIZE")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1) throw UsageError("SYMSPACE_GRID_SIZE must be a positive integer");
        return static_cast<std::size_t>(n);
    }
    return 64;
}

json norm_fields(const NormResult& r) {
    json j = json_io::to_json(r);
    if (r.witness) {
        j.erase("witness");
        j["method"] = r.witness->method;
        j["norm_x"] = r.witness->norm_x;
        j["norm_y"] = r.witness->norm_y;
    }
    if (j["notes"].empty()) j.erase("notes");
    return j;
}

struct Options {
    Format format = Format::table;
    std::string output;

    std::string space, e, f, fn, witness;
    double eps = 0.05;
    bool force = false;
    int starts = 8;
    int max_sweeps = 5000;

    std::string op, phi, phi1, phi2, regime = "all", direction = "succ";
    std::vector<double> u;

    std::string interval = "unit_interval";
    std::size_t grid_size = 0;

    std::string suite = "all", sub, report, csv;
    std::optional<std::uint64_t> seed;
    std::vector<std::size_t> grids;
    std::vector<std::string> tols, params;
    std::size_t instances = 0;
    double cap = 50.0;
    unsigned threads = 1;
};

ProductOptions product_options(const Options& o) {
    ProductOptions p;
    p.force_optimizer = o.force;
    p.starts = o.starts;
    p.max_sweeps = o.max_sweeps;
    return p;
}

int run_norm(const Options& o) {
    const auto space = json_io::space_from_json(load(o.space, "--space"));
    const auto x = json_io::step_function_from_json(load(o.fn, "--fn"));
    json j{{"space", space.describe()}};
    j.update(norm_fields(norm(space, x)));
    emit(j, o.format, o.output);
    return 0;
}

int run_product(const Options& o) {
    const auto e = json_io::space_from_json(load(o.e, "--E"));
    const auto f = json_io::space_from_json(load(o.f, "--F"));
    const auto z = json_io::step_function_from_json(load(o.fn, "--fn"));
    const auto r = product_norm(e, f, z, product_options(o));
    if (!o.witness.empty() && r.witness) save(o.witness, json_io::to_json(*r.witness).dump(2));
    json j{{"E", e.describe()}, {"F", f.describe()}};
    j.update(norm_fields(r));
    emit(j, o.format, o.output);
    return 0;
}

/// Recomputes ||x||_E ||y||_F for a stored witness and compares it with the stored product.
int run_check_witness(const Options& o) {
    const auto e = json_io::space_from_json(load(o.e, "--E"));
    const auto f = json_io::space_from_json(load(o.f, "--F"));
    const auto w = json_io::witness_from_json(load(o.witness, "--witness"));
    const double nx = norm_value(e, w.x), ny = norm_value(f, w.y);
    const double product = nx * ny;
    const double drift = std::abs(product - w.product) / std::max(std::abs(w.product), 1e-300);
    json j{{"stored_product", w.product}, {"product", product}, {"relative_drift", drift}};
    bool ok = drift <= 1e-9;
    if (!o.fn.empty()) {
        const auto z = json_io::step_function_from_json(load(o.fn, "--fn"));
        const bool factors = equal_as_functions(multiply(w.x, w.y), z, 1e-10 * std::max(1.0, z.sup()));
        j["factors_z"] = factors;
        ok = ok && factors;
    }
    j["pass"] = ok;
    emit(j, o.format, o.output);
    return ok ? 0 : 1;
}

int run_factorize(const Options& o) {
    const auto space = json_io::space_from_json(load(o.space, "--space"));
    const auto z = json_io::step_function_from_json(load(o.fn, "--fn"));
    const auto w = lozanovskii_factorize(space, z, o.eps, product_options(o));
    if (!o.witness.empty()) save(o.witness, json_io::to_json(w).dump(2));
    const double l1 = integrate(z);
    emit({{"space", space.describe()},
          {"l1_norm", l1},
          {"product", w.product},
          {"ratio", l1 > 0.0 ? w.product / l1 : 1.0},
          {"eps", o.eps},
          {"within_epsilon", w.within_epsilon},
          {"method", w.method},
          {"witness", json_io::to_json(w)}},
         o.format, o.output);
    return 0;
}

int run_multiplier(const Options& o) {
    const auto e = json_io::space_from_json(load(o.e, "--E"));
    const auto f = json_io::space_from_json(load(o.f, "--F"));
    const auto m = json_io::step_function_from_json(load(o.fn, "--fn"));
    AscentOptions a;
    a.force_numeric = o.force;
    json j{{"E", e.describe()}, {"F", f.describe()}};
    j.update(norm_fields(multiplier_norm(e, f, m, a)));
    emit(j, o.format, o.output);
    return 0;
}

Regime parse_regime(const std::string& s) {
    if (s == "all") return Regime::all;
    if (s == "large") return Regime::large;
    if (s == "small") return Regime::small;
    throw UsageError("--regime must be all, large or small");
}

Direction parse_direction(const std::string& s) {
    if (s == "prec") return Direction::prec;
    if (s == "succ") return Direction::succ;
    if (s == "equiv") return Direction::equiv;
    throw UsageError("--direction must be prec, succ or equiv");
}

int run_young(const Options& o) {
    auto young = [](const std::string& arg, const char* what) { return json_io::young_from_json(load(arg, what)); };
    if (o.op == "relation") {
        const auto cert = check_relation(young(o.phi1, "--phi1"), young(o.phi2, "--phi2"), young(o.phi, "--phi"),
                                         parse_regime(o.regime), parse_direction(o.direction));
        emit(json_io::to_json(cert), o.format, o.output);
        return 0;
    }
    if (o.u.empty()) throw UsageError("--u needs at least one sample point");
    YoungFunction g = YoungFunction::power(1.0, 1.0);
    bool inverse = false;
    if (o.op == "oplus") {
        g = YoungFunction::oplus(young(o.phi1, "--phi1"), young(o.phi2, "--phi2"));
    } else if (o.op == "ominus") {
        g = YoungFunction::ominus(young(o.phi, "--phi"), young(o.phi1, "--phi1"));
    } else if (o.op == "inverse") {
        g = young(o.phi, "--phi");
        inverse = true;
    } else {
        throw UsageError("--op must be oplus, ominus, inverse or relation");
    }
    json rows = json::array();
    for (double u : o.u) rows.push_back({{"u", u}, {"value", inverse ? g.inverse(u) : g(u)}});
    const json machine = {{"op", o.op}, {"function", g.describe()}, {"samples", rows}};
    if (!o.output.empty()) save(o.output, verify::detail::round_all(machine).dump(2));
    if (o.format == Format::json) {
        std::cout << verify::detail::round_all(machine).dump(2) << '\n';
    } else if (o.format == Format::csv) {
        std::cout << "u,value\n";
        for (const auto& r : rows) {
            std::cout << verify::detail::full(r["u"]) << ',' << verify::detail::full(r["value"]) << '\n';
        }
    } else if (rows.size() == 1) {
        std::cout << format_number(rows[0]["value"]) << '\n';
    } else {
        std::cout << "u  value\n";
        for (const auto& r : rows) std::cout << format_number(r["u"]) << "  " << format_number(r["value"]) << '\n';
    }
    return 0;
}

int run_indices(const Options& o) {
    const auto phi = json_io::quasi_concave_from_json(load(o.phi, "--phi"));
    const std::size_t n = o.grid_size ? o.grid_size : default_grid_size();
    const auto kind = space_kind_from_string(o.interval);
    IndexOptions io;
    if (kind == SpaceKind::half_line) io.hi = 0x1p40;
    json j;
    const auto dil = dilation_indices(phi, io), sim = simonenko_indices(phi, io);
    j["dilation_lower"] = dil.lower;
    j["dilation_upper"] = dil.upper;
    j["simonenko_lower"] = sim.lower;
    j["simonenko_upper"] = sim.upper;
    j["method"] = to_string(dil.method);
    j["truncation"] = {dil.truncation.first, dil.truncation.second};
    j["dilation"] = json_io::to_json(dil);
    j["simonenko"] = json_io::to_json(sim);
    if (!o.space.empty()) {
        const auto space = json_io::space_from_json(load(o.space, "--space"));
        MeasureSpace grid = kind == SpaceKind::half_line ? MeasureSpace::half_line(n)
                            : kind == SpaceKind::counting ? MeasureSpace::counting(n)
                                                          : MeasureSpace::unit_interval(n);
        const auto boyd = boyd_indices(space, make_space(std::move(grid)));
        j["grid_cells"] = n;
        j["boyd_lower"] = boyd.lower;
        j["boyd_upper"] = boyd.upper;
        j["boyd_method"] = to_string(boyd.method);
        j["boyd"] = json_io::to_json(boyd);
    }
    emit(j, o.format, o.output);
    return 0;
}

int run_verify(const Options& o) {
    verify::SuiteConfig c;
    c.suite = o.suite;
    c.seed = o.seed;
    c.grid_sizes = o.grids;
    c.instances = o.instances;
    c.tolerances = key_values(o.tols, "--tol");
    c.params = key_values(o.params, "--param");
    c.sub = o.sub;
    c.cap = o.cap;
    c.threads = std::max(1u, o.threads);
    if (!c.seed) throw UsageError("verify needs --seed");

    const auto started = std::chrono::steady_clock::now();
    const auto reports = verify::run_suites(c);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    const json full = verify::to_json(reports);
    if (!o.report.empty()) save(o.report, full.dump(2));
    if (!o.csv.empty()) save(o.csv, verify::to_csv(reports));
    bool ok = !reports.empty();
    for (const auto& r : reports) ok = ok && r.ok();

    if (o.format == Format::json) {
        std::cout << full.dump(2) << '\n';
    } else if (o.format == Format::csv) {
        std::cout << verify::to_csv(reports);
    } else {
        std::size_t width = 5;
        for (const auto& r : reports) width = std::max(width, r.suite.size());
        std::printf("%-*s  %9s  %7s  %7s  %s\n", static_cast<int>(width), "suite", "instances", "passed", "failed",
                    "status");
        for (const auto& r : reports) {
            std::printf("%-*s  %9zu  %7zu  %7zu  %s\n", static_cast<int>(width), r.suite.c_str(), r.instances.size(),
                        r.passed, r.failed, r.ok() ? "PASS" : "FAIL");
            if (!r.error.empty()) std::printf("  error: %s\n", r.error.c_str());
            for (const auto& in : r.instances) {
                if (in.pass) continue;
                std::printf("  failed: %s  lhs=%s %s rhs=%s\n", in.label.c_str(), format_number(in.lhs).c_str(),
                            in.relation == "eq" ? "~" : "<=", format_number(in.constant * in.rhs).c_str());
            }
        }
        std::printf("%s in %.1f s\n", ok ? "PASS" : "FAIL", seconds);
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Norms, products and factorizations in symmetric function spaces"};
    app.require_subcommand(1, 1);
    Options o;

    const std::map<std::string, Format> formats{{"table", Format::table}, {"json", Format::json}, {"csv", Format::csv}};
    auto common = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "stdout format")->transform(CLI::CheckedTransformer(formats));
        sub->add_option("--output", o.output, "write the full JSON result to this file");
    };
    auto optimizer = [&](CLI::App* sub) {
        sub->add_flag("--force-optimizer", o.force, "skip closed forms");
        sub->add_option("--starts", o.starts, "optimizer starts")->check(CLI::PositiveNumber);
        sub->add_option("--max-sweeps", o.max_sweeps, "optimizer sweep cap")->check(CLI::PositiveNumber);
    };

    auto* norm_cmd = app.add_subcommand("norm", "norm of a step function in a space");
    norm_cmd->add_option("--space", o.space, "space descriptor (file or inline JSON)")->required();
    norm_cmd->add_option("--fn", o.fn, "step function (file or inline JSON)")->required();
    common(norm_cmd);

    auto* product_cmd = app.add_subcommand("product", "norm in the pointwise product space E.F");
    product_cmd->add_option("--E", o.e)->required();
    product_cmd->add_option("--F", o.f)->required();
    product_cmd->add_option("--fn", o.fn)->required();
    product_cmd->add_option("--witness", o.witness, "write the factorization witness here");
    optimizer(product_cmd);
    common(product_cmd);

    auto* check_cmd = app.add_subcommand("check-witness", "recompute the product value of a stored witness");
    check_cmd->add_option("--E", o.e)->required();
    check_cmd->add_option("--F", o.f)->required();
    check_cmd->add_option("--witness", o.witness)->required();
    check_cmd->add_option("--fn", o.fn, "also check that x y reproduces this function");
    common(check_cmd);

    auto* factorize_cmd = app.add_subcommand("factorize", "z = x y with x in E and y in the Koethe dual");
    factorize_cmd->add_option("--space", o.space)->required();
    factorize_cmd->add_option("--fn", o.fn)->required();
    factorize_cmd->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    factorize_cmd->add_option("--witness", o.witness, "write the factorization here");
    optimizer(factorize_cmd);
    common(factorize_cmd);

    auto* multiplier_cmd = app.add_subcommand("multiplier", "norm of a multiplier from E to F");
    multiplier_cmd->add_option("--E", o.e)->required();
    multiplier_cmd->add_option("--F", o.f)->required();
    multiplier_cmd->add_option("--fn", o.fn)->required();
    multiplier_cmd->add_flag("--force-numeric", o.force, "skip the symbolic table");
    common(multiplier_cmd);

    auto* young_cmd = app.add_subcommand("young", "Young-function operations");
    young_cmd->add_option("--op", o.op)->required()->check(CLI::IsMember({"oplus", "ominus", "inverse", "relation"}));
    young_cmd->add_option("--phi", o.phi, "target function (ominus, inverse, relation)");
    young_cmd->add_option("--phi1", o.phi1);
    young_cmd->add_option("--phi2", o.phi2);
    young_cmd->add_option("--u", o.u, "sample points")->delimiter(',');
    young_cmd->add_option("--regime", o.regime, "all | large | small");
    young_cmd->add_option("--direction", o.direction, "prec | succ | equiv");
    common(young_cmd);

    auto* indices_cmd = app.add_subcommand("indices", "dilation, Simonenko and Boyd indices");
    indices_cmd->add_option("--phi", o.phi, "quasi-concave function")->required();
    indices_cmd->add_option("--space", o.space, "also estimate Boyd indices of this space");
    indices_cmd->add_option("--interval", o.interval, "unit_interval | half_line | counting");
    indices_cmd->add_option("--grid-size", o.grid_size, "cells (default $SYMSPACE_GRID_SIZE or 64)");
    common(indices_cmd);

    auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
    verify_cmd->add_option("--suite", o.suite, "suite name or 'all'");
    verify_cmd->add_option("--seed", o.seed)->required();
    verify_cmd->add_option("--report", o.report, "write the JSON report here");
    verify_cmd->add_option("--csv", o.csv, "write the flat instance table here");
    verify_cmd->add_option("--grid", o.grids, "grid sizes overriding the suite defaults")->delimiter(',');
    verify_cmd->add_option("--instances", o.instances, "instance count override");
    verify_cmd->add_option("--tol", o.tols, "tolerance override key=value");
    verify_cmd->add_option("--param", o.params, "suite parameter key=value");
    verify_cmd->add_option("--sub", o.sub, "part selector within a suite");
    verify_cmd->add_option("--cap", o.cap, "cap on measured constants");
    verify_cmd->add_option("--threads", o.threads, "worker threads");
    verify_cmd->add_option("--format", o.format, "stdout format")->transform(CLI::CheckedTransformer(formats));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*norm_cmd) return run_norm(o);
        if (*product_cmd) return run_product(o);
        if (*check_cmd) return run_check_witness(o);
        if (*factorize_cmd) return run_factorize(o);
        if (*multiplier_cmd) return run_multiplier(o);
        if (*young_cmd) return run_young(o);
        if (*indices_cmd) return run_indices(o);
        if (*verify_cmd) return run_verify(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
