// Acceptance gate: one PASS/FAIL line per criterion. Exit status is 0 once every criterion has
// been evaluated; pass --strict to make it reflect the verdicts instead.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "symspace/json_io.hpp"
#include "symspace/verify.hpp"

namespace {

using namespace symspace;
using json_io::json;

constexpr std::uint64_t kSeed = 7;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

verify::CheckReport suite(const std::string& name, const std::function<void(verify::SuiteConfig&)>& tweak = {}) {
    verify::SuiteConfig c;
    c.seed = kSeed;
    if (tweak) tweak(c);
    return verify::run_suite(name, c);
}

/// Counts instances (optionally filtered) and lists the first failing label.
Verdict tally(const verify::CheckReport& r, const std::function<bool(const verify::Instance&)>& keep = {}) {
    std::size_t total = 0, failed = 0;
    std::string first;
    for (const auto& in : r.instances) {
        if (keep && !keep(in)) continue;
        ++total;
        if (!in.pass) {
            ++failed;
            if (first.empty()) first = in.label;
        }
    }
    Verdict v;
    v.pass = r.error.empty() && total > 0 && failed == 0;
    v.detail = std::to_string(total - failed) + "/" + std::to_string(total) + " instances hold";
    if (!r.error.empty()) v.detail += "; error: " + r.error;
    if (!first.empty()) v.detail += "; first failure " + first;
    return v;
}

double max_lhs(const verify::CheckReport& r, const std::string& label) {
    double worst = 0.0;
    for (const auto& in : r.instances) {
        if (in.label == label) worst = std::max(worst, in.lhs);
    }
    return worst;
}

Verdict exact_product() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = suite("product_lp", [](auto& c) {
        c.instances = 50;
        c.grid_sizes = {64};
    });
    const double secs = elapsed(t0);
    auto v = tally(r);
    v.pass = v.pass && secs <= 30.0;
    v.detail += "; " + num(secs) + " s (limit 30)";
    return v;
}

Verdict lozanovskii() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = suite("lozanovskii", [](auto& c) { c.instances = 20; });
    const double secs = elapsed(t0);
    auto v = tally(r);
    double worst = 0.0;
    for (const auto& in : r.instances) worst = std::max(worst, in.measured.value("ratio", 0.0));
    v.pass = v.pass && secs <= 120.0;
    v.detail += "; worst product/|z|_1 " + num(worst) + "; " + num(secs) + " s (limit 120)";
    return v;
}

Verdict fundamental_multiplicativity() {
    const std::string lambda = Space::lorentz_lambda(QuasiConcaveFn::power(0.6)).describe();
    const std::string mstar = Space::marcinkiewicz_star(QuasiConcaveFn::power(0.3)).describe();
    const auto r = suite("fundamental_product");
    const auto listed = [&](const verify::Instance& in) {
        const auto e = in.inputs.value("E", std::string()), f = in.inputs.value("F", std::string());
        return (e == "L^3" && f == "L^6") || (e == lambda && f == mstar);
    };
    auto v = tally(r, listed);
    double lo = kInf, hi = 0.0;
    for (const auto& in : r.instances) {
        if (!listed(in) || in.label != "upper_bound") continue;
        const double ratio = in.measured.value("ratio", 0.0);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    v.detail += "; product/(f_E f_F) in [" + num(lo) + ", " + num(hi) + "]";
    return v;
}

Verdict sandwich() {
    const auto r = suite("theorem7", [](auto& c) {
        c.sub = "i";
        c.instances = 20;
    });
    auto v = tally(r);
    double lo = kInf, hi = 0.0;
    for (const auto& in : r.instances) {
        lo = std::min(lo, in.measured.value("ratio", kInf));
        hi = std::max(hi, in.measured.value("ratio", 0.0));
    }
    v.detail += "; product/|z|_M* in [" + num(lo) + ", " + num(hi) + "]";
    return v;
}

Verdict hardy_residual() {
    const auto r = suite("hardy_identity", [](auto& c) {
        c.instances = 100;
        c.grid_sizes = {32};
    });
    auto v = tally(r);
    v.detail += "; max residual " + num(max_lhs(r, "HH*-H-H*"));
    return v;
}

/// inf over v of v^2 + (u/v)^2 by exhaustive search on a 1e5-point log grid.
double brute_force_square_oplus(double u) {
    constexpr int points = 100000;
    const double lo = std::log(1e-4), hi = std::log(1e4);
    double best = kInf;
    for (int i = 0; i < points; ++i) {
        const double v = std::exp(lo + (hi - lo) * i / (points - 1));
        const double w = u / v;
        best = std::min(best, v * v + w * w);
    }
    return best;
}

Verdict oplus() {
    const auto r = suite("oplus_sandwich");
    auto v = tally(r);
    const auto sq = YoungFunction::power(1.0, 2.0);
    const auto phi = YoungFunction::oplus(sq, sq);
    double oracle_gap = 0.0;
    for (int i = 0; i <= 60; ++i) {
        const double u = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
        const double brute = brute_force_square_oplus(u);
        oracle_gap = std::max(oracle_gap, std::abs(phi(u) - brute) / brute);
    }
    v.pass = v.pass && oracle_gap <= 1e-6;
    v.detail += "; |oplus - 2u|/2u max " + num(max_lhs(r, "oplus_equals_2u")) + "; brute-force gap " + num(oracle_gap);
    return v;
}

Verdict orlicz_witness() {
    const auto r = suite("theorem5_witness", [](auto& c) { c.instances = 20; });
    return tally(r, [](const verify::Instance& in) { return in.inputs.value("case", std::string()) == "u^2=u^4.u^4"; });
}

Verdict cancellation() {
    const auto r = suite("cancellation", [](auto& c) { c.instances = 10; });
    const auto base = [](const verify::Instance& in) { return in.label.rfind("cancellation:", 0) == 0; };
    auto v = tally(r, base);
    double lo = kInf, hi = 0.0;
    for (const auto& in : r.instances) {
        if (!base(in)) continue;
        lo = std::min(lo, in.measured.value("ratio", kInf));
        hi = std::max(hi, in.measured.value("ratio", 0.0));
    }
    v.detail += "; ratio in [" + num(lo) + ", " + num(hi) + "]";
    return v;
}

Verdict reverse_chebyshev() {
    const auto r = suite("reverse_chebyshev", [](auto& c) { c.instances = 200; });
    auto v = tally(r);
    double worst = -kInf;
    for (const auto& in : r.instances) worst = std::max(worst, (in.lhs - in.rhs) / std::abs(in.rhs));
    v.detail += "; max relative excess " + num(worst);
    return v;
}

Verdict negative_example() {
    const auto r = suite("negative_example2");
    auto v = tally(r);
    if (!r.instances.empty()) {
        const auto& ratios = r.instances.back().inputs["ratios"];
        v.detail += "; ratios";
        for (const auto& x : ratios) v.detail += " " + num(x.get<double>());
    }
    return v;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs `verify --suite all --seed 7` twice through the command-line tool and compares the reports.
Verdict determinism(const std::string& cli, const std::string& dir) {
    std::vector<json> reports;
    double slowest = 0.0;
    for (int run = 0; run < 2; ++run) {
        const std::string path = dir + "/acceptance_report_" + std::to_string(run) + ".json";
        const std::string cmd = "\"" + cli + "\" verify --suite all --seed 7 --report \"" + path + "\" > /dev/null";
        const auto t0 = std::chrono::steady_clock::now();
        const int status = std::system(cmd.c_str());
        slowest = std::max(slowest, elapsed(t0));
        if (status == -1) return {false, "could not launch " + cli};
        try {
            reports.push_back(json::parse(slurp(path)));
        } catch (const json::exception& e) {
            return {false, std::string("unreadable report: ") + e.what()};
        }
    }
    for (auto& r : reports) {
        for (auto& s : r["suites"]) s.erase("timestamp");
    }
    const bool same = reports[0] == reports[1];
    Verdict v;
    v.pass = same && slowest <= 600.0;
    v.detail = std::string(same ? "reports identical" : "reports differ") + "; slowest run " + num(slowest) +
               " s (limit 600); suite verdict " + (reports[0].value("pass", false) ? "pass" : "fail");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli, dir = ".";
    bool strict = false;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--strict") {
            strict = true;
        } else if (a == "--cli" && i + 1 < argc) {
            cli = argv[++i];
        } else if (a == "--workdir" && i + 1 < argc) {
            dir = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance --cli PATH [--workdir DIR] [--strict]\n");
            return 2;
        }
    }
    if (cli.empty()) {
        std::fprintf(stderr, "acceptance: --cli is required\n");
        return 2;
    }

    using Criterion = std::pair<std::string, std::function<Verdict()>>;
    const std::vector<Criterion> criteria{
        Criterion{"exact product L^3.L^6 = L^2", exact_product},
        Criterion{"Lozanovskii factorization", lozanovskii},
        Criterion{"fundamental function multiplicativity", fundamental_multiplicativity},
        Criterion{"M* product sandwich", sandwich},
        Criterion{"Hardy identity", hardy_residual},
        Criterion{"oplus calculus", oplus},
        Criterion{"constructive Orlicz witness", orlicz_witness},
        Criterion{"cancellation", cancellation},
        Criterion{"reverse Chebyshev", reverse_chebyshev},
        Criterion{"negative example growth", negative_example},
        Criterion{"determinism of verify all", [&] { return determinism(cli, dir); }}};

    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        passed += v.pass;
        std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", passed, criteria.size());
    return strict && passed != static_cast<int>(criteria.size()) ? 1 : 0;
}
