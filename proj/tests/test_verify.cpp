#include <gtest/gtest.h>

#include <random>
#include <set>

#include "symspace/verify.hpp"

using namespace symspace;
using namespace symspace::verify;

namespace {

SuiteConfig seeded(std::uint64_t seed) {
    SuiteConfig c;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Instance, Relations) {
    EXPECT_TRUE(le("a", {}, 1.0, 1.0, 1.0, 0.0, false, ToleranceKind::paper_constant).pass);
    EXPECT_FALSE(le("a", {}, 1.0 + 1e-12, 1.0, 1.0, 0.0, false, ToleranceKind::paper_constant).pass);
    EXPECT_TRUE(le("a", {}, 2.0, 1.0, 2.0, 0.0, false, ToleranceKind::paper_constant).pass);
    EXPECT_TRUE(le("a", {}, 1.0 + 1e-7, 1.0, 1.0, 1e-6, true, ToleranceKind::optimizer_slack).pass);
    EXPECT_TRUE(le("a", {}, 1e-7, 0.0, 1.0, 1e-6, false, ToleranceKind::engineering_choice).pass);
    EXPECT_FALSE(le("a", {}, 1e-7, 0.0, 1.0, 1e-6, true, ToleranceKind::engineering_choice).pass);

    EXPECT_TRUE(eq("e", {}, 1.0 + 5e-5, 1.0, 1e-4, true, ToleranceKind::engineering_choice).pass);
    EXPECT_FALSE(eq("e", {}, 1.0 - 2e-4, 1.0, 1e-4, true, ToleranceKind::engineering_choice).pass);

    // No silent clamping: NaN on either side fails.
    EXPECT_FALSE(le("n", {}, std::nan(""), 1.0, 1.0, 1.0, false, ToleranceKind::paper_constant).pass);
    EXPECT_FALSE(eq("n", {}, 1.0, std::nan(""), 1.0, false, ToleranceKind::paper_constant).pass);
    EXPECT_TRUE(under_cap("c", {}, 49.0, 50.0).pass);
    EXPECT_FALSE(under_cap("c", {}, 51.0, 50.0).pass);
}

TEST(Seeds, IndependentAcrossSuitesAndIndices) {
    std::set<std::uint64_t> seen;
    for (const auto& name : registered_suites()) {
        for (std::size_t i = 0; i < 50; ++i) seen.insert(instance_seed(7, name, i));
    }
    EXPECT_EQ(seen.size(), registered_suites().size() * 50);
    EXPECT_EQ(instance_seed(7, "product_lp", 3), instance_seed(7, "product_lp", 3));
    EXPECT_NE(instance_seed(7, "product_lp", 3), instance_seed(8, "product_lp", 3));
}

TEST(Generators, ProfilesAreNonIncreasingAndPositive) {
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(s);
        const auto grid = make_space(s % 3 == 0   ? MeasureSpace::unit_interval(24)
                                     : s % 3 == 1 ? MeasureSpace::half_line(24)
                                                  : MeasureSpace::counting(24));
        const auto z = verify::detail::random_profile(rng, grid);
        EXPECT_TRUE(z.is_nonincreasing());
        for (double v : z.values()) EXPECT_GT(v, 0.0);
        const auto x = verify::detail::random_function(rng, grid);
        EXPECT_TRUE(std::all_of(x.values().begin(), x.values().end(), [](double v) { return v > 0.0; }));
    }
}

TEST(Registry, EighteenSuites) {
    const auto names = registered_suites();
    EXPECT_EQ(names.size(), 18u);
    EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
}

TEST(RunSuite, Errors) {
    try {
        run_suite("no_such_suite", seeded(1));
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        const std::string what = e.what();
        for (const auto& name : registered_suites()) EXPECT_NE(what.find(name), std::string::npos) << name;
    }
    EXPECT_THROW(run_suite("hardy_identity", SuiteConfig{}), PreconditionError);

    // A selector that matches no part yields no instances, which is an error rather than a pass.
    auto c = seeded(1);
    c.sub = "iv";
    const auto r = run_suite("theorem7", c);
    EXPECT_TRUE(r.instances.empty());
    EXPECT_FALSE(r.error.empty());
    EXPECT_FALSE(r.ok());
}

TEST(RunSuite, ProductLpExample) {
    auto c = seeded(1);
    c.grid_sizes = {64};
    const auto r = run_suite("product_lp", c);
    EXPECT_TRUE(r.ok()) << to_json(r).dump(1);
    EXPECT_GE(r.instances.size(), 100u);
}

TEST(RunSuite, HardyIdentityExample) {
    auto c = seeded(3);
    c.grid_sizes = {32};
    const auto r = run_suite("hardy_identity", c);
    ASSERT_EQ(r.instances.size(), 100u);
    double worst = 0.0;
    for (const auto& in : r.instances) worst = std::max(worst, in.lhs);
    EXPECT_LE(worst, 1e-8);
    EXPECT_TRUE(r.ok());
}

TEST(RunSuite, Theorem7SandwichConstants) {
    auto c = seeded(2);
    c.sub = "i";
    c.instances = 6;
    const auto r = run_suite("theorem7", c);
    ASSERT_EQ(r.instances.size(), 12u);
    for (const auto& in : r.instances) {
        EXPECT_TRUE(in.pass) << in.label;
        EXPECT_TRUE(in.constant == 1.0 || in.constant == 2.0);
    }
}

TEST(RunSuite, ToleranceOverrideIsHonoured) {
    auto c = seeded(4);
    c.instances = 3;
    c.tolerances["residual"] = -1.0;  // an impossible tolerance must fail, not clamp
    const auto r = run_suite("hardy_identity", c);
    EXPECT_EQ(r.failed, 3u);
    for (const auto& in : r.instances) EXPECT_EQ(in.tolerance, -1.0);
}

TEST(Determinism, IdenticalConfigsGiveIdenticalReports) {
    auto c = seeded(11);
    c.instances = 20;
    const auto a = to_json(run_suite("reverse_chebyshev", c), false).dump();
    c.threads = 3;
    const auto b = to_json(run_suite("reverse_chebyshev", c), false).dump();
    EXPECT_EQ(a, b);
    c.seed = 12;
    EXPECT_NE(a, to_json(run_suite("reverse_chebyshev", c), false).dump());
}

TEST(Output, JsonRoundsToTwelveDigitsAndCsvKeepsFullPrecision) {
    CheckReport r;
    r.suite = "s";
    r.instances.push_back(le("x", {{"v", 0.1234567890123456}}, 1.0 / 3.0, 1.0, 1.0, 0.0, false,
                             ToleranceKind::engineering_choice));
    r.passed = 1;
    const auto j = to_json(r, false);
    EXPECT_EQ(j["instances"][0]["lhs"].get<double>(), 0.333333333333);
    EXPECT_EQ(j["instances"][0]["inputs"]["v"].get<double>(), 0.123456789012);
    EXPECT_FALSE(j.contains("timestamp"));
    EXPECT_TRUE(to_json(r).contains("timestamp"));

    const auto csv = to_csv({r});
    EXPECT_NE(csv.find("0.33333333333333331"), std::string::npos);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);

    Instance inf = le("i", {}, kInf, 1.0, 1.0, 0.0, false, ToleranceKind::engineering_choice);
    EXPECT_EQ(to_json(inf, 0)["lhs"], "inf");
}
