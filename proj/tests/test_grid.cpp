#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "symspace/grid.hpp"

using namespace symspace;

namespace {

SpacePtr unit_cells(std::size_t n) { return make_space(MeasureSpace::uniform(n)); }

StepFunction random_function(std::mt19937_64& rng, const SpacePtr& space) {
    auto v = oracle::random_values(rng, space->cells());
    std::bernoulli_distribution zero(0.2);
    for (double& e : v) {
        if (zero(rng)) e = 0.0;
    }
    return StepFunction(space, v);
}

}  // namespace

TEST(MeasureSpace, DefaultGridsSatisfyInvariants) {
    for (const auto& s : {MeasureSpace::unit_interval(64), MeasureSpace::half_line(40),
                          MeasureSpace::counting(8), MeasureSpace::dyadic(12)}) {
        const auto& bp = s.breakpoints();
        for (std::size_t i = 0; i < s.cells(); ++i) {
            EXPECT_GT(bp[i + 1], bp[i]);
            EXPECT_DOUBLE_EQ(s.width(i), bp[i + 1] - bp[i]);
        }
    }
    const auto unit = MeasureSpace::unit_interval(64);
    EXPECT_EQ(unit.breakpoints()[32], std::exp2(-10.0));
    const auto half = MeasureSpace::half_line(40);
    EXPECT_EQ(half.truncation().first, std::exp2(-20.0));
    EXPECT_EQ(half.truncation().second, std::exp2(20.0));
    EXPECT_EQ(half.breakpoints()[1], std::exp2(-19.0));
}

TEST(MeasureSpace, RejectsBadBreakpoints) {
    EXPECT_THROW(MeasureSpace::from_breakpoints(SpaceKind::unit_interval, {0.0, 0.5, 0.5, 1.0}),
                 DomainError);
    EXPECT_THROW(MeasureSpace::from_breakpoints(SpaceKind::half_line, {0.0, 1.0}), DomainError);
    EXPECT_THROW(MeasureSpace::half_line(4, 2.0, 1.0), DomainError);
    EXPECT_THROW(StepFunction(unit_cells(2), {1.0, -0.5}), DomainError);
    EXPECT_THROW(StepFunction(unit_cells(2), {1.0}), DomainError);
}

TEST(Distribution, Examples) {
    const auto space = make_space(MeasureSpace::from_breakpoints(SpaceKind::unit_interval,
                                                                 {0.0, 0.1, 0.3, 0.5, 1.0}));
    const StepFunction chi(space, {1.0, 0.0, 1.0, 0.0});
    EXPECT_NEAR(distribution(chi, 0.5), 0.3, 1e-15);
    EXPECT_EQ(distribution(chi, 1.0), 0.0);

    const StepFunction x(make_space(MeasureSpace::counting(3)), {1.0, 3.0, 2.0});
    EXPECT_EQ(distribution(x, 1.5), 2.0);
}

TEST(Distribution, MatchesBruteForceAndIsNonIncreasing) {
    std::mt19937_64 rng(11);
    const auto space = make_space(MeasureSpace::unit_interval(32));
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_function(rng, space);
        double prev = kInf;
        for (double lambda = 0.0; lambda <= 5.5; lambda += 0.25) {
            const double d = distribution(x, lambda);
            EXPECT_NEAR(d, oracle::distribution(x.values(), space->widths(), lambda), 1e-15);
            EXPECT_LE(d, prev);
            prev = d;
        }
    }
}

TEST(Rearrange, Examples) {
    const StepFunction x(make_space(MeasureSpace::counting(3)), {1.0, 3.0, 2.0});
    EXPECT_EQ(rearrange(x).values(), (std::vector<double>{3.0, 2.0, 1.0}));

    const StepFunction dec(unit_cells(4), {4.0, 3.0, 3.0, 0.0});
    const auto r = rearrange(dec);
    EXPECT_EQ(r.space_ptr(), dec.space_ptr());
    EXPECT_EQ(r.values(), dec.values());

    const auto space = make_space(MeasureSpace::from_breakpoints(SpaceKind::unit_interval,
                                                                 {0.0, 0.3, 0.5, 0.8, 1.0}));
    const StepFunction chi(space, {0.0, 1.0, 0.0, 1.0});
    const auto rc = rearrange(chi);
    EXPECT_DOUBLE_EQ(rc(0.1), 1.0);
    EXPECT_DOUBLE_EQ(rc(0.39), 1.0);
    EXPECT_DOUBLE_EQ(rc(0.41), 0.0);
    EXPECT_NEAR(distribution(rc, 0.5), 0.4, 1e-15);
}

TEST(Rearrange, AgreesWithInfimumDefinition) {
    std::mt19937_64 rng(5);
    const auto space = make_space(MeasureSpace::unit_interval(16));
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_function(rng, space);
        const auto r = rearrange(x);
        const auto& bp = r.space().breakpoints();
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double mid = 0.5 * (bp[i] + bp[i + 1]);
            EXPECT_EQ(r[i], oracle::rearranged_at(x.values(), space->widths(), mid));
        }
    }
}

TEST(Rearrange, IdempotentEquimeasurableAndIntegralPreserving) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> lam(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto space = make_space(trial % 2 ? MeasureSpace::unit_interval(24)
                                                : MeasureSpace::half_line(30));
        const auto x = random_function(rng, space);
        const auto r = rearrange(x);
        const auto rr = rearrange(r);
        EXPECT_EQ(rr.values(), r.values());
        EXPECT_EQ(rr.space().breakpoints(), r.space().breakpoints());
        for (int k = 0; k < 20; ++k) {
            const double l = lam(rng);
            EXPECT_EQ(distribution(x, l), distribution(r, l));
        }
        EXPECT_EQ(integrate(x), integrate(r));
    }
}

TEST(Rearrange, HardyLittlewoodAtBreakpoints) {
    std::mt19937_64 rng(23);
    const auto space = make_space(MeasureSpace::unit_interval(20));
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = random_function(rng, space);
        const auto y = random_function(rng, space);
        const auto xy = decreasing_profile(multiply(x, y));
        const auto px = decreasing_profile(x);
        const auto py = decreasing_profile(y);
        for (double t : space->breakpoints()) {
            if (t == 0.0) continue;
            const double lhs = t * double_star(xy, t);
            // integral_0^t x* y*: both profiles are step functions in measure coordinates
            std::vector<double> cuts(px.ends);
            cuts.insert(cuts.end(), py.ends.begin(), py.ends.end());
            cuts.push_back(t);
            cuts.push_back(0.0);
            std::sort(cuts.begin(), cuts.end());
            double rhs = 0.0;
            for (std::size_t i = 0; i + 1 < cuts.size() && cuts[i] < t; ++i) {
                const double a = cuts[i], b = std::min(cuts[i + 1], t);
                if (b <= a) continue;
                const double m = 0.5 * (a + b);
                const auto at = [m](const Profile& p) {
                    for (std::size_t k = 0; k < p.ends.size(); ++k) {
                        if (m < p.ends[k]) return p.values[k];
                    }
                    return 0.0;
                };
                rhs += at(px) * at(py) * (b - a);
            }
            EXPECT_LE(lhs, rhs + 1e-12 * std::max(1.0, rhs));
        }
    }
}

TEST(DoubleStar, Examples) {
    const auto space = unit_cells(8);
    const auto c = StepFunction::constant(space, 2.5);
    for (double t : {0.01, 0.3, 1.0}) EXPECT_NEAR(double_star(c, t), 2.5, 1e-15);

    const auto chi = StepFunction::indicator(space, 0.0, 0.25);
    EXPECT_NEAR(double_star(chi, 0.8), 0.25 / 0.8, 1e-15);
    EXPECT_NEAR(double_star(chi, 0.2), 1.0, 1e-15);
    EXPECT_NEAR(double_star(chi, 0.25), 1.0, 1e-15);
    EXPECT_THROW(double_star(chi, 0.0), DomainError);
    EXPECT_THROW(double_star(chi, 1.5), DomainError);
}

TEST(DoubleStar, DominatesRearrangementAndDecreases) {
    std::mt19937_64 rng(29);
    const auto space = make_space(MeasureSpace::unit_interval(32));
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = random_function(rng, space);
        const auto r = rearrange(x);
        double prev = kInf;
        for (double t = 1e-4; t <= 1.0; t *= 1.3) {
            const double ds = double_star(x, t);
            EXPECT_GE(ds, r(t) - 1e-12);
            EXPECT_LE(ds, prev + 1e-12);
            prev = ds;
        }
    }
}

TEST(Dilate, Examples) {
    const auto space = make_space(MeasureSpace::uniform(8));
    const auto chi = StepFunction::indicator(space, 0.0, 0.25);
    EXPECT_EQ(dilate(chi, 1.0).values(), chi.values());
    const auto d2 = dilate(chi, 2.0);
    EXPECT_TRUE(equal_as_functions(d2, StepFunction::indicator(space, 0.0, 0.5)));
    const auto dh = dilate(chi, 0.5);
    EXPECT_NEAR(integrate(dh), 0.125, 1e-15);
    EXPECT_DOUBLE_EQ(dh(0.1), 1.0);
    EXPECT_DOUBLE_EQ(dh(0.13), 0.0);
    EXPECT_THROW(dilate(chi, 0.0), DomainError);
}

TEST(Dilate, TruncatesOnUnitInterval) {
    const auto space = unit_cells(4);
    const StepFunction x(space, {1.0, 2.0, 3.0, 4.0});
    const auto d = dilate(x, 2.0);
    EXPECT_DOUBLE_EQ(d(0.6), 2.0);
    EXPECT_DOUBLE_EQ(d(0.99), 2.0);
    EXPECT_NEAR(integrate(d), 2.0 * (0.25 * 1.0 + 0.25 * 2.0), 1e-15);
}

TEST(Dilate, InverseDilationRestoresInteriorFunctions) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> sdist(-3.0, 3.0);
    const auto space = make_space(MeasureSpace::half_line(40));
    for (int trial = 0; trial < 30; ++trial) {
        auto v = oracle::random_values(rng, 40);
        for (std::size_t i = 0; i < 40; ++i) {
            if (i < 8 || i >= 32) v[i] = 0.0;  // keep support away from the truncation
        }
        const StepFunction x(space, v);
        const double s = std::exp2(sdist(rng));
        const auto back = dilate(dilate(x, s), 1.0 / s);
        EXPECT_TRUE(equal_as_functions(back, x));
        EXPECT_NEAR(integrate(dilate(x, s)), s * integrate(x), 1e-12 * s * integrate(x));
    }
}

TEST(Integrate, Examples) {
    const auto space = make_space(MeasureSpace::unit_interval(16));
    const auto one = StepFunction::constant(space, 1.0);
    EXPECT_NEAR(integrate(one), 1.0, 1e-15);
    EXPECT_NEAR(integrate_against(one, PowerWeight{1.0, -0.5, 0.0}), 2.0, 1e-14);
    EXPECT_EQ(integrate(StepFunction::constant(space, 0.0)), 0.0);
    EXPECT_THROW(integrate_against(one, PowerWeight{1.0, -1.0, 0.0}), NumericError);
}

TEST(PowerWeight, LogFactorQuadratureMatchesSimpson) {
    for (const PowerWeight w : {PowerWeight{1.0, -0.5, 1.0}, PowerWeight{2.0, 0.3, -2.0},
                                PowerWeight{1.0, 1.5, 0.5}}) {
        for (auto [a, b] : {std::pair{1e-3, 0.5}, std::pair{0.2, 7.0}, std::pair{2.0, 3.0}}) {
            const double expect = oracle::log_simpson([&](double t) { return w(t); }, a, b);
            EXPECT_NEAR(w.integral(a, b), expect, 1e-10 * expect);
        }
    }
    // From 0: t^{-1/2}(1+|log t|) on (0,1) integrates to 2 + 4 = 6.
    EXPECT_NEAR((PowerWeight{1.0, -0.5, 1.0}.integral(0.0, 1.0)), 6.0, 1e-10);
    // Exact alpha = -1 branch: int_0^1 (1 - log t)^{-2} dt/t = 1.
    EXPECT_NEAR((PowerWeight{1.0, -1.0, -2.0}.integral(0.0, 1.0)), 1.0, 1e-14);
}

TEST(PowerWeight, SupOnCell) {
    const PowerWeight w{1.0, 0.5, 1.0};
    EXPECT_DOUBLE_EQ(w.sup_on(0.0, 4.0), w(4.0));
    const PowerWeight bump{1.0, -0.5, 2.0};  // increases then decreases on (1, inf)
    const double s_star = 2.0 * 2.0 - 1.0;  // -beta/alpha - 1
    EXPECT_NEAR(bump.sup_on(1.0, 1e6), bump(std::exp(s_star)), 1e-14);
}
