#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "symspace/operators.hpp"

using namespace symspace;

namespace {

using QC = QuasiConcaveFn;

StepFunction random_function(std::mt19937_64& rng, const SpacePtr& space) {
    return StepFunction(space, oracle::random_values(rng, space->cells(), 0.0, 5.0));
}

}  // namespace

TEST(Hardy, Examples) {
    const auto space = make_space(MeasureSpace::uniform(10));
    const auto h = hardy(StepFunction::constant(space, 2.5));
    for (double t : {0.01, 0.15, 0.5, 0.99, 1.0}) EXPECT_NEAR(h(t), 2.5, 1e-14);

    const auto chi = StepFunction::indicator(space, 0.0, 0.3);
    const auto hc = hardy(chi);
    for (double t : {0.05, 0.2, 0.3}) EXPECT_NEAR(hc(t), 1.0, 1e-14);
    for (double t : {0.35, 0.6, 1.0}) EXPECT_NEAR(hc(t), 0.3 / t, 1e-14);

    const auto tail = StepFunction::indicator(space, 0.4, 1.0);
    const auto hs = hardy_dual(tail);
    for (double t : {0.05, 0.2, 0.4}) EXPECT_NEAR(hs(t), std::log(1.0 / 0.4), 1e-14);
    EXPECT_NEAR(hs(0.7), std::log(1.0 / 0.7), 1e-14);
}

TEST(Hardy, ContinuousAtBreakpoints) {
    std::mt19937_64 rng(31);
    const auto space = make_space(MeasureSpace::unit_interval(32));
    const auto x = random_function(rng, space);
    for (const auto& f : {hardy(x), hardy_dual(x)}) {
        const auto& bp = f.breakpoints();
        for (std::size_t k = 1; k + 1 < bp.size(); ++k) {
            const double left = f.piece_value(k - 1, bp[k]), right = f.piece_value(k, bp[k]);
            EXPECT_NEAR(left, right, 1e-12 * std::max(1.0, std::abs(left)));
        }
    }
}

TEST(Hardy, DoubleStarIsHardyOfRearrangement) {
    std::mt19937_64 rng(32);
    for (const auto& space : {make_space(MeasureSpace::unit_interval(32)), make_space(MeasureSpace::uniform(20))}) {
        const auto x = random_function(rng, space);
        const auto xs = rearrange(x);
        const auto h = hardy(xs);
        const auto& bp = h.breakpoints();
        double previous = kInf;
        for (std::size_t k = 1; k < bp.size(); ++k) {
            const double expected = double_star(x, std::min(bp[k], space->right()));
            EXPECT_NEAR(h(bp[k]), expected, 1e-12 * expected);
            EXPECT_LE(h(bp[k]), previous * (1.0 + 1e-15));
            const double mid = 0.5 * (bp[k - 1] + bp[k]);
            if (mid > 0.0) {
                EXPECT_GE(h(mid) * (1.0 + 1e-15), h(bp[k]));
            }
            previous = h(bp[k]);
        }
    }
}

TEST(Hardy, IdentityResidual) {
    const auto uniform = make_space(MeasureSpace::uniform(1));
    EXPECT_LE(hardy_identity_residual(StepFunction::constant(uniform, 1.0)), 1e-10);
    EXPECT_EQ(hardy_identity_residual(StepFunction::constant(uniform, 0.0)), 0.0);
    std::mt19937_64 rng(33);
    for (const auto& space : {make_space(MeasureSpace::uniform(32)), make_space(MeasureSpace::unit_interval(32)),
                              make_space(MeasureSpace::half_line(32))}) {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> v = oracle::random_values(rng, 32);
            v[0] = 0.0;  // H* x is finite only when x vanishes near 0
            EXPECT_LE(hardy_identity_residual(StepFunction(space, v)), 1e-8);
        }
    }
}

TEST(Inequality, DoubleStarBelowNormOverFundamental) {
    std::mt19937_64 rng(34);
    const auto space = make_space(MeasureSpace::dyadic(24));
    const std::vector<Space> family{Space::lp(1), Space::lp(2.5), Space::lorentz_lambda(QC::power(0.6)),
                                    Space::lorentz_pq(3.0, 2.0), Space::marcinkiewicz(QC::power(0.3)),
                                    Space::orlicz(Space::lp(1), YoungFunction::power(1.0, 3.0))};
    for (const auto& e : family) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto x = random_function(rng, space);
            const double nx = norm_value(e, x);
            for (std::size_t k = 1; k < space->breakpoints().size(); ++k) {
                const double t = space->breakpoints()[k];
                EXPECT_LE(double_star(x, t), nx / fundamental(e, t, space).value * (1.0 + 1e-12)) << e.describe();
            }
        }
    }
}

TEST(OperatorNorm, DilationOnLpIsExact) {
    const auto space = make_space(MeasureSpace::dyadic(30));
    for (double p : {1.0, 2.0, 3.0}) {
        for (double s : {0.25, 4.0}) {
            const auto b = operator_norm(OperatorSpec::dilation(s), Space::lp(p), space);
            EXPECT_NEAR(b.upper, std::pow(s, 1.0 / p), 1e-15);
            EXPECT_NEAR(b.lower, b.upper, 1e-12);
        }
    }
}

TEST(OperatorNorm, DilationGenericBound) {
    const auto space = make_space(MeasureSpace::unit_interval(32));
    const auto e = Space::orlicz(Space::lorentz_lambda(QC::power(0.5)), YoungFunction::shifted_power(0.2, 1.0, 2.0));
    for (double s : {0.5, 3.0}) {
        const auto b = operator_norm(OperatorSpec::dilation(s), e, space);
        EXPECT_EQ(b.upper, std::max(1.0, s));
        EXPECT_LE(b.lower, b.upper * (1.0 + 1e-12));
        EXPECT_GT(b.lower, 0.0);
    }
}

TEST(OperatorNorm, HardyConstantOnLp) {
    // Fine geometric cells (ratio 2^(1/8)) down to 2^-250 so truncated powers resolve well.
    std::vector<double> bp{0.0};
    for (int k = 0; k <= 2000; ++k) bp.push_back(std::exp2(-250.0 + k / 8.0));
    const auto space = make_space(MeasureSpace::from_breakpoints(SpaceKind::unit_interval, bp));
    for (double p : {2.0, 3.0}) {
        const auto b = operator_norm(OperatorSpec::h(), Space::lp(p), space);
        EXPECT_EQ(b.upper, p / (p - 1.0));
        EXPECT_GE(b.lower, p / (p - 1.0) - 0.05) << b.witness;
        EXPECT_LE(b.lower, b.upper);
        const auto d = operator_norm(OperatorSpec::h_dual(), Space::lp(p), space);
        EXPECT_LE(d.lower, d.upper);
    }
}

TEST(OperatorNorm, DilationSubmultiplicative) {
    const auto space = make_space(MeasureSpace::unit_interval(48));
    const auto e = Space::lorentz_lambda(QC::power_log(0.5, 0.3));
    for (double s1 : {0.5, 2.0}) {
        for (double s2 : {0.25, 4.0}) {
            const double l12 = operator_norm(OperatorSpec::dilation(s1 * s2), e, space).lower;
            const double l1 = operator_norm(OperatorSpec::dilation(s1), e, space).lower;
            const double u2 = operator_norm(OperatorSpec::dilation(s2), e, space).upper;
            EXPECT_LE(l12, l1 * u2 * (1.0 + 1e-12));
        }
    }
}

TEST(Indices, PowersAreExact) {
    for (double a : {0.0, 0.3, 1.0}) {
        const auto d = dilation_indices(QC::power(a));
        const auto s = simonenko_indices(QC::power(a));
        EXPECT_EQ(d.lower, a);
        EXPECT_EQ(d.upper, a);
        EXPECT_EQ(s.lower, a);
        EXPECT_EQ(s.upper, a);
        EXPECT_EQ(d.method, IndexMethod::closed_form);
    }
    // A power behind a node that does not reduce to a monomial goes through the grid estimate.
    const auto d = dilation_indices(QC::running_sup(QC::power_log(0.4, 1e-300)));
    EXPECT_EQ(d.method, IndexMethod::grid_estimate);
    EXPECT_NEAR(d.lower, 0.4, 1e-6);
    EXPECT_NEAR(d.upper, 0.4, 1e-6);
}

TEST(Indices, PowerLogSimonenkoBrackets) {
    // t phi'/phi = 1/2 -+ 1/(1 + |log t|): infimum -1/2 and supremum 3/2, both approached at t = 1.
    const auto phi = QC::power_log(0.5, 1.0);
    IndexOptions half;
    half.lo = 0x1p-30;
    half.hi = 0x1p30;
    const auto s = simonenko_indices(phi, half);
    EXPECT_LT(s.lower, 0.5);
    EXPECT_GT(s.upper, 0.5);
    EXPECT_NEAR(s.lower, -0.5, 1e-6);
    EXPECT_NEAR(s.upper, 1.5, 1e-6);
    EXPECT_EQ(s.method, IndexMethod::grid_estimate);
}

TEST(Indices, OrderingChainOnRandomPowerLogs) {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> ua(0.1, 0.9), ub(0.0, 1.0);
    IndexOptions half;
    half.lo = 0x1p-30;
    half.hi = 0x1p30;
    for (int trial = 0; trial < 20; ++trial) {
        const double a = ua(rng);
        const double blo = std::max(a - 1.0, -a), bhi = std::min(a, 1.0 - a);
        const double b = blo + (bhi - blo) * ub(rng);
        const auto phi = QC::power_log(a, b);
        ASSERT_TRUE(is_quasi_concave_sampled(phi, 1e-9, 1e9));
        for (const auto& o : {IndexOptions{}, half}) {
            const auto d = dilation_indices(phi, o);
            const auto s = simonenko_indices(phi, o);
            EXPECT_TRUE(index_chain_holds(d, s)) << phi.describe() << " s=" << s.lower << " p=" << d.lower
                                                 << " q=" << d.upper << " sigma=" << s.upper;
            EXPECT_GE(d.lower, -0.02);
            EXPECT_LE(d.upper, 1.02);
        }
    }
}

TEST(Indices, VanishingPhiIsDomainError) {
    EXPECT_THROW(dilation_indices(QC::power_log(1.0, -400.0)), DomainError);
}

TEST(Boyd, ClosedFormsAndEstimate) {
    const auto space = make_space(MeasureSpace::dyadic(40));
    const auto l3 = boyd_indices(Space::lp(3), space);
    EXPECT_DOUBLE_EQ(l3.lower, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(l3.upper, 1.0 / 3.0);
    const auto lpq = boyd_indices(Space::lorentz_pq(4.0, 2.0), space);
    EXPECT_DOUBLE_EQ(lpq.lower, 0.25);
    EXPECT_DOUBLE_EQ(lpq.upper, 0.25);
    const auto est = boyd_indices(Space::marcinkiewicz(QC::power(0.4)), space, 8, true);
    EXPECT_EQ(est.method, IndexMethod::grid_estimate);
    EXPECT_NEAR(est.lower, 0.4, 0.05);
    EXPECT_NEAR(est.upper, 0.4, 0.05);
}
