#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "symspace/product.hpp"

using namespace symspace;

namespace {

using QC = QuasiConcaveFn;

StepFunction random_function(std::mt19937_64& rng, const SpacePtr& space, double lo = 0.1, double hi = 5.0) {
    return StepFunction(space, oracle::random_values(rng, space->cells(), lo, hi));
}

StepFunction random_decreasing(std::mt19937_64& rng, const SpacePtr& space) {
    auto v = oracle::random_values(rng, space->cells(), 0.1, 5.0);
    std::sort(v.rbegin(), v.rend());
    return StepFunction(space, v);
}

double lp_oracle(const StepFunction& x, double p) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += std::pow(static_cast<long double>(x[i]), p) * x.space().widths()[i];
    }
    return static_cast<double>(std::pow(acc, 1.0L / p));
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void expect_valid_witness(const Space& e, const Space& f, const StepFunction& z, const NormResult& r) {
    ASSERT_TRUE(r.witness.has_value());
    const auto& w = *r.witness;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] > 0.0) {
            EXPECT_LE(rel(w.x[i] * w.y[i], z[i]), 1e-9) << "cell " << i;
        }
    }
    const double recomputed = norm(e, w.x).value * norm(f, w.y).value;
    EXPECT_LE(rel(recomputed, w.product), 1e-9);
    EXPECT_GE(recomputed, r.value - 1e-9);
    if (w.equalized) {
        EXPECT_LE(std::abs(w.norm_x - w.norm_y), 1e-9 * w.norm_x);
    }
}

}  // namespace

TEST(ProductNorm, Examples) {
    const auto unit = make_space(MeasureSpace::uniform(8));
    const auto chi = StepFunction::constant(unit, 1.0);
    const auto r = product_norm(Space::lp(2), Space::lp(2), chi);
    EXPECT_NEAR(r.value, 1.0, 1e-14);
    EXPECT_EQ(r.kind, NormKind::exact);

    const auto zero = StepFunction::constant(unit, 0.0);
    const auto r0 = product_norm(Space::lp(3), Space::lorentz_lambda(QC::power(0.5)), zero);
    EXPECT_EQ(r0.value, 0.0);

    std::mt19937_64 rng(5);
    const auto space = make_space(MeasureSpace::unit_interval(64));
    const auto z = random_function(rng, space);
    ProductOptions forced;
    forced.force_optimizer = true;
    const auto ro = product_norm(Space::lp(3), Space::lp(6), z, forced);
    EXPECT_LE(rel(ro.value, lp_oracle(z, 2.0)), 1e-4);
    EXPECT_EQ(ro.witness->method, "optimizer");
    expect_valid_witness(Space::lp(3), Space::lp(6), z, ro);
}

TEST(ProductNorm, ClosedFormTable) {
    std::mt19937_64 rng(6);
    const auto space = make_space(MeasureSpace::uniform(20));
    const auto z = random_function(rng, space);

    const auto lp = product_norm(Space::lp(2), Space::lp(4), z);
    EXPECT_NEAR(lp.value, lp_oracle(z, 4.0 / 3.0), 1e-12);
    EXPECT_EQ(lp.witness->method, "closed_form");
    expect_valid_witness(Space::lp(2), Space::lp(4), z, lp);

    const auto lam = Space::lorentz_lambda(QC::power(0.6));
    const auto inf = product_norm(lam, Space::lp(kInf), z);
    EXPECT_NEAR(inf.value, norm(lam, z).value, 1e-12);
    expect_valid_witness(lam, Space::lp(kInf), z, inf);

    // Lambda^(2) . Lambda^(2) = Lambda: both factors are z^(1/2).
    const auto conv = product_norm(Space::convexification(lam, 2), Space::convexification(lam, 2), z);
    EXPECT_NEAR(conv.value, norm(lam, z).value, 1e-12);
    expect_valid_witness(Space::convexification(lam, 2), Space::convexification(lam, 2), z, conv);
}

TEST(ProductNorm, WitnessInvariantsOnOptimizerPairs) {
    std::mt19937_64 rng(7);
    const auto space = make_space(MeasureSpace::uniform(16));
    const std::vector<std::pair<Space, Space>> pairs = {
        {Space::lorentz_lambda(QC::power(0.6)), Space::marcinkiewicz(QC::power(0.3))},
        {Space::lp(2, QC::power(0.3)), Space::lp(3)},
        {Space::lorentz_pq(2.0, 1.5), Space::marcinkiewicz_star(QC::power(0.5))},
    };
    for (const auto& [e, f] : pairs) {
        const auto z = random_function(rng, space);
        const auto r = product_norm(e, f, z);
        SCOPED_TRACE(e.describe() + " . " + f.describe());
        EXPECT_NE(r.kind, NormKind::exact);
        expect_valid_witness(e, f, z, r);
        EXPECT_TRUE(r.witness->equalized);
    }
}

TEST(EqualizeNorms, Examples) {
    const auto space = make_space(MeasureSpace::uniform(4));
    const auto x = StepFunction::constant(space, 4.0), y = StepFunction::constant(space, 1.0);
    const auto e = Space::lp(kInf);
    const FactorizationWitness w{x, y, 4.0, 1.0, 4.0, "closed_form", false, true};
    const auto out = equalize_norms(w, e, e);
    EXPECT_DOUBLE_EQ(out.norm_x, 2.0);
    EXPECT_DOUBLE_EQ(out.norm_y, 2.0);
    EXPECT_DOUBLE_EQ(out.x[0] * out.y[0], 4.0);
    EXPECT_NEAR(norm(e, out.x).value, 2.0, 1e-15);

    const FactorizationWitness same{x, x, 4.0, 4.0, 16.0, "closed_form", false, true};
    const auto id = equalize_norms(same, e, e);
    EXPECT_TRUE(id.equalized);
    EXPECT_EQ(id.x.values(), x.values());
    EXPECT_EQ(id.norm_x, 4.0);

    const auto z0 = StepFunction::constant(space, 0.0);
    const FactorizationWitness zero{z0, z0, 0.0, 0.0, 0.0, "closed_form", false, true};
    EXPECT_FALSE(equalize_norms(zero, e, e).equalized);
}

TEST(EqualizeNorms, ProductInvariant) {
    std::mt19937_64 rng(8);
    const auto space = make_space(MeasureSpace::uniform(10));
    const auto e = Space::lorentz_lambda(QC::power(0.4)), f = Space::lp(3);
    std::uniform_real_distribution<double> scale_dist(-6.0, 6.0);
    for (int k = 0; k < 30; ++k) {
        const auto x = scale(random_function(rng, space), std::exp(scale_dist(rng)));
        const auto y = random_function(rng, space);
        const FactorizationWitness w{x, y, norm(e, x).value, norm(f, y).value, 0.0, "optimizer", false, true};
        const double product = w.norm_x * w.norm_y;
        const auto out = equalize_norms(w, e, f);
        EXPECT_LE(rel(out.product, product), 1e-12);
        EXPECT_LE(std::abs(out.norm_x - out.norm_y), 1e-12 * out.norm_x);
        EXPECT_LE(rel(norm(e, out.x).value, out.norm_x), 1e-12);
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LE(rel(out.x[i] * out.y[i], x[i] * y[i]), 1e-12);
    }
}

TEST(Calderon, Examples) {
    std::mt19937_64 rng(9);
    const auto space = make_space(MeasureSpace::uniform(32));
    const auto z = random_function(rng, space);

    const auto lam = Space::lorentz_lambda(QC::power(0.7));
    for (double theta : {0.2, 0.5, 0.9}) {
        EXPECT_LE(rel(calderon_norm(lam, lam, theta, z).value, norm(lam, z).value), 1e-12);
    }
    EXPECT_LE(rel(calderon_norm(Space::lp(1), Space::lp(kInf), 0.5, z).value, lp_oracle(z, 2.0)), 1e-4);
}

TEST(Calderon, WeightedLebesgue) {
    // (L^1(t^1/2))^(2) . (L^1)^(2) restricted to step factors: per-cell Cauchy-Schwarz gives
    // sum z_i sqrt(a_i b_i), a_i = integral of t^1/2 over the cell, b_i = its width.
    std::mt19937_64 rng(10);
    const auto space = make_space(MeasureSpace::uniform(32));
    const auto z = random_function(rng, space);
    const auto r = calderon_norm(Space::lp(1, QC::power(0.5)), Space::lp(1), 0.5, z);

    const auto& bp = space->breakpoints();
    long double step_optimum = 0.0L, continuous = 0.0L;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double l = bp[i], h = bp[i + 1];
        const double a = (2.0 / 3.0) * (std::pow(h, 1.5) - std::pow(l, 1.5));
        step_optimum += z[i] * std::sqrt(a * (h - l));
        continuous += z[i] * 0.8 * (std::pow(h, 1.25) - std::pow(l, 1.25));
    }
    EXPECT_LE(rel(r.value, static_cast<double>(step_optimum)), 1e-6);
    EXPECT_GE(r.value, static_cast<double>(continuous) * (1.0 - 1e-12));
    EXPECT_LE(r.value, static_cast<double>(continuous) * 1.01);
    EXPECT_NEAR(norm(Space::lp(1, QC::power(0.25)), z).value, static_cast<double>(continuous), 1e-12);
}

TEST(Multiplier, Examples) {
    std::mt19937_64 rng(11);
    const auto space = make_space(MeasureSpace::uniform(64));
    const auto lam = Space::lorentz_lambda(QC::power(0.6));
    const auto one = StepFunction::constant(space, 1.0);
    EXPECT_NEAR(multiplier_norm(lam, lam, one).value, 1.0, 1e-12);

    const auto m = random_decreasing(rng, space);
    const auto r = multiplier_norm(Space::lorentz_p1(2.0), Space::lp(2), m);
    EXPECT_GE(r.value, 0.9 * m.sup());
    EXPECT_LE(r.value, 1.1 * m.sup());
    EXPECT_EQ(r.kind, NormKind::estimate);

    const auto mr = random_function(rng, space);
    EXPECT_LE(rel(multiplier_norm(Space::lp(2), Space::lp(1), mr).value, lp_oracle(mr, 2.0)), 1e-4);
    AscentOptions numeric;
    numeric.force_numeric = true;
    EXPECT_LE(rel(multiplier_norm(Space::lp(2), Space::lp(1), mr, numeric).value, lp_oracle(mr, 2.0)), 1e-4);

    EXPECT_EQ(multiplier_norm(lam, lam, StepFunction::constant(space, 0.0)).value, 0.0);
}

TEST(Multiplier, UnboundedRatioIsFlagged) {
    // M(L^1, L^2) is trivial: indicators of small cells drive ||y||_2 / ||y||_1 past the cap.
    const auto space = make_space(MeasureSpace::unit_interval(128));
    const auto r = multiplier_norm(Space::lp(1), Space::lp(2), StepFunction::constant(space, 1.0));
    EXPECT_TRUE(r.infinite);
    EXPECT_TRUE(std::isinf(r.value));
}

TEST(DualNumeric, Examples) {
    std::mt19937_64 rng(12);
    const auto space = make_space(MeasureSpace::uniform(32));
    const auto y = random_function(rng, space);
    EXPECT_LE(rel(dual_norm_numeric(Space::lp(2), y).value, lp_oracle(y, 2.0)), 1e-6);

    const double a = 0.25;
    const auto chi = StepFunction::indicator(space, 0.0, a);
    EXPECT_LE(rel(dual_norm_numeric(Space::lorentz_lambda(QC::power(0.6)), chi).value, std::pow(a, 0.4)), 1e-9);

    EXPECT_EQ(dual_norm_numeric(Space::lp(2), StepFunction::constant(space, 0.0)).value, 0.0);
}

TEST(DualNumeric, AgreesWithTable) {
    std::mt19937_64 rng(13);
    const auto space = make_space(MeasureSpace::uniform(24));
    for (const auto& e : {Space::marcinkiewicz(QC::power(0.4)), Space::lp(3), Space::lorentz_lambda(QC::power(0.5))}) {
        const auto y = random_function(rng, space);
        const double table = norm(*dual_descriptor(e), y).value;
        const double numeric = dual_norm_numeric(e, y).value;
        SCOPED_TRACE(e.describe());
        EXPECT_LE(numeric, table * (1.0 + 1e-9));
        EXPECT_GE(numeric, table * 0.99);
    }
}

TEST(Lozanovskii, Examples) {
    std::mt19937_64 rng(14);
    const auto space = make_space(MeasureSpace::uniform(32));
    const auto z = random_function(rng, space);
    const double l1 = integrate(z);

    const auto w2 = lozanovskii_factorize(Space::lp(2), z, 1e-9);
    for (std::size_t i = 0; i < z.size(); ++i) {
        EXPECT_LE(rel(w2.x[i], std::sqrt(z[i])), 1e-15);
        EXPECT_LE(rel(w2.y[i], std::sqrt(z[i])), 1e-15);
    }
    EXPECT_LE(rel(w2.product, l1), 1e-14);

    for (double p : {1.5, 3.0, 7.0}) {
        const auto w = lozanovskii_factorize(Space::lp(p), z, 1e-9);
        EXPECT_LE(rel(w.product, l1), 1e-13);
        EXPECT_TRUE(w.within_epsilon);
    }

    const auto small = make_space(MeasureSpace::uniform(32));
    const auto zl = random_function(rng, small);
    const auto wl = lozanovskii_factorize(Space::lorentz_lambda(QC::power(0.6)), zl, 0.05);
    EXPECT_TRUE(wl.within_epsilon);
    EXPECT_GE(wl.product, integrate(zl) * (1.0 - 1e-9));
    EXPECT_LE(wl.product, integrate(zl) * 1.05);
}

TEST(OrliczWitness, PowerExample) {
    std::mt19937_64 rng(15);
    const auto space = make_space(MeasureSpace::uniform(20));
    const auto z = random_function(rng, space);
    const auto phi = YoungFunction::power(1.0, 2.0), phi4 = YoungFunction::power(1.0, 4.0);
    const auto cert = check_relation(phi4, phi4, phi, Regime::all, Direction::succ);
    ASSERT_TRUE(cert.holds);
    const auto w = orlicz_factor_witness(Space::lp(1), phi4, phi4, phi, z, cert);
    for (std::size_t i = 0; i < z.size(); ++i) {
        EXPECT_LE(rel(w.x[i], std::sqrt(z[i])), 1e-9);
        EXPECT_LE(rel(w.y[i], std::sqrt(z[i])), 1e-9);
    }
    const double l2 = lp_oracle(z, 2.0);
    EXPECT_LE(w.norm_x * w.norm_x, l2 * (1.0 + 1e-9));
    EXPECT_LE(rel(lp_oracle(w.x, 4.0), w.norm_x), 1e-9);
}

TEST(OrliczWitness, ShiftedBranch) {
    // phi vanishes on [0, 1/4]; cells with z <= ||z|| / 4 land in the branch where y = 0.
    const auto space = make_space(MeasureSpace::uniform(16));
    std::vector<double> v(16, 0.01);
    for (std::size_t i = 0; i < 5; ++i) v[i] = 3.0 + static_cast<double>(i);
    const StepFunction z(space, v);
    const auto phi = YoungFunction::shifted_power(0.25, 1.0, 2.0);
    const auto phi_i = YoungFunction::shifted_power(0.5, 1.0, 4.0);
    const auto cert = check_relation(phi_i, phi_i, phi, Regime::all, Direction::succ);
    ASSERT_TRUE(cert.holds);
    const double lambda = luxemburg_norm(Space::lp(1), phi, z).value;
    ASSERT_LT(0.01 / lambda, 0.25);

    const auto w = orlicz_factor_witness(Space::lp(1), phi_i, phi_i, phi, z, cert);
    for (std::size_t i = 0; i < z.size(); ++i) EXPECT_LE(rel(w.x[i] * w.y[i], z[i]), 1e-12);
    const double bound = std::sqrt(*cert.D * lambda);
    EXPECT_LE(w.norm_x, bound * (1.0 + 1e-6));
    EXPECT_LE(w.norm_y, bound * (1.0 + 1e-6));
}

TEST(OrliczWitness, ZeroAndMissingCertificate) {
    const auto space = make_space(MeasureSpace::uniform(4));
    const auto phi = YoungFunction::power(1.0, 2.0), phi4 = YoungFunction::power(1.0, 4.0);
    const auto cert = check_relation(phi4, phi4, phi, Regime::all, Direction::succ);
    const auto w = orlicz_factor_witness(Space::lp(1), phi4, phi4, phi, StepFunction::constant(space, 0.0), cert);
    EXPECT_TRUE(w.x.is_zero());
    EXPECT_EQ(w.product, 0.0);

    RelationCertificate none;
    EXPECT_THROW(orlicz_factor_witness(Space::lp(1), phi4, phi4, phi, StepFunction::constant(space, 1.0), none),
                 PreconditionError);
}

TEST(ProductProperty, HolderFloor) {
    std::mt19937_64 rng(16);
    const auto space = make_space(MeasureSpace::unit_interval(24));
    ProductOptions forced;
    forced.force_optimizer = true;
    for (auto [p, q] : {std::pair{2.0, 2.0}, {1.5, 4.0}, {3.0, 1.0}}) {
        const auto z = random_function(rng, space);
        const double r = 1.0 / (1.0 / p + 1.0 / q);
        EXPECT_GE(product_norm(Space::lp(p), Space::lp(q), z, forced).value, lp_oracle(z, r) - 1e-9);
        EXPECT_GE(product_norm(Space::lp(p), Space::lp(q), z).value, lp_oracle(z, r) - 1e-9);
    }
}

TEST(ProductProperty, QuasiTriangle) {
    std::mt19937_64 rng(17);
    const auto space = make_space(MeasureSpace::uniform(10));
    const auto e = Space::lorentz_lambda(QC::power(0.6)), f = Space::marcinkiewicz(QC::power(0.5));
    for (int k = 0; k < 50; ++k) {
        const auto x = random_function(rng, space, 0.0, 3.0), y = random_function(rng, space, 0.0, 3.0);
        const double lhs = product_norm(e, f, add(x, y)).value;
        const double rhs = product_norm(e, f, x).value + product_norm(e, f, y).value;
        EXPECT_LE(lhs, 2.0 * rhs);
    }
}

TEST(ProductProperty, MonotoneSandwich) {
    std::mt19937_64 rng(18);
    const auto space = make_space(MeasureSpace::uniform(12));
    const std::vector<std::pair<Space, Space>> pairs = {
        {Space::lorentz_lambda(QC::power(0.6)), Space::marcinkiewicz(QC::power(0.3))},
        {Space::lp(2), Space::lorentz_pq(3.0, 2.0)},
    };
    ProductOptions mono;
    mono.monotone = true;
    for (const auto& [e, f] : pairs) {
        for (int k = 0; k < 3; ++k) {
            const auto z = random_decreasing(rng, space);
            const double free = product_norm(e, f, z).value;
            const double restricted = product_norm(e, f, z, mono).value;
            EXPECT_GE(restricted / free, 1.0 - 1e-6);
            EXPECT_LE(restricted / free, 2.05);
        }
    }
}

TEST(ProductProperty, ConvexificationScaling) {
    std::mt19937_64 rng(19);
    const auto space = make_space(MeasureSpace::uniform(12));
    const auto e = Space::lorentz_lambda(QC::power(0.6)), f = Space::marcinkiewicz(QC::power(0.4));
    for (double p : {2.0, 3.0}) {
        const auto z = random_function(rng, space);
        const double lhs =
            product_norm(Space::convexification(e, p), Space::convexification(f, p), z).value;
        const double rhs = std::pow(product_norm(e, f, power(z, p)).value, 1.0 / p);
        EXPECT_LE(rel(lhs, rhs), 1e-6) << "p = " << p;
    }
}

TEST(ProductProperty, ReverseChebyshev) {
    std::mt19937_64 rng(20);
    const auto space = make_space(MeasureSpace::unit_interval(40));
    std::uniform_real_distribution<double> level(0.1, 10.0);
    std::bernoulli_distribution in_set(0.6);
    for (int k = 0; k < 50; ++k) {
        const double a = level(rng);
        std::vector<double> xv(space->cells(), 0.0), yv(space->cells(), 0.0), chi(space->cells(), 0.0);
        for (std::size_t i = 0; i < xv.size(); ++i) {
            if (!in_set(rng)) continue;
            xv[i] = level(rng);
            yv[i] = a / xv[i];
            chi[i] = 1.0;
        }
        const StepFunction x(space, xv), y(space, yv), set(space, chi);
        const double mu = integrate(set);
        EXPECT_LE(mu * integrate(multiply(x, y)), integrate(x) * integrate(y) * (1.0 + 1e-12));
    }
}
