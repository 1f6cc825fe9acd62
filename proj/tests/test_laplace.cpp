#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mimfrac/errors.hpp"
#include "mimfrac/laplace.hpp"
#include "oracles.hpp"

using namespace mimfrac;
using mimfrac::oracle::example51;

namespace {

using oracle::lcplx;
using oracle::WideProfile;

}  // namespace

TEST(CoeffB, Examples) {
    const auto p = example51();
    EXPECT_NEAR(coeff_b(cplx(1e-60, 0), p).real(), -0.14375, 1e-12);
    EXPECT_NEAR(coeff_b(1.0, p).real(), -1.6846153846153846, 1e-14);
    const double expected_one = -p.beta * p.R1 - p.omega - p.lambda +
                                p.omega * p.omega / ((1 - p.beta) * p.R2 + p.omega + p.mu);
    EXPECT_DOUBLE_EQ(coeff_b(1.0, p).real(), expected_one);
    const cplx b1000 = coeff_b(1000.0, p);
    EXPECT_NEAR(b1000.real(), -252.42715605731747, 1e-11);
    EXPECT_LT(b1000.real(), -251.0);
    EXPECT_EQ(b1000.imag(), 0.0);
}

TEST(CoeffB, RejectsBranchCut) {
    EXPECT_THROW(coeff_b(-1.0, example51()), ValidationError);
    EXPECT_THROW(coeff_b(0.0, example51()), ValidationError);
    EXPECT_NO_THROW(coeff_b(cplx(-1.0, 1e-3), example51()));
}

TEST(LaplaceProfile, FrozenValues) {
    // 30-digit evaluation of the closed form.
    const auto v = laplace_profile(0.3, cplx(2, 3), example51()).u1;
    EXPECT_NEAR(v.real(), 0.036764541053588238, 1e-14);
    EXPECT_NEAR(v.imag(), -0.14230888710096049, 1e-14);
    const auto p = example51();
    EXPECT_NEAR(real_s_profile(0.5, 0.1, 0.8, 0.25, p), 7.4544292658327393, 1e-12);
    EXPECT_NEAR(real_s_profile(0.5, 1.0, 0.8, 0.25, p), 0.51642690050579654, 1e-14);
    EXPECT_NEAR(real_s_profile(0.5, 10.0, 0.8, 0.25, p), 0.013559378398744273, 1e-16);
    EXPECT_NEAR(real_s_profile(0.5, 100.0, 0.8, 0.25, p) / 2.45997579256788297e-5, 1.0, 1e-12);
    EXPECT_NEAR(real_s_profile(0.5, 100.0, 0.9, 0.25, p) / 4.12539273293833397e-6, 1.0, 1e-12);
}

TEST(LaplaceProfile, ImmobileFollowsMobile) {
    const auto p = example51();
    const cplx s(0.7, -2.0);
    const auto v = laplace_profile(0.4, s, p);
    const cplx den = (1 - p.beta) * p.R2 * std::pow(s, p.gamma) + p.omega + p.mu;
    EXPECT_LT(std::abs(v.u2 - p.omega * v.u1 / den), 1e-15);
}

TEST(LaplaceProfile, RealAxisBelowInflow) {
    for (double s : {0.1, 1.0, 10.0, 100.0}) {
        const auto v = laplace_profile(0.5, cplx(s, 0), example51()).u1;
        EXPECT_EQ(v.imag(), 0.0);
        EXPECT_GE(v.real(), 0.0);
        EXPECT_LE(v.real(), 1.0 / s);
    }
}

TEST(LaplaceProperties, RandomDraws) {
    std::mt19937_64 rng(31415);
    int evaluated = 0;
    for (int draw = 0; draw < 1000; ++draw) {
        const auto p = oracle::random_params(rng);
        for (const cplx& s : oracle::random_right_half_plane(rng, 8)) {
            const auto c = laplace_coefficients(s, p);
            ASSERT_GT(c.eta1.real(), 0.0);
            ASSERT_LT(c.eta2.real(), 0.0);
            ASSERT_LT(c.b.real(), 0.0);
            EXPECT_LE(std::abs(c.eta1 + c.eta2 - 1.0 / c.a), 1e-10 / c.a);
            EXPECT_LE(std::abs(c.eta1 * c.eta2 - c.b / c.a), 1e-10 * std::abs(c.b / c.a));
            ASSERT_EQ(laplace_profile(0.0, c).u1, 1.0 / s);

            const WideProfile wide(c);
            const lcplx flux1 = wide.eta1 * wide.c1 * std::exp(wide.eta1);
            const lcplx flux2 = wide.eta2 * wide.c2 * std::exp(wide.eta2);
            EXPECT_LE(std::abs(flux1 + flux2), 1e-10L * (std::abs(flux1) + std::abs(flux2)));
            const cplx flux = laplace_flux_at_outlet(c);
            EXPECT_LE(std::abs(flux), 1e-10 * (std::abs(flux1) + std::abs(flux2)) + 1e-300);

            for (double x : {0.25, 0.5, 1.0}) {
                const lcplx w = wide.at(x);
                const cplx v = laplace_profile(x, c).u1;
                const cplx wd(static_cast<double>(w.real()), static_cast<double>(w.imag()));
                EXPECT_LE(std::abs(v - wd), 1e-10 * std::abs(wd) + 1e-300) << "s=" << s << " x=" << x;
            }
            ++evaluated;
        }
    }
    EXPECT_EQ(evaluated, 8000);
}

// A transform of a nonnegative function is nonnegative and nonincreasing on the
// positive real axis; u1_hat(0, s) = 1/s caps it.
TEST(LaplaceProperties, RealRayNonnegativeAndDecreasing) {
    std::mt19937_64 rng(77);
    for (int draw = 0; draw < 1000; ++draw) {
        const auto p = oracle::random_params(rng);
        for (double x : {0.1, 0.5, 1.0}) {
            double previous = INFINITY;
            for (int e = 0; e <= 60; ++e) {
                const double s = 0.01 * std::pow(10.0, e / 10.0);
                const double v = laplace_profile(x, cplx(s, 0), p).u1.real();
                ASSERT_GE(v, 0.0) << "s=" << s;
                ASSERT_LE(s * v, 1.0 + 1e-12);
                ASSERT_LE(v, previous * (1 + 1e-12));
                previous = v;
            }
        }
    }
}

TEST(LaplaceProperties, BoundConstant) {
    const auto p = example51();
    std::vector<cplx> ray;
    for (int e = 0; e <= 120; ++e) ray.emplace_back(0.01 * std::pow(10.0, e / 20.0), 0.0);
    const double ray_bound = bound_constant(p, ray);
    EXPECT_TRUE(std::isfinite(ray_bound));
    EXPECT_LE(ray_bound, 1.0 + 1e-12);
    EXPECT_EQ(bound_constant(p, ray, std::vector<double>{0.0}), 1.0);

    std::vector<cplx> inner, outer;
    for (int e = 0; e <= 300; ++e) {
        const double im = std::pow(10.0, e / 100.0) - 1.0;  // 0 .. 999
        inner.emplace_back(1.0, im);
        inner.emplace_back(1.0, -im);
        outer.emplace_back(1.0, 1e3 * std::pow(10.0, e / 300.0));
        outer.emplace_back(1.0, -1e3 * std::pow(10.0, e / 300.0));
    }
    const double near = bound_constant(p, inner);
    const double far = bound_constant(p, outer);
    EXPECT_TRUE(std::isfinite(near));
    EXPECT_TRUE(std::isfinite(far));
    EXPECT_LE(far, near);
}

TEST(LaplaceProperties, MonotoneInOrders) {
    const auto p = example51();
    int violations = 0;
    for (double s : {10.0, 100.0, 1000.0}) {
        for (int gi = 1; gi < 20; ++gi) {
            for (int ai = 1; ai < 19; ++ai) {
                const double g = gi * 0.05, a = ai * 0.05;
                if (!(real_s_profile(0.5, s, a + 0.05, g, p) < real_s_profile(0.5, s, a, g, p))) ++violations;
                if (!(real_s_profile(0.5, s, g, a + 0.05, p) < real_s_profile(0.5, s, g, a, p))) ++violations;
            }
        }
    }
    EXPECT_EQ(violations, 0);
    EXPECT_EQ(real_s_profile(0.5, 100, 0.8, 0.25, p), real_s_profile(0.5, 100, 0.8, 0.25, p));
    EXPECT_LT(real_s_profile(0.5, 100, 0.9, 0.25, p), real_s_profile(0.5, 100, 0.8, 0.25, p));
}

TEST(ContourQuadrature, Validation) {
    EXPECT_NO_THROW(validate(ContourQuadrature{}));
    EXPECT_THROW(validate(ContourQuadrature{7, 1e-6, 1e-6}), ValidationError);
    EXPECT_THROW(validate(ContourQuadrature{24, 0.0, 1e-6}), ValidationError);
    EXPECT_THROW(validate(ContourQuadrature{24, 0.02, 1e-6}), ValidationError);
}

TEST(InverseLaplace, KnownPairs) {
    const ContourQuadrature q;
    for (double t : {0.5, 1.0, 5.0}) {
        const auto one = invert_laplace([](cplx s) { return 1.0 / s; }, t, q);
        EXPECT_NEAR(one.value, 1.0, 1e-6);
        for (double a : {0.5, 2.0}) {
            const auto e = invert_laplace([a](cplx s) { return 1.0 / (s + a); }, t, q);
            EXPECT_LE(std::abs(e.value / std::exp(-a * t) - 1.0), 1e-6) << t << " " << a;
        }
        for (double alpha : {0.5, 0.8}) {
            const auto ml = invert_laplace(
                [alpha](cplx s) { return std::pow(s, alpha - 1.0) / (std::pow(s, alpha) + 1.0); }, t, q);
            const double expected = oracle::mittag_leffler(alpha, -std::pow(t, alpha));
            EXPECT_LE(std::abs(ml.value / expected - 1.0), 1e-6) << t << " " << alpha;
        }
    }
}

TEST(InverseLaplace, MittagLefflerOracleFrozen) {
    // 30-digit values of E_0.8(-t^0.8).
    EXPECT_NEAR(oracle::mittag_leffler(0.8, -std::pow(0.5, 0.8)), 0.56231975312920937, 1e-12);
    EXPECT_NEAR(oracle::mittag_leffler(0.8, -1.0), 0.38694857861897685, 1e-12);
    EXPECT_NEAR(oracle::mittag_leffler(0.8, -std::pow(5.0, 0.8)), 0.087827430293285084, 1e-12);
}

TEST(InverseLaplace, ThrowsWhenNotConverged) {
    // Jump at t = 1: the contour sum cannot resolve it.
    const auto f = [](cplx s) { return std::exp(-s) / s; };
    EXPECT_THROW(invert_laplace(f, 1.0, ContourQuadrature{8, 1e-10, 1e-6}), NumericalError);
}

TEST(Reference, InflowBoundaryAndKnownValue) {
    const auto p = example51();
    // Only u1 is prescribed at the inlet; there u2 relaxes towards omega/(omega+mu).
    double previous_u2 = 0.0;
    for (double t : {1.0, 10.0, 100.0}) {
        const auto r = invert_at(0.0, t, p);
        EXPECT_NEAR(r.u1, 1.0, 1e-6);
        EXPECT_GT(r.u2, previous_u2);
        EXPECT_LT(r.u2, p.omega / (p.omega + p.mu));
        previous_u2 = r.u2;
    }
    EXPECT_NEAR(invert_at(0.5, 100.0, p).u1, 0.8513637897926648, 1e-8);
    EXPECT_NEAR(invert_at(0.5, 10.0, p).u1, 0.79442552321772664, 1e-8);
    EXPECT_THROW(invert_at(1.5, 1.0, p), ValidationError);
}
