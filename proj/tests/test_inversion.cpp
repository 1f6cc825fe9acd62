#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mimfrac/errors.hpp"
#include "mimfrac/fd_solver.hpp"
#include "mimfrac/inversion.hpp"
#include "oracles.hpp"

using namespace mimfrac;
using mimfrac::oracle::example51;

namespace {

const GridSpec kTiny(8, 20, 100.0);

ObservationSeries synthetic(const Orders& z, const GridSpec& g = kTiny) {
    return observe(example51().with_orders(z.alpha, z.gamma), g, 0.5);
}

}  // namespace

TEST(Noise, ZeroDeltaIsIdentity) {
    const auto clean = synthetic({0.8, 0.25});
    const auto same = add_noise(clean, 0.0, 42);
    EXPECT_EQ(same.values, clean.values);
    EXPECT_EQ(same.seed, 42u);
}

TEST(Noise, BoundedAndDeterministic) {
    const auto clean = synthetic({0.8, 0.25});
    for (double delta : {1e-4, 0.01, 0.05}) {
        for (std::uint64_t seed : {1u, 2u, 99u}) {
            const auto a = add_noise(clean, delta, seed);
            const auto b = add_noise(clean, delta, seed);
            EXPECT_EQ(a.values, b.values);
            EXPECT_EQ(a.noise_level, delta);
            double worst = 0.0;
            for (std::size_t k = 0; k < a.values.size(); ++k) worst = std::max(worst, std::abs(a.values[k] - clean.values[k]));
            EXPECT_LE(worst, delta);
            EXPECT_GT(worst, 0.0);
        }
    }
    EXPECT_NE(add_noise(clean, 0.01, 1).values, add_noise(clean, 0.01, 2).values);
    EXPECT_THROW(add_noise(clean, -0.1, 1), ValidationError);
}

TEST(Kappa, Values) {
    EXPECT_EQ(homotopy_kappa(5, 5, 0.9), 0.5);
    EXPECT_NEAR(homotopy_kappa(0, 5, 0.9), 0.98901305736940682, 1e-15);
    double previous = 1.0;
    for (int j = 0; j < 100; ++j) {
        const double k = homotopy_kappa(j, 5, 0.9);
        EXPECT_LT(k, previous);
        previous = k;
    }
    EXPECT_LT(previous, 1e-30);
}

TEST(LmStep, HandSolvedCases) {
    const std::vector<std::array<double, 2>> eye{{1, 0}, {0, 1}};
    const std::vector<double> r{0.3, -0.7};
    auto dz = lm_step(eye, r, 1.0);
    EXPECT_EQ(dz[0], 0.0);
    EXPECT_EQ(dz[1], 0.0);
    dz = lm_step(eye, r, 0.0);
    EXPECT_DOUBLE_EQ(dz[0], 0.3);
    EXPECT_DOUBLE_EQ(dz[1], -0.7);
    const std::vector<std::array<double, 2>> diag{{1, 0}, {0, 2}};
    dz = lm_step(diag, std::vector<double>{1, 1}, 0.5);
    EXPECT_DOUBLE_EQ(dz[0], 0.5);
    EXPECT_DOUBLE_EQ(dz[1], 0.4);
}

TEST(LmStep, SingularReportsSmallestSingularValue) {
    const std::vector<std::array<double, 2>> rank1{{1, 2}, {2, 4}};
    try {
        lm_step(rank1, std::vector<double>{1, 1}, 0.0);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("smallest singular value"), std::string::npos);
    }
    EXPECT_THROW(lm_step(rank1, std::vector<double>{1}, 0.5), ValidationError);
}

TEST(Jacobian, FiniteAndNonzero) {
    const GridSpec g(20, 50, 100.0);
    const auto G = sensitivity_jacobian({0.8, 0.25}, example51(), g, 0.5, 1e-3);
    ASSERT_EQ(G.size(), g.n());
    double c0 = 0, c1 = 0;
    for (const auto& row : G) {
        ASSERT_TRUE(std::isfinite(row[0]) && std::isfinite(row[1]));
        c0 += row[0] * row[0];
        c1 += row[1] * row[1];
    }
    EXPECT_GT(c0, 0.0);
    EXPECT_GT(c1, 0.0);
}

// D(h) - R = O(h^2) where R = (4 D(h/2) - D(h)) / 3 is the Richardson estimate;
// halving h must shrink the gap by ~4.
TEST(Jacobian, CentralDifferenceOrder) {
    const GridSpec g(10, 40, 100.0);
    const Orders z{0.6, 0.4};
    const std::size_t k = 20;
    double entry[3];
    const double steps[3] = {0.04, 0.02, 0.01};
    for (int i = 0; i < 3; ++i) entry[i] = sensitivity_jacobian(z, example51(), g, 0.5, steps[i])[k][0];
    const double richardson = (4 * entry[2] - entry[1]) / 3;
    const double gap_coarse = std::abs(entry[0] - richardson);
    const double gap_fine = std::abs(entry[1] - richardson);
    ASSERT_GT(gap_fine, 0.0);
    EXPECT_GT(gap_coarse / gap_fine, 3.0);
    EXPECT_LT(gap_coarse / gap_fine, 5.0);
}

TEST(Jacobian, ClampedStencilUsesClampedWidth) {
    const GridSpec g(10, 20, 100.0);
    const auto inside = sensitivity_jacobian({0.5, 0.5}, example51(), g, 0.5, 1e-3);
    const auto edge = sensitivity_jacobian({0.01, 0.5}, example51(), g, 0.5, 1e-3);
    const auto a_hi = observe(example51().with_orders(0.011, 0.5), g, 0.5);
    const auto a_mid = observe(example51().with_orders(0.01, 0.5), g, 0.5);
    for (std::size_t k = 0; k < g.n(); ++k) EXPECT_NEAR(edge[k][0], (a_hi.values[k] - a_mid.values[k]) / 1e-3, 1e-9);
    EXPECT_EQ(inside.size(), edge.size());
}

TEST(InvertOrders, ExactStartIsFixedPoint) {
    const auto obs = synthetic({0.5, 0.5});
    InversionConfig cfg;
    cfg.z0 = {0.5, 0.5};
    const auto r = invert_orders(obs, example51(), kTiny, cfg, Orders{0.5, 0.5});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.reason, StopReason::StepTolerance);
    EXPECT_LE(*r.rel_error, 1e-10);
    EXPECT_EQ(r.iterations, 1);
}

TEST(InvertOrders, TinyGridRoundTrip) {
    const auto obs = synthetic({0.5, 0.5});
    const auto r = invert_orders(obs, example51(), kTiny, InversionConfig{}, Orders{0.5, 0.5});
    EXPECT_TRUE(r.converged) << to_string(r.reason);
    EXPECT_LE(*r.rel_error, 1e-3);
    EXPECT_EQ(static_cast<std::size_t>(r.iterations), r.history.size());
    EXPECT_GE(r.z_inv.alpha, 0.01);
    EXPECT_LE(r.z_inv.gamma, 0.99);
}

namespace {

double misfit(const Orders& z, const ObservationSeries& data) {
    const auto model = synthetic(z);
    double sq = 0.0;
    for (std::size_t k = 0; k < model.values.size(); ++k) sq += std::pow(model.values[k] - data.values[k], 2);
    return std::sqrt(sq);
}

}  // namespace

// Random targets from the centre start. Misses are accepted only when the
// iteration converged at a strict local minimum of the misfit (checked on the
// 8 neighbours at distance 0.01); every miss is printed.
TEST(InvertOrders, RandomRoundTripsFromCentre) {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> d(0.2, 0.9);
    InversionConfig cfg;
    cfg.z0 = {0.5, 0.5};
    int recovered = 0;
    for (int i = 0; i < 20; ++i) {
        const Orders z{d(rng), d(rng)};
        const auto data = synthetic(z);
        const auto r = invert_orders(data, example51(), kTiny, cfg, z);
        if (r.converged && *r.rel_error <= 1e-3) {
            ++recovered;
            continue;
        }
        ASSERT_TRUE(r.converged) << to_string(r.reason);
        const double here = misfit(r.z_inv, data);
        for (int da = -1; da <= 1; ++da)
            for (int dg = -1; dg <= 1; ++dg) {
                if (da == 0 && dg == 0) continue;
                const Orders nb = clamp_orders({r.z_inv.alpha + 0.01 * da, r.z_inv.gamma + 0.01 * dg}, 0.01);
                EXPECT_GT(misfit(nb, data), here) << "target (" << z.alpha << "," << z.gamma << ")";
            }
        std::printf("  local minimum: target (%.4f, %.4f) stopped at (%.4f, %.4f), misfit %.3e\n", z.alpha, z.gamma,
                    r.z_inv.alpha, r.z_inv.gamma, here);
    }
    std::printf("  recovered %d of 20 targets from z0 = (0.5, 0.5)\n", recovered);
    RecordProperty("recovered_of_20", recovered);
    EXPECT_GE(recovered, 1);
}

// The least-squares surface has spurious basins for some targets (gamma > alpha
// from a (0,0) start), so the round-trip property is local: start within 0.1.
TEST(InvertOrders, RandomRoundTripsFromNearbyStart) {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> d(0.2, 0.9);
    std::uniform_real_distribution<double> offset(-0.1, 0.1);
    int recovered = 0;
    std::string misses;
    for (int i = 0; i < 20; ++i) {
        const Orders z{d(rng), d(rng)};
        InversionConfig cfg;
        cfg.z0 = {z.alpha + offset(rng), z.gamma + offset(rng)};
        const auto r = invert_orders(synthetic(z), example51(), kTiny, cfg, z);
        if (r.converged && *r.rel_error <= 1e-3) {
            ++recovered;
        } else {
            misses += " (" + std::to_string(z.alpha) + "," + std::to_string(z.gamma) + ")";
        }
    }
    EXPECT_GE(recovered, 18) << "missed:" << misses;
}

TEST(InvertOrders, FarStartMayStopInSpuriousBasin) {
    const Orders z{0.389341, 0.610179};
    const auto r = invert_orders(synthetic(z), example51(), kTiny, InversionConfig{}, z);
    EXPECT_TRUE(r.converged);
    EXPECT_GT(*r.rel_error, 0.1);
    InversionConfig near;
    near.z0 = {0.45, 0.55};
    EXPECT_LE(*invert_orders(synthetic(z), example51(), kTiny, near, z).rel_error, 1e-3);
}

TEST(InvertOrders, NoExactOrdersMeansNoError) {
    const auto r = invert_orders(synthetic({0.5, 0.5}), example51(), kTiny, InversionConfig{});
    EXPECT_FALSE(r.rel_error.has_value());
}

TEST(InvertOrders, Validation) {
    auto obs = synthetic({0.5, 0.5});
    InversionConfig bad;
    bad.sigma = 0.0;
    EXPECT_THROW(invert_orders(obs, example51(), kTiny, bad), ValidationError);
    auto shifted = obs;
    shifted.times[3] += 0.1;
    try {
        invert_orders(shifted, example51(), kTiny, InversionConfig{});
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos) << e.what();
    }
    EXPECT_THROW(invert_orders(obs, example51(), GridSpec(8, 10, 100.0), InversionConfig{}), ValidationError);
    obs.x0 = 0.3;
    EXPECT_THROW(invert_orders(obs, example51(), kTiny, InversionConfig{}), ValidationError);
}

TEST(InversionConfig, Validation) {
    EXPECT_NO_THROW(validate(InversionConfig{}));
    auto check = [](auto mutate) {
        InversionConfig c;
        mutate(c);
        EXPECT_THROW(validate(c), ValidationError);
    };
    check([](InversionConfig& c) { c.j0 = 0; });
    check([](InversionConfig& c) { c.max_iter = 0; });
    check([](InversionConfig& c) { c.step_tol = 0; });
    check([](InversionConfig& c) { c.jacobian_step = 0.2; });
    check([](InversionConfig& c) { c.clamp_margin = 0.2; });
}

TEST(Replicates, SingleNoiseFreeMatchesDirectCall) {
    ReplicateSpec spec{example51(), kTiny, 0.5, {0.8, 0.25}, 0.0, {}, 7};
    const auto summary = run_replicates(spec, 1);
    const auto direct = invert_orders(synthetic({0.8, 0.25}), example51(), kTiny, {}, Orders{0.8, 0.25});
    ASSERT_EQ(summary.successes, 1);
    EXPECT_EQ(summary.mean_z, direct.z_inv);
    EXPECT_EQ(summary.mean_rel_error, *direct.rel_error);
    EXPECT_EQ(summary.mean_iterations, direct.iterations);
}

TEST(Replicates, DeterministicAcrossRuns) {
    ReplicateSpec spec{example51(), kTiny, 0.5, {0.8, 0.25}, 0.01, {}, 11};
    const auto a = run_replicates(spec, 4);
    const auto b = run_replicates(spec, 4);
    EXPECT_EQ(a.mean_z, b.mean_z);
    EXPECT_EQ(a.mean_rel_error, b.mean_rel_error);
    EXPECT_EQ(a.successes + a.failures, 4);
    ASSERT_EQ(a.runs.size(), 4u);
    const auto noisy2 = add_noise(synthetic({0.8, 0.25}), 0.01, 13);
    const auto third = invert_orders(noisy2, example51(), kTiny, {}, Orders{0.8, 0.25});
    EXPECT_EQ(a.runs[2].z_inv, third.z_inv);
}
