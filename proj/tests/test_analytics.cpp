#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nugate/analytics.hpp"
#include "nugate/experiments.hpp"
#include "nugate/rng.hpp"

using namespace nugate;

namespace {

const DiagonalSigma kHalf = DiagonalSigma::normalized({1.0, 0.5});
const DiagonalSigma kProj = DiagonalSigma::normalized({1.0, 0.0});
const StateVector kPlus = uniform_superposition(1);

TradeoffQuery half_query(double eta, double eps) { return {kHalf, kPlus, eta, eps}; }

DiagonalSigma random_sigma(std::size_t nq, Rng& rng) {
    std::vector<double> v(std::size_t{1} << nq);
    for (auto& x : v) x = rng.uniform();
    return DiagonalSigma::normalized(v);
}

}  // namespace

TEST(Moments, ExactRationalValues) {
    const auto m = moments(kHalf, kPlus);
    EXPECT_DOUBLE_EQ(m.m2, 0.625);
    EXPECT_DOUBLE_EQ(m.m4, 0.53125);
    EXPECT_DOUBLE_EQ(m.m6, 0.5078125);
    EXPECT_NEAR(m.m2 * m.m2 / m.cauchy_gap(), 100.0 / 9.0, 1e-12);
}

TEST(Moments, CauchyInequalityAndEqualityCase) {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t nq = 1 + rng.below(4);
        const auto sigma = random_sigma(nq, rng);
        const auto psi = random_state(nq, rng);
        const auto m = moments(sigma, psi);
        EXPECT_GE(m.cauchy_gap(), -1e-15);
        for (const double x : {m.m2, m.m4, m.m6, m.m8}) {
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, 1.0 + 1e-12);
        }
    }
    // Equality iff Σ² = Σ on the support.
    const auto proj = DiagonalSigma::normalized({1.0, 0.0, 1.0, 0.0});
    const auto m = moments(proj, random_state(2, rng));
    EXPECT_NEAR(m.cauchy_gap(), 0.0, 1e-12);
    EXPECT_TRUE(is_idempotent_on(proj.values(), basis_weights(random_state(2, rng))));
    // Support-relative: 0.5 is harmless when ψ0 has no weight there.
    const auto partial = DiagonalSigma::normalized({1.0, 0.5});
    const auto w = basis_weights(init_basis_state(1, 0));
    EXPECT_TRUE(is_idempotent_on(partial.values(), w));
    EXPECT_NEAR(moments(partial.values(), w).cauchy_gap(), 0.0, 1e-15);
}

TEST(ShotProb, Examples) {
    // Σ = I: scalar geometric law.
    const auto id = DiagonalSigma::normalized({1.0, 1.0});
    const double eps = 0.2;
    for (std::uint64_t n = 1; n <= 5; ++n)
        EXPECT_NEAR(shot_prob({id, kPlus, 0.01, eps}, n),
                    std::pow(std::sin(eps), 2) * std::pow(std::cos(eps), 2.0 * (n - 1)), 1e-15);
    EXPECT_NEAR(shot_prob({kProj, kPlus, 0.01, std::numbers::pi / 2}, 2), 0.0, 1e-15);
    EXPECT_NEAR(shot_prob(half_query(0.01, 0.1), 1), 0.5 * (std::pow(std::sin(0.1), 2) + std::pow(std::sin(0.05), 2)),
                1e-15);
    EXPECT_NEAR(shot_prob(half_query(0.01, 0.1), 1), 0.0062323, 1e-7);
}

TEST(ShotProb, SumsToCumulative) {
    const auto q = half_query(0.01, 0.1);
    const auto n = *threshold_shots(q);
    double s = 0.0;
    for (std::uint64_t k = 1; k <= n; ++k) s += shot_prob(q, k);
    EXPECT_NEAR(s, cumulative_success(q), 1e-12);
}

TEST(Fidelity, IdempotentIsAlwaysOne) {
    for (const double eps : {0.01, 0.3, 1.0})
        for (std::uint64_t n : {1, 5, 50}) {
            EXPECT_NEAR(fidelity_after({kProj, kPlus, 0.01, eps}, n), 1.0, 1e-14);
            EXPECT_NEAR(fidelity_after({DiagonalSigma::normalized({1.0, 1.0}), kPlus, 0.01, eps}, n), 1.0, 1e-14);
        }
}

TEST(Fidelity, SeriesRemainderIsSixthOrder) {
    double diff[3];
    const double eps[] = {0.1, 0.05, 0.025};
    for (int i = 0; i < 3; ++i) {
        const auto q = half_query(0.01, eps[i]);
        diff[i] = std::abs(fidelity_after(q, 20, FidelityMode::exact) - fidelity_after(q, 20, FidelityMode::series));
    }
    const double order = std::log2(diff[1] / diff[2]);
    EXPECT_NEAR(order, 6.0, 0.5) << diff[0] << " " << diff[1] << " " << diff[2];
    const double c = diff[0] / std::pow(eps[0], 6);
    for (int i = 1; i < 3; ++i) EXPECT_LE(diff[i], 1.5 * c * std::pow(eps[i], 6));
}

TEST(Fidelity, AtThresholdMeetsTarget) {
    // Σ drawn as normalized singular values of Gaussian matrices.
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        const auto sigma = experiments::random_sigma(2, rng);
        const TradeoffQuery q{sigma, uniform_superposition(2), 0.01, 0.01};
        const auto n = threshold_shots(q);
        if (!n) continue;
        EXPECT_GE(fidelity_after(q, *n), 0.99 * 0.99 - 0.01);
    }
}

TEST(Fidelity, RefinedThresholdMeetsTargetForSpreadSpectra) {
    // Uniform entries give spectra where the dropped cubic term matters; the
    // leading root can then overshoot by a few hundredths.
    Rng rng(12);
    for (int i = 0; i < 200; ++i) {
        const auto sigma = random_sigma(2, rng);
        const TradeoffQuery q{sigma, uniform_superposition(2), 0.01, 0.01};
        const auto n = threshold_shots(q, true);
        if (!n) continue;
        EXPECT_GE(fidelity_after(q, *n), 0.99 * 0.99 - 0.01);
    }
}

TEST(Threshold, Examples) {
    EXPECT_EQ(*threshold_shots(half_query(0.01, 0.1)), 94u);
    EXPECT_EQ(*threshold_shots(half_query(0.01, 0.05)), 377u);
    EXPECT_FALSE(threshold_shots({kProj, kPlus, 0.01, 0.1}).has_value());
}

TEST(Threshold, RefinementSolvesCubic) {
    const auto q = half_query(0.01, 0.01);
    const auto lead = *threshold_shots(q, false), refined = *threshold_shots(q, true);
    EXPECT_LE(refined, lead);
    // a x²/4 + b x³/8 = 2η with a = gap/m2², b = (m8 m2 − m6 m4)/m2².
    const auto m = moments(kHalf, kPlus);
    const double a = (m.m6 * m.m2 - m.m4 * m.m4) / (m.m2 * m.m2);
    const double b = (m.m8 * m.m2 - m.m6 * m.m4) / (m.m2 * m.m2);
    const auto g = [&](double n) {
        const double x = n * 1e-4;
        return a * x * x / 4 + b * x * x * x / 8 - 0.02;
    };
    EXPECT_LE(g(static_cast<double>(refined)), 0.0);
    EXPECT_GT(g(static_cast<double>(refined + 1)), 0.0);
}

TEST(Cumulative, Examples) {
    EXPECT_NEAR(cumulative_success({kProj, kPlus, 0.01, 0.1}), 0.5, 1e-15);
    const double lim = limiting_success(kHalf, kPlus, 0.01).value;
    EXPECT_NEAR(std::abs(cumulative_success(half_query(0.01, 0.1)) - lim), 0.0, 0.02);
    // Closed form of the limit with f = 10/3.
    const double c = std::sqrt(0.08) * 10.0 / 3.0;
    EXPECT_NEAR(lim, 1.0 - 0.5 * (std::exp(-c) + std::exp(-0.25 * c)), 1e-14);
    EXPECT_NEAR(lim, 0.41022, 5e-5);
}

TEST(Cumulative, ApproachesLimitAsEpsilonShrinks) {
    const double lim = limiting_success(kHalf, kPlus, 0.01).value;
    double prev = 1.0;
    for (const double eps : {0.1, 0.05, 0.02, 0.01}) {
        const double gap = std::abs(cumulative_success(half_query(0.01, eps)) - lim);
        EXPECT_LE(gap, prev + 1e-4) << eps;
        prev = gap;
    }
    EXPECT_LT(prev, 5e-3);
}

TEST(Cumulative, SmallEpsilonAgreesWithLimitForRandomSigma) {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        const auto sigma = random_sigma(1 + rng.below(3), rng);
        const auto psi = uniform_superposition(sigma.num_qubits());
        const TradeoffQuery q{sigma, psi, 0.01, 1e-3};
        EXPECT_NEAR(cumulative_success(q), limiting_success(sigma, psi, 0.01).value, 5e-3);
    }
}

TEST(Limit, LimitIdentity) {
    EXPECT_NEAR(std::pow(std::cos(0.01), 20000.0), std::exp(-1.0), 1e-4);
    for (double a = 0.1; a <= 2.0; a += 0.1)
        for (double b = 0.1; b <= 2.0; b += 0.1)
            EXPECT_NEAR(std::pow(std::cos(a * 0.01), b / 1e-4), std::exp(-a * a * b / 2.0), 1e-3);
}

TEST(Limit, IdempotentSpecialCaseAndSqrtEtaScaling) {
    const auto r = limiting_success(kProj, kPlus, 0.01);
    EXPECT_TRUE(r.idempotent);
    EXPECT_DOUBLE_EQ(r.value, 0.5);
    // p_η/√η → √8 f <Σ²> as η → 0.
    const auto m = moments(kHalf, kPlus);
    const double c0 = std::sqrt(8.0) * std::sqrt(m.m2 * m.m2 / m.cauchy_gap()) * m.m2;
    double prev = 1e9;
    for (const double eta : {1e-2, 1e-4, 1e-6}) {
        const double dev = std::abs(limiting_success(kHalf, kPlus, eta).value / std::sqrt(eta) - c0);
        EXPECT_LT(dev, prev);
        prev = dev;
    }
    EXPECT_LT(prev / c0, 0.01);
}

TEST(MeanShots, Examples) {
    const auto id = DiagonalSigma::normalized({1.0, 1.0});
    EXPECT_NEAR(mean_shots(id, kPlus, 0.3), 1.0 / std::pow(std::sin(0.3), 2), 1e-12);
    EXPECT_NEAR(mean_shots(kHalf, kPlus, 0.1), 0.5 * (1 / std::pow(std::sin(0.1), 2) + 1 / std::pow(std::sin(0.05), 2)),
                1e-9);
    EXPECT_NEAR(mean_shots(kHalf, kPlus, 0.1), 250.33, 0.01);
    EXPECT_TRUE(std::isinf(mean_shots(kProj, kPlus, 0.1)));
}

TEST(MultiGate, SingleGateReducesToCumulative) {
    const std::vector<PlacedSigma> one{{kHalf, {0}}};
    EXPECT_NEAR(multi_gate_cumulative(one, kPlus, 0.01, 0.1), cumulative_success(half_query(0.01, 0.1)), 1e-15);
    const auto n = multi_gate_threshold(one, kPlus, 0.01, 0.1);
    EXPECT_EQ(*n, 94u);
}

TEST(MultiGate, IdempotentBondsGiveHalfPerBond) {
    const double a = std::exp(-20.0);
    const auto bond = DiagonalSigma::normalized({1.0, a, a, 1.0});
    for (std::size_t N = 2; N <= 6; ++N) {
        std::vector<PlacedSigma> gates;
        for (std::size_t b = 0; b < N; ++b) gates.push_back({bond, {b, b + 1}});
        const double p = multi_gate_cumulative(gates, uniform_superposition(N + 1), 0.01, 0.1);
        EXPECT_NEAR(p, std::pow(0.5, static_cast<double>(N)), 1e-8);
    }
}

TEST(MultiGate, RejectsBadPlacement) {
    const std::vector<PlacedSigma> bad{{kHalf, {3}}};
    EXPECT_THROW(multi_gate_cumulative(bad, uniform_superposition(2), 0.01, 0.1), UnsupportedConfiguration);
    const std::vector<PlacedSigma> rep{{DiagonalSigma::normalized({1, 0.5, 0.5, 1}), {1, 1}}};
    EXPECT_THROW(multi_gate_cumulative(rep, uniform_superposition(2), 0.01, 0.1), UnsupportedConfiguration);
}

TEST(Query, Validation) {
    EXPECT_THROW(cumulative_success({kHalf, kPlus, 0.0, 0.1}), ArgumentError);
    EXPECT_THROW(cumulative_success({kHalf, kPlus, 0.01, -0.1}), ArgumentError);
    EXPECT_THROW(cumulative_success({kHalf, uniform_superposition(2), 0.01, 0.1}), ArgumentError);
    EXPECT_THROW(DiagonalSigma::normalized({0.0, 0.0}), ArgumentError);
    EXPECT_THROW(DiagonalSigma::normalized({1.0, 0.5, 0.2}), ArgumentError);
    EXPECT_THROW(DiagonalSigma::normalized({1.0, -0.5}), ArgumentError);
}
