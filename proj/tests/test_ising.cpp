#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "nugate/ising.hpp"

using namespace nugate;

namespace {

/// exp(−iεH′), H′ = Σ_b σ^y_{anc b} ⊗ Σ_b, through an eigendecomposition of
/// the dense Hermitian generator.
Matrix dense_generator_exponential(const IsingChain& chain, double tau, double eps) {
    const std::size_t L = chain.sites(), n = L + chain.bonds();
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Matrix h = Matrix::Zero(dim, dim);
    const auto bonds = bond_placements(chain, tau, true);
    for (std::size_t b = 0; b < bonds.size(); ++b) {
        const std::size_t abit = std::size_t{1} << (L + b);
        for (std::size_t col = 0; col < static_cast<std::size_t>(dim); ++col) {
            const double sv = bonds[b].sigma[detail::local_index(col, bonds[b].qubits)];
            const std::size_t row = col ^ abit;
            // σ^y|0⟩ = i|1⟩, σ^y|1⟩ = −i|0⟩
            const cplx y = (col & abit) ? cplx(0, -1) : cplx(0, 1);
            h(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += y * sv;
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Eigen::VectorXcd phase = (cplx(0, -eps) * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST(Chain, EnergyAndValidation) {
    const IsingChain c({1, -1, 1});
    EXPECT_EQ(c.sites(), 4u);
    EXPECT_DOUBLE_EQ(c.ground_energy(), -3.0);
    EXPECT_DOUBLE_EQ(c.energy(0b0000), -1.0);  // all aligned: −(1 − 1 + 1)
    EXPECT_DOUBLE_EQ(c.energy(0b0011), -3.0);  // only the middle bond is anti-aligned
    EXPECT_THROW(IsingChain({2}), ArgumentError);
    EXPECT_THROW(IsingChain(std::vector<int>{}), ArgumentError);
}

TEST(Chain, RandomChainIsDeterministicAndBalanced) {
    Rng a(42), b(42);
    EXPECT_EQ(random_chain(5, a).couplings(), random_chain(5, b).couplings());
    EXPECT_EQ(random_chain(2, a).bonds(), 1u);
    Rng r(43);
    const auto c = random_chain(10001, r);
    double mean = 0.0;
    for (const int j : c.couplings()) mean += j;
    EXPECT_NEAR(mean / 1e4, 0.0, 0.03);
    EXPECT_THROW(random_chain(1, r), ArgumentError);
}

TEST(BondSigma, Examples) {
    const auto id = bond_sigma(1, 0.0, true).sigma;
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(id[i], 1.0);
    const auto f = bond_sigma(1, 10.0, true).sigma;
    EXPECT_DOUBLE_EQ(f[0], 1.0);
    EXPECT_DOUBLE_EQ(f[1], std::exp(-20.0));
    EXPECT_DOUBLE_EQ(f[2], std::exp(-20.0));
    EXPECT_DOUBLE_EQ(f[3], 1.0);
    const auto u = bond_sigma(-1, 1.0, false).sigma;
    EXPECT_DOUBLE_EQ(u[0], std::exp(-1.0));
    EXPECT_DOUBLE_EQ(u[1], std::exp(1.0));
    EXPECT_DOUBLE_EQ(u[3], std::exp(-1.0));
    const auto n = bond_sigma(-1, 1.0, true).sigma;
    EXPECT_DOUBLE_EQ(n[0], std::exp(-2.0));
    EXPECT_DOUBLE_EQ(n[1], 1.0);
    EXPECT_THROW(bond_sigma(1, -1.0, true), ArgumentError);
}

TEST(BondSigma, ProductReproducesBoltzmannWeights) {
    Rng rng(31);
    const auto chain = random_chain(5, rng);
    const double tau = 0.7;
    const auto bonds = bond_placements(chain, tau, false);
    for (std::uint64_t z = 0; z < 32; ++z) {
        double w = 1.0;
        for (const auto& b : bonds) w *= b.sigma[detail::local_index(z, b.qubits)];
        EXPECT_NEAR(w, std::exp(-chain.energy(z) * tau), 1e-12 * w);
    }
}

TEST(ExactIte, Examples) {
    Rng rng(32);
    const IsingChain one({1});
    const auto psi = random_state(2, rng);
    const auto same = exact_ite(one, 0.0, psi);
    EXPECT_NEAR(fidelity(same, psi), 1.0, 1e-14);
    const auto lim = exact_ite(one, 40.0, uniform_superposition(2));
    EXPECT_NEAR(lim[0b00].real(), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(lim[0b11].real(), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(std::abs(lim[0b01]), 0.0, 1e-12);

    const IsingChain mixed({1, -1, 1});
    const auto g = ground_subspace(mixed);
    EXPECT_GE(g.overlap(exact_ite(mixed, 10.0, uniform_superposition(4))), 1.0 - 1e-8);
    EXPECT_THROW(exact_ite(mixed, 1.0, uniform_superposition(3)), ArgumentError);
}

TEST(ExactIte, GroundOverlapIsMonotoneInTau) {
    Rng rng(33);
    for (int t = 0; t < 5; ++t) {
        const auto chain = random_chain(6, rng);
        const auto g = ground_subspace(chain);
        double prev = -1.0;
        for (int tau = 0; tau <= 10; ++tau) {
            const double o = g.overlap(exact_ite(chain, tau, uniform_superposition(6)));
            EXPECT_GE(o, prev - 1e-14);
            prev = o;
        }
    }
}

TEST(GroundSubspace, Examples) {
    const auto g = ground_subspace(IsingChain({1}));
    EXPECT_DOUBLE_EQ(g.energy, -1.0);
    EXPECT_EQ(g.bitstrings, (std::vector<std::uint64_t>{0b00, 0b11}));
    Rng rng(34);
    for (int t = 0; t < 5; ++t) {
        const auto chain = random_chain(12, rng);
        const auto s = ground_subspace(chain);
        EXPECT_EQ(s.bitstrings.size(), 2u);
        EXPECT_DOUBLE_EQ(s.energy, chain.ground_energy());
        EXPECT_EQ(s.bitstrings[0] ^ s.bitstrings[1], (std::uint64_t{1} << 12) - 1);
    }
}

TEST(Protocol, ProductOfBondGatesIsSingleExponential) {
    Rng rng(35);
    for (std::size_t L = 2; L <= 5; ++L) {
        const auto chain = random_chain(L, rng);
        const double tau = 0.3 * static_cast<double>(L), eps = 0.41;
        const Matrix u = dense_generator_exponential(chain, tau, eps);
        const auto bonds = bond_placements(chain, tau, true);
        const std::size_t n = L + chain.bonds();
        for (int trial = 0; trial < 3; ++trial) {
            StateVector s = random_state(n, rng);
            Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
            for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
            for (std::size_t b = 0; b < bonds.size(); ++b)
                apply_embedding(s, bonds[b].sigma, eps, bonds[b].qubits, L + b);
            const Eigen::VectorXcd w = u * v;
            for (std::size_t i = 0; i < s.dim(); ++i)
                EXPECT_NEAR(std::abs(s[i] - w(static_cast<Eigen::Index>(i))), 0.0, 1e-10);
        }
    }
}

TEST(Protocol, TwoSitesIdempotentLimit) {
    const IsingChain chain({1});
    IteOptions opts;
    opts.max_rounds = 500;
    int ok = 0;
    const int runs = 2000;
    for (int i = 0; i < runs; ++i) {
        Rng rng = Rng::split(36, static_cast<std::uint64_t>(i));
        const auto r = ite_rus_protocol(chain, 10.0, 0.3, 0.01, rng, opts);
        if (!r.success) continue;
        ++ok;
        EXPECT_GE(r.fidelity_ite, 1.0 - 1e-6);
        EXPECT_EQ(r.bitstrings.size(), r.rounds);
        EXPECT_EQ(r.bitstrings.back(), "1");
    }
    EXPECT_NEAR(ok / double(runs), 0.5, 3.0 * std::sqrt(0.25 / runs) + 1e-3);
    EXPECT_NEAR(ite_success_probability(chain, 10.0, 0.3, 500), 0.5, 1e-12);
}

TEST(Protocol, TwoSitesFirstFlipFollowsSingleGateLaw) {
    const IsingChain chain({-1});
    const double tau = 0.5, eps = 0.1;
    const std::uint64_t runs = 20000;
    IteOptions opts;
    opts.max_rounds = 12;
    opts.record_bitstrings = false;
    std::vector<std::uint64_t> hist(12, 0);
    std::uint64_t cap = 0;
    for (std::uint64_t i = 0; i < runs; ++i) {
        Rng rng = Rng::split(37, i);
        const auto r = ite_rus_protocol(chain, tau, eps, 0.01, rng, opts);
        cap = r.round_cap;
        if (r.flip_round[0]) ++hist[*r.flip_round[0] - 1];
    }
    ASSERT_EQ(cap, 12u);
    const TradeoffQuery q{bond_sigma(-1, tau, true).sigma, uniform_superposition(2), 0.01, eps};
    int outside = 0;
    for (std::uint64_t n = 1; n <= cap; ++n) {
        const double p = shot_prob(q, n);
        if (std::abs(hist[n - 1] / double(runs) - p) > 3.0 * std::sqrt(p * (1 - p) / runs)) ++outside;
    }
    EXPECT_LE(outside, 1);
}

TEST(Protocol, SuccessFrequencyMatchesEnumeration) {
    Rng pick(38);
    const auto chain = random_chain(4, pick);
    IteOptions opts;
    opts.max_rounds = 30;
    opts.record_bitstrings = false;
    const int runs = 4000;
    int ok = 0;
    std::uint64_t cap = 0;
    for (int i = 0; i < runs; ++i) {
        Rng rng = Rng::split(39, static_cast<std::uint64_t>(i));
        const auto r = ite_rus_protocol(chain, 0.5, 0.3, 0.01, rng, opts);
        ok += r.success ? 1 : 0;
        cap = r.round_cap;
    }
    EXPECT_EQ(cap, std::min<std::uint64_t>(30, *multi_gate_threshold(bond_placements(chain, 0.5, true),
                                                                     uniform_superposition(4), 0.01, 0.3)));
    const double p = ite_success_probability(chain, 0.5, 0.3, cap);
    EXPECT_NEAR(ok / double(runs), p, 3.0 * std::sqrt(p * (1 - p) / runs) + 1e-3);
}

TEST(Protocol, SmallerEpsilonGivesHigherFidelityForTheSameFlipRounds) {
    // A success with flip rounds r_b leaves ∏_b sin(εΣ_b) cos^{r_b−1}(εΣ_b)|+⟩.
    // Pair every sampled success with the same rounds at a smaller ε.
    Rng pick(40);
    const auto chain = random_chain(4, pick);
    const double tau = 0.5;
    const auto bonds = bond_placements(chain, tau, true);
    const auto ite = exact_ite(chain, tau, uniform_superposition(4));
    const auto branch = [&](double eps, const std::vector<std::optional<std::uint64_t>>& rounds) {
        std::vector<cplx> v(16);
        for (std::size_t z = 0; z < 16; ++z) {
            double f = 0.25;
            for (std::size_t b = 0; b < bonds.size(); ++b) {
                const double x = eps * bonds[b].sigma[detail::local_index(z, bonds[b].qubits)];
                f *= std::sin(x) * std::pow(std::cos(x), static_cast<double>(*rounds[b] - 1));
            }
            v[z] = f;
        }
        return StateVector(4, v);
    };
    int paired = 0;
    for (std::uint64_t i = 0; i < 400; ++i) {
        Rng rng = Rng::split(41, i);
        IteOptions opts;
        opts.record_bitstrings = false;
        const auto r = ite_rus_protocol(chain, tau, 0.2, 0.01, rng, opts);
        if (!r.success) continue;
        ++paired;
        const auto big = branch(0.2, r.flip_round);
        EXPECT_NEAR(fidelity(big, *r.final_state), 1.0, 1e-10);
        EXPECT_NEAR(fidelity(big, ite), r.fidelity_ite, 1e-10);
        EXPECT_GT(fidelity(branch(0.02, r.flip_round), ite), r.fidelity_ite);
    }
    EXPECT_GT(paired, 5);
}

TEST(Protocol, Validation) {
    Rng rng(42);
    const IsingChain c({1, 1});
    EXPECT_THROW(ite_rus_protocol(c, 1.0, 0.0, 0.01, rng), ArgumentError);
    EXPECT_THROW(ite_rus_protocol(c, 1.0, 0.1, 1.5, rng), ArgumentError);
}
