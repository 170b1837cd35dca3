#pragma once

// Classical ±1 Ising chain H = −Σ_i J_i σ^z_i σ^z_{i+1}, its exact
// imaginary-time evolution, and the multi-ancilla repeat-until-success
// protocol that realizes e^{−Hτ} bond by bond.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nugate/analytics.hpp"
#include "nugate/errors.hpp"
#include "nugate/nonunitary.hpp"
#include "nugate/rng.hpp"
#include "nugate/sigma.hpp"
#include "nugate/state_vector.hpp"

namespace nugate {

class IsingChain {
public:
    IsingChain() = default;

    explicit IsingChain(std::vector<int> couplings) : couplings_(std::move(couplings)) {
        if (couplings_.empty()) throw ArgumentError("IsingChain: need at least two sites");
        for (const int j : couplings_)
            if (j != 1 && j != -1) throw ArgumentError("IsingChain: couplings must be +1 or -1");
    }

    std::size_t sites() const noexcept { return couplings_.size() + 1; }
    std::size_t bonds() const noexcept { return couplings_.size(); }
    const std::vector<int>& couplings() const noexcept { return couplings_; }
    int coupling(std::size_t bond) const { return couplings_.at(bond); }

    /// E(z) with spin s_q = +1 for bit 0 and −1 for bit 1.
    double energy(std::uint64_t bits) const {
        double e = 0.0;
        for (std::size_t b = 0; b < couplings_.size(); ++b) {
            const bool aligned = ((bits >> b) & 1U) == ((bits >> (b + 1)) & 1U);
            e -= couplings_[b] * (aligned ? 1.0 : -1.0);
        }
        return e;
    }

    /// Every bond of an open chain can be satisfied.
    double ground_energy() const noexcept { return -static_cast<double>(couplings_.size()); }

private:
    std::vector<int> couplings_;
};

inline IsingChain random_chain(std::size_t sites, Rng& rng) {
    if (sites < 2) throw ArgumentError("random_chain: need at least two sites");
    std::vector<int> j(sites - 1);
    for (auto& x : j) x = rng.bernoulli(0.5) ? 1 : -1;
    return IsingChain(std::move(j));
}

struct BondSigma {
    int J = 1;
    double tau = 0.0;
    bool normalized = true;
    DiagonalSigma sigma;
};

/// e^{J σ^z σ^z τ} on a bond, local index bit 0 = left site. Normalized form
/// divides by e^{|J|τ}: J > 0 → diag(1, e^{−2Jτ}, e^{−2Jτ}, 1),
/// J < 0 → diag(e^{2Jτ}, 1, 1, e^{2Jτ}).
inline BondSigma bond_sigma(int J, double tau, bool normalized) {
    if (J != 1 && J != -1) throw ArgumentError("bond_sigma: J must be +1 or -1");
    if (!(tau >= 0.0)) throw ArgumentError("bond_sigma: tau must be non-negative");
    const double jt = static_cast<double>(J) * tau;
    if (normalized) {
        const double small = std::exp(-2.0 * tau);
        const double aligned = J > 0 ? 1.0 : small, anti = J > 0 ? small : 1.0;
        return {J, tau, true, DiagonalSigma::raw({aligned, anti, anti, aligned})};
    }
    const double aligned = std::exp(jt), anti = std::exp(-jt);
    return {J, tau, false, DiagonalSigma::raw({aligned, anti, anti, aligned})};
}

/// Bond Σ_b placed on sites (b, b+1).
inline std::vector<PlacedSigma> bond_placements(const IsingChain& chain, double tau, bool normalized) {
    std::vector<PlacedSigma> out;
    for (std::size_t b = 0; b < chain.bonds(); ++b)
        out.push_back({bond_sigma(chain.coupling(b), tau, normalized).sigma, {b, b + 1}});
    return out;
}

/// e^{−Hτ}ψ0 / ‖·‖. H is diagonal, so this is an elementwise reweighting.
/// Energies are shifted by the ground energy; throws AnnihilationError when
/// every weight underflows.
inline StateVector exact_ite(const IsingChain& chain, double tau, const StateVector& psi0) {
    if (psi0.num_qubits() != chain.sites()) throw ArgumentError("exact_ite: state size does not match chain");
    if (!(tau >= 0.0)) throw ArgumentError("exact_ite: tau must be non-negative");
    const double e0 = chain.ground_energy();
    std::vector<cplx> out(psi0.dim());
    for (std::size_t z = 0; z < out.size(); ++z) out[z] = psi0[z] * std::exp(-(chain.energy(z) - e0) * tau);
    StateVector s(psi0.num_qubits(), std::move(out), false);
    if (!(s.norm_squared() > 0.0)) throw AnnihilationError("exact_ite: all weights underflowed");
    s.normalize();
    return s;
}

struct GroundSubspace {
    double energy = 0.0;
    std::vector<std::uint64_t> bitstrings;

    /// <ψ| P_ground |ψ>
    double overlap(const StateVector& psi) const {
        double p = 0.0;
        for (const auto z : bitstrings) p += std::norm(psi[z]);
        return p;
    }
};

inline constexpr std::size_t kMaxEnumerationSites = 24;

/// Exact minimum energy and every minimizing bitstring, by enumeration.
inline GroundSubspace ground_subspace(const IsingChain& chain) {
    if (chain.sites() > kMaxEnumerationSites) throw SizeError("ground_subspace: at most 24 sites");
    GroundSubspace g{std::numeric_limits<double>::infinity(), {}};
    const std::uint64_t n = std::uint64_t{1} << chain.sites();
    for (std::uint64_t z = 0; z < n; ++z) {
        const double e = chain.energy(z);
        if (e < g.energy - 1e-9) {
            g.energy = e;
            g.bitstrings.clear();
        }
        if (std::abs(e - g.energy) <= 1e-9) g.bitstrings.push_back(z);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Multi-ancilla RUS protocol

/// Probability that every bond ancilla flips within `rounds` rounds from
/// |+⟩^L: <∏_b (1 − cos^{2·rounds}(εΣ_b))> with normalized bonds.
inline double ite_success_probability(const IsingChain& chain, double tau, double epsilon, std::uint64_t rounds) {
    if (chain.sites() > kMaxEnumerationSites) throw SizeError("ite_success_probability: at most 24 sites");
    const auto bonds = bond_placements(chain, tau, true);
    const std::size_t dim = std::size_t{1} << chain.sites();
    double total = 0.0;
    for (std::size_t z = 0; z < dim; ++z) {
        double p = 1.0;
        for (const auto& b : bonds) {
            const double c = std::cos(epsilon * b.sigma[detail::local_index(z, b.qubits)]);
            p *= 1.0 - std::pow(c * c, static_cast<double>(rounds));
        }
        total += p;
    }
    return total / static_cast<double>(dim);
}

struct IteOptions {
    /// Extra cap on rounds; 0 keeps only the shared threshold (and the global
    /// 10^7 cap).
    std::uint64_t max_rounds = 0;
    bool record_bitstrings = true;
};

struct IteRunReport {
    bool success = false;
    std::uint64_t rounds = 0;
    std::optional<std::uint64_t> n_star;  // shared threshold; nullopt = unbounded
    std::uint64_t round_cap = 0;
    std::vector<std::string> bitstrings;  // ancilla record per round, char b = bond b
    std::vector<std::optional<std::uint64_t>> flip_round;  // per bond, 1-based
    std::optional<StateVector> final_state;                 // physical qubits
    double fidelity_ite = std::numeric_limits<double>::quiet_NaN();
    double fidelity_ground = std::numeric_limits<double>::quiet_NaN();
};

/// Register: sites 0..L−1, ancilla of bond b on L + b. Each round applies the
/// embedded gate of every bond whose ancilla has not flipped yet, then
/// measures those ancillas. Flipped ancillas stay in |1⟩ and their gate is no
/// longer applied. Runs until all ancillas have flipped or the round cap
/// (shared threshold n*, optionally tightened by options.max_rounds) is hit.
inline IteRunReport ite_rus_protocol(const IsingChain& chain, double tau, double epsilon, double eta, Rng& rng,
                                     const IteOptions& options = {}) {
    if (!(epsilon > 0.0)) throw ArgumentError("ite_rus_protocol: epsilon must be positive");
    if (!(eta > 0.0 && eta < 1.0)) throw ArgumentError("ite_rus_protocol: eta must lie in (0, 1)");
    const std::size_t L = chain.sites(), B = chain.bonds();
    if (L + B > 26) throw SizeError("ite_rus_protocol: register too large");

    const auto bonds = bond_placements(chain, tau, true);
    const StateVector psi0 = uniform_superposition(L);

    IteRunReport rep;
    rep.n_star = multi_gate_threshold(bonds, psi0, eta, epsilon);
    std::uint64_t cap = rep.n_star ? *rep.n_star : kMaxShotsCap;
    if (options.max_rounds > 0) cap = std::min(cap, options.max_rounds);
    cap = std::min(cap, kMaxShotsCap);
    rep.round_cap = cap;
    rep.flip_round.assign(B, std::nullopt);

    // |0…0⟩_anc ⊗ |+⟩^L
    std::vector<cplx> amps(std::size_t{1} << (L + B));
    std::copy(psi0.amplitudes().begin(), psi0.amplitudes().end(), amps.begin());
    StateVector reg(L + B, std::move(amps), false);

    std::vector<bool> flipped(B, false);
    std::size_t remaining = B;
    for (std::uint64_t round = 1; round <= cap && remaining > 0; ++round) {
        for (std::size_t b = 0; b < B; ++b)
            if (!flipped[b]) apply_embedding(reg, bonds[b].sigma, epsilon, bonds[b].qubits, L + b);
        std::string bits(B, '1');
        for (std::size_t b = 0; b < B; ++b) {
            if (flipped[b]) continue;
            if (measure(reg, L + b, rng) == 1) {
                flipped[b] = true;
                rep.flip_round[b] = round;
                --remaining;
            } else {
                bits[b] = '0';
            }
        }
        rep.rounds = round;
        if (options.record_bitstrings) rep.bitstrings.push_back(std::move(bits));
    }

    rep.success = remaining == 0;
    if (rep.success) {
        std::vector<std::size_t> anc(B);
        std::vector<int> ones(B, 1);
        for (std::size_t b = 0; b < B; ++b) anc[b] = L + b;
        rep.final_state = extract_slice(reg, anc, ones);
        rep.fidelity_ite = fidelity(*rep.final_state, exact_ite(chain, tau, psi0));
        rep.fidelity_ground = ground_subspace(chain).overlap(*rep.final_state);
    }
    return rep;
}

}  // namespace nugate
