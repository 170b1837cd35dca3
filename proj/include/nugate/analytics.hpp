#pragma once

// Closed-form success-probability / fidelity trade-off of the
// repeat-until-success nonunitary gate. Every operator function of the
// diagonal Σ is evaluated eigenvalue-wise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nugate/errors.hpp"
#include "nugate/sigma.hpp"
#include "nugate/state_vector.hpp"

namespace nugate {

/// <ψ0|Σ^k|ψ0> for k = 2, 4, 6, 8.
struct MomentSet {
    double m2 = 0, m4 = 0, m6 = 0, m8 = 0;

    /// m6·m2 − m4², non-negative by the Cauchy inequality.
    double cauchy_gap() const noexcept { return m6 * m2 - m4 * m4; }
};

inline MomentSet moments(const std::vector<double>& sigma, const std::vector<double>& weights) {
    MomentSet m;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const double s2 = sigma[i] * sigma[i];
        m.m2 += weights[i] * s2;
        m.m4 += weights[i] * s2 * s2;
        m.m6 += weights[i] * s2 * s2 * s2;
        m.m8 += weights[i] * s2 * s2 * s2 * s2;
    }
    return m;
}

inline MomentSet moments(const DiagonalSigma& sigma, const StateVector& psi0) {
    require_same_dim(sigma, psi0);
    return moments(sigma.values(), basis_weights(psi0));
}

/// Below this Cauchy gap Σ is treated as a projector on the support of ψ0
/// and the fidelity never degrades with the shot count.
inline constexpr double kCauchyGapFloor = 1e-14;

struct TradeoffQuery {
    DiagonalSigma sigma;
    StateVector psi0;
    double eta = 0.01;      // target fidelity is (1 - eta)^2
    double epsilon = 0.1;   // rotation scale of the embedding

    void validate() const {
        require_same_dim(sigma, psi0);
        if (!(eta > 0.0 && eta < 1.0)) throw ArgumentError("TradeoffQuery: eta must lie in (0, 1)");
        if (!(epsilon > 0.0)) throw ArgumentError("TradeoffQuery: epsilon must be positive");
    }

    std::vector<double> weights() const { return basis_weights(psi0); }
};

// ---------------------------------------------------------------------------
// Weight-level kernels. `sigma` and `weights` are eigenvalue / probability
// vectors of equal length.

namespace closed_form {

inline double shot_prob(const std::vector<double>& sigma, const std::vector<double>& w, double eps,
                        std::uint64_t n) {
    if (n < 1) throw ArgumentError("shot_prob: n must be >= 1");
    const double e = static_cast<double>(n - 1);
    return expectation(sigma, w, [&](double s) {
        const double c = std::cos(eps * s), sn = std::sin(eps * s);
        return sn * sn * std::pow(c * c, e);
    });
}

/// |<ψ(n,ε)|ψ>|² from the closed quotient. NaN when the n-th shot branch has
/// zero weight (the output state does not exist).
inline double fidelity_exact(const std::vector<double>& sigma, const std::vector<double>& w, double eps,
                             std::uint64_t n) {
    const double e = static_cast<double>(n - 1);
    double overlap = 0.0, branch = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        if (w[i] == 0.0) continue;
        const double s = sigma[i];
        const double amp = std::sin(eps * s) * std::pow(std::cos(eps * s), e);
        overlap += w[i] * s * amp;
        branch += w[i] * amp * amp;
        m2 += w[i] * s * s;
    }
    if (m2 <= 0.0) throw AnnihilationError("fidelity_after: Σψ0 = 0, target undefined");
    if (branch <= std::numeric_limits<double>::min()) return std::numeric_limits<double>::quiet_NaN();
    return std::min(1.0, overlap * overlap / (branch * m2));
}

inline double fidelity_series(const MomentSet& m, double eps, std::uint64_t n) {
    if (m.m2 <= 0.0) throw AnnihilationError("fidelity_after: Σψ0 = 0, target undefined");
    const double h = static_cast<double>(n) / 2.0 - 1.0 / 3.0;
    return 1.0 - m.cauchy_gap() / (m.m2 * m.m2) * h * h * std::pow(eps, 4);
}

/// x = n ε² at the fidelity threshold. nullopt when Σ is idempotent on the
/// support (gap below the floor). With `refine` the cubic term of the
/// (nε²)-expansion is kept and the positive root is found by bisection.
inline std::optional<double> threshold_x(const MomentSet& m, double eta, bool refine = false) {
    const double gap = m.cauchy_gap();
    if (!(gap > kCauchyGapFloor)) return std::nullopt;
    const double a = gap / (m.m2 * m.m2);
    const double xq = std::sqrt(8.0 * eta / a);
    if (!refine) return xq;
    const double b = (m.m8 * m.m2 - m.m6 * m.m4) / (m.m2 * m.m2);
    const auto lhs = [&](double x) { return a * x * x / 4.0 + b * x * x * x / 8.0 - 2.0 * eta; };
    // b >= 0 (Chebyshev's sum inequality), so the root sits in (0, xq].
    double lo = 0.0, hi = xq;
    if (lhs(hi) < 0.0) return xq;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lhs(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline constexpr double kMaxShotCount = 9.2e18;

inline std::optional<std::uint64_t> threshold_shots(const MomentSet& m, double eta, double eps,
                                                    bool refine = false) {
    const auto x = threshold_x(m, eta, refine);
    if (!x) return std::nullopt;
    const double n = std::floor(*x / (eps * eps));
    return static_cast<std::uint64_t>(std::min(n, kMaxShotCount));
}

/// 1 − <cos^{2n}(εΣ)>. Without n, the n → ∞ projection limit <Σ²> is used.
inline double cumulative_success(const std::vector<double>& sigma, const std::vector<double>& w, double eps,
                                 std::optional<std::uint64_t> n) {
    if (!n) return moments(sigma, w).m2;
    const double e = static_cast<double>(*n);
    return 1.0 - expectation(sigma, w, [&](double s) {
               const double c = std::cos(eps * s);
               return std::pow(c * c, e);
           });
}

}  // namespace closed_form

// ---------------------------------------------------------------------------
// Public operations

/// Probability that the first flip happens at shot n:
/// <ψ0| sin²(εΣ) cos^{2n−2}(εΣ) |ψ0>.
inline double shot_prob(const TradeoffQuery& q, std::uint64_t n) {
    q.validate();
    return closed_form::shot_prob(q.sigma.values(), q.weights(), q.epsilon, n);
}

enum class FidelityMode { exact, series };

/// Fidelity of the n-shot output with the Σψ0 target.
inline double fidelity_after(const TradeoffQuery& q, std::uint64_t n, FidelityMode mode = FidelityMode::exact) {
    q.validate();
    if (n < 1) throw ArgumentError("fidelity_after: n must be >= 1");
    const auto w = q.weights();
    if (mode == FidelityMode::exact) return closed_form::fidelity_exact(q.sigma.values(), w, q.epsilon, n);
    return closed_form::fidelity_series(moments(q.sigma.values(), w), q.epsilon, n);
}

/// Shot count n* at which the fidelity drops to (1−η)². nullopt signals
/// "unbounded": Σ is idempotent on the support of ψ0 and the fidelity never
/// degrades.
inline std::optional<std::uint64_t> threshold_shots(const TradeoffQuery& q, bool refine = false) {
    q.validate();
    return closed_form::threshold_shots(moments(q.sigma, q.psi0), q.eta, q.epsilon, refine);
}

/// Success probability within n* shots: 1 − <cos^{2n*}(εΣ)>.
inline double cumulative_success(const TradeoffQuery& q, bool refine = false) {
    q.validate();
    const auto w = q.weights();
    const auto n = closed_form::threshold_shots(moments(q.sigma.values(), w), q.eta, q.epsilon, refine);
    return closed_form::cumulative_success(q.sigma.values(), w, q.epsilon, n);
}

struct LimitingSuccess {
    double value = 0.0;
    bool idempotent = false;  // projection special case, value = <Σ²>
};

/// ε → 0 limit of cumulative_success: 1 − <exp(−√(8η) f(Σ) Σ²)>,
/// f(Σ) = sqrt(<Σ²>² / (<Σ⁶><Σ²> − <Σ⁴>²)).
inline LimitingSuccess limiting_success(const DiagonalSigma& sigma, const StateVector& psi0, double eta) {
    require_same_dim(sigma, psi0);
    if (!(eta > 0.0 && eta < 1.0)) throw ArgumentError("limiting_success: eta must lie in (0, 1)");
    const auto w = basis_weights(psi0);
    const auto m = moments(sigma.values(), w);
    if (!(m.cauchy_gap() > kCauchyGapFloor)) return {m.m2, true};
    const double f = std::sqrt(m.m2 * m.m2 / m.cauchy_gap());
    const double c = std::sqrt(8.0 * eta) * f;
    return {1.0 - expectation(sigma.values(), w, [&](double s) { return std::exp(-c * s * s); }), false};
}

/// Average number of shots until the first flip, <ψ0| sin^{-2}(εΣ) |ψ0>.
/// +infinity when ψ0 has weight on a zero of sin(εΣ).
inline double mean_shots(const DiagonalSigma& sigma, const StateVector& psi0, double epsilon) {
    require_same_dim(sigma, psi0);
    if (!(epsilon > 0.0)) throw ArgumentError("mean_shots: epsilon must be positive");
    const auto w = basis_weights(psi0);
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= kZeroProbability) continue;
        const double s = std::sin(epsilon * sigma[i]);
        if (s == 0.0) return std::numeric_limits<double>::infinity();
        total += w[i] / (s * s);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Several commuting gates on one register

/// A diagonal Σ acting on `qubits` of a larger register; qubits[j] carries
/// bit j of Σ's local index.
struct PlacedSigma {
    DiagonalSigma sigma;
    std::vector<std::size_t> qubits;
};

namespace detail {

inline void check_placement(const PlacedSigma& p, std::size_t num_qubits) {
    if (p.qubits.size() != p.sigma.num_qubits())
        throw UnsupportedConfiguration("PlacedSigma: qubit count does not match Σ dimension");
    for (std::size_t i = 0; i < p.qubits.size(); ++i) {
        if (p.qubits[i] >= num_qubits) throw UnsupportedConfiguration("PlacedSigma: qubit out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (p.qubits[i] == p.qubits[j]) throw UnsupportedConfiguration("PlacedSigma: repeated qubit");
    }
}

inline std::size_t local_index(std::size_t basis, std::span<const std::size_t> qubits) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < qubits.size(); ++j) idx |= ((basis >> qubits[j]) & 1U) << j;
    return idx;
}

}  // namespace detail

/// Probability distribution of Σ's local index under |ψ0|².
inline std::vector<double> marginal_weights(const PlacedSigma& p, const std::vector<double>& weights) {
    std::vector<double> m(p.sigma.dim(), 0.0);
    for (std::size_t z = 0; z < weights.size(); ++z) m[detail::local_index(z, p.qubits)] += weights[z];
    return m;
}

/// Shared threshold for a set of gates: the smallest single-gate n* over
/// gates (each evaluated on its marginal distribution). nullopt when every
/// gate is idempotent on its support.
inline std::optional<std::uint64_t> multi_gate_threshold(std::span<const PlacedSigma> gates,
                                                         const StateVector& psi0, double eta, double epsilon,
                                                         bool refine = false) {
    const auto w = basis_weights(psi0);
    std::optional<std::uint64_t> shared;
    for (const auto& g : gates) {
        detail::check_placement(g, psi0.num_qubits());
        const auto n = closed_form::threshold_shots(moments(g.sigma.values(), marginal_weights(g, w)), eta,
                                                    epsilon, refine);
        if (n && (!shared || *n < *shared)) shared = n;
    }
    return shared;
}

/// <ψ0| Π_i (1 − cos^{2n*}(εΣ_i)) |ψ0>, the probability that every gate has
/// flipped its ancilla within the shared threshold. The Σ_i are diagonal, so
/// the product form is exact.
inline double multi_gate_cumulative(std::span<const PlacedSigma> gates, const StateVector& psi0, double eta,
                                    double epsilon, bool refine = false) {
    if (gates.empty()) throw ArgumentError("multi_gate_cumulative: no gates");
    if (!(eta > 0.0 && eta < 1.0)) throw ArgumentError("multi_gate_cumulative: eta must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ArgumentError("multi_gate_cumulative: epsilon must be positive");
    const auto n = multi_gate_threshold(gates, psi0, eta, epsilon, refine);
    const auto w = basis_weights(psi0);
    // Per-gate factor table over the local index.
    std::vector<std::vector<double>> factor(gates.size());
    for (std::size_t g = 0; g < gates.size(); ++g) {
        factor[g].resize(gates[g].sigma.dim());
        for (std::size_t i = 0; i < factor[g].size(); ++i) {
            const double s = gates[g].sigma[i];
            if (n) {
                const double c = std::cos(epsilon * s);
                factor[g][i] = 1.0 - std::pow(c * c, static_cast<double>(*n));
            } else {
                factor[g][i] = s * s;
            }
        }
    }
    double total = 0.0;
    for (std::size_t z = 0; z < w.size(); ++z) {
        if (w[z] == 0.0) continue;
        double prod = w[z];
        for (std::size_t g = 0; g < gates.size(); ++g)
            prod *= factor[g][detail::local_index(z, gates[g].qubits)];
        total += prod;
    }
    return total;
}

}  // namespace nugate
