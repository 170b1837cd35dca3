#pragma once

// Grover amplification of the ancilla flip: the single-ancilla transfer
// matrix, its multi-ancilla generalization, and the two ways of running it
// over an Ising chain (per bond with recursive reflections, or over the whole
// ancilla register at once).

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nugate/analytics.hpp"
#include "nugate/errors.hpp"
#include "nugate/ising.hpp"
#include "nugate/nonunitary.hpp"
#include "nugate/rng.hpp"
#include "nugate/sigma.hpp"
#include "nugate/state_vector.hpp"

namespace nugate {

// ---------------------------------------------------------------------------
// Single ancilla

/// Action of one iteration on the (cos-branch, sin-branch) coefficients,
/// t = <ψ0|cos²(εΣ)|ψ0>.
struct TransferMatrix2 {
    double t = 0.0;
    Eigen::Matrix2d entries;

    explicit TransferMatrix2(double t_) : t(t_) {
        if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("TransferMatrix2: t must lie in [0, 1]");
        entries << 2.0 * t - 1.0, -2.0 * (1.0 - t), 2.0 * t, 1.0 - 2.0 * (1.0 - t);
    }

    /// T^k (1, 1): coefficients after k iterations from the prepared state.
    Eigen::Vector2d coefficients(std::uint64_t k) const {
        Eigen::Vector2d a(1.0, 1.0);
        for (std::uint64_t i = 0; i < k; ++i) a = entries * a;
        return a;
    }

    /// t · α1², read off the matrix recursion.
    double failure(std::uint64_t k) const {
        const double a1 = coefficients(k)(0);
        return t * a1 * a1;
    }
};

/// cos²((2k+1) arccos √t).
inline double failure_prob(double t, std::uint64_t k) {
    if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("failure_prob: t must lie in [0, 1]");
    const double c = std::cos(static_cast<double>(2 * k + 1) * std::acos(std::sqrt(t)));
    return c * c;
}

/// t*_m = cos²((2m+1)π / (4k+2)), the t for which k iterations leave no
/// failure amplitude.
inline double optimal_t_roots(std::uint64_t k, std::uint64_t m) {
    if (k < 1) throw ArgumentError("optimal_t_roots: k must be >= 1");
    if (m > k) throw ArgumentError("optimal_t_roots: m must lie in [0, k]");
    const double c = std::cos(static_cast<double>(2 * m + 1) * std::numbers::pi / static_cast<double>(4 * k + 2));
    return c * c;
}

// ---------------------------------------------------------------------------
// Several ancillas

/// d_r = ||∏_i g_{r_i}(εΣ_i) ψ0||², g_0 = cos, g_1 = sin; bit i of r is the
/// outcome of ancilla i. The last entry (all ones) is s.
inline std::vector<double> branch_weights(std::span<const PlacedSigma> gates, const StateVector& psi0,
                                          double epsilon) {
    if (gates.empty()) throw ArgumentError("branch_weights: no gates");
    for (const auto& g : gates) detail::check_placement(g, psi0.num_qubits());
    const std::size_t n = gates.size();
    std::vector<double> d(std::size_t{1} << n, 0.0);
    std::vector<double> c(n), s(n);
    for (std::size_t z = 0; z < psi0.dim(); ++z) {
        const double w = std::norm(psi0[z]);
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = epsilon * gates[i].sigma[detail::local_index(z, gates[i].qubits)];
            c[i] = std::cos(x) * std::cos(x);
            s[i] = std::sin(x) * std::sin(x);
        }
        for (std::size_t r = 0; r < d.size(); ++r) {
            double p = w;
            for (std::size_t i = 0; i < n; ++i) p *= ((r >> i) & 1U) ? s[i] : c[i];
            d[r] += p;
        }
    }
    return d;
}

/// Branch vector |r⟩_anc ⊗ ∏_i g_{r_i}(εΣ_i) ψ0 on a register with the system
/// at the low qubits and ancilla i at psi0.num_qubits() + i.
inline StateVector branch_vector(std::span<const PlacedSigma> gates, const StateVector& psi0, double epsilon,
                                 std::size_t r) {
    const std::size_t n_sys = psi0.num_qubits(), n = gates.size();
    std::vector<cplx> out(psi0.dim() << n);
    for (std::size_t z = 0; z < psi0.dim(); ++z) {
        double f = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = epsilon * gates[i].sigma[detail::local_index(z, gates[i].qubits)];
            f *= ((r >> i) & 1U) ? std::sin(x) : std::cos(x);
        }
        out[(r << n_sys) | z] = f * psi0[z];
    }
    return StateVector(n_sys + n, std::move(out), false);
}

/// α_r = <v_r|ψ> / d_r for every branch. NaN where d_r = 0.
inline std::vector<cplx> branch_coefficients(const StateVector& state, std::span<const PlacedSigma> gates,
                                             const StateVector& psi0, double epsilon) {
    const std::size_t n = gates.size();
    if (state.num_qubits() != psi0.num_qubits() + n)
        throw ArgumentError("branch_coefficients: register size mismatch");
    std::vector<cplx> a(std::size_t{1} << n);
    for (std::size_t r = 0; r < a.size(); ++r) {
        const auto v = branch_vector(gates, psi0, epsilon, r);
        const double d = v.norm_squared();
        a[r] = d > 0.0 ? inner_product(v, state) / d : cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    }
    return a;
}

/// |0…0⟩_anc ⊗ ψ0 followed by every embedding, ancilla i on
/// psi0.num_qubits() + i.
inline StateVector prepare_branches(std::span<const PlacedSigma> gates, const StateVector& psi0, double epsilon) {
    const std::size_t n_sys = psi0.num_qubits();
    std::vector<cplx> amps(psi0.dim() << gates.size());
    std::copy(psi0.amplitudes().begin(), psi0.amplitudes().end(), amps.begin());
    StateVector reg(n_sys + gates.size(), std::move(amps), false);
    for (std::size_t i = 0; i < gates.size(); ++i) {
        detail::check_placement(gates[i], n_sys);
        apply_embedding(reg, gates[i].sigma, epsilon, gates[i].qubits, n_sys + i);
    }
    return reg;
}

/// (2·1·dᵀ − I) · diag(1, …, 1, −1): one iteration acting on the branch
/// coefficients when the oracle marks the all-ones branch.
inline Eigen::MatrixXd multi_transfer_matrix(const std::vector<double>& d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    if (n < 2) throw ArgumentError("multi_transfer_matrix: need at least two branches");
    Eigen::MatrixXd t(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) t(i, j) = 2.0 * d[static_cast<std::size_t>(j)] - (i == j ? 1.0 : 0.0);
    t.col(n - 1) *= -1.0;
    return t;
}

/// −1 with multiplicity 2^n − 2 and the pair −(√s ∓ √(s−1))², √(s−1) on the
/// principal branch.
struct MultiTransfer {
    std::size_t n_anc = 0;
    double s = 0.0;
    cplx lambda_minus, lambda_plus;
    std::size_t minus_one_multiplicity = 0;

    MultiTransfer(std::size_t n, double s_) : n_anc(n), s(s_) {
        if (n < 1) throw ArgumentError("MultiTransfer: need at least one ancilla");
        if (!(s >= 0.0 && s <= 1.0)) throw ArgumentError("MultiTransfer: s must lie in [0, 1]");
        const cplx rs = std::sqrt(cplx(s, 0.0)), rs1 = std::sqrt(cplx(s - 1.0, 0.0));
        lambda_minus = -(rs - rs1) * (rs - rs1);
        lambda_plus = -(rs + rs1) * (rs + rs1);
        minus_one_multiplicity = (std::size_t{1} << n) - 2;
    }
};

/// ¼[(√s+√(s−1))^{2k+1} + (√s−√(s−1))^{2k+1}]², evaluated in complex
/// arithmetic. The imaginary part is rounding residue.
inline cplx success_prob_multi_complex(double s, std::uint64_t k) {
    if (!(s >= 0.0 && s <= 1.0)) throw ArgumentError("success_prob_multi: s must lie in [0, 1]");
    const cplx rs = std::sqrt(cplx(s, 0.0)), rs1 = std::sqrt(cplx(s - 1.0, 0.0));
    const double e = static_cast<double>(2 * k + 1);
    const cplx sum = std::pow(rs + rs1, e) + std::pow(rs - rs1, e);
    return 0.25 * sum * sum;
}

inline double success_prob_multi(double s, std::uint64_t k) {
    return std::clamp(success_prob_multi_complex(s, k).real(), 0.0, 1.0);
}

/// s*_m = cos²(mπ / (2k+1)); m = k gives sin²(π / (4k+2)).
inline double s_roots(std::uint64_t k, std::uint64_t m) {
    if (k < 1) throw ArgumentError("s_roots: k must be >= 1");
    if (m > k) throw ArgumentError("s_roots: m must lie in [0, k]");
    const double c = std::cos(static_cast<double>(m) * std::numbers::pi / static_cast<double>(2 * k + 1));
    return c * c;
}

// ---------------------------------------------------------------------------
// Iteration on a state

/// 2|p⟩⟨p| − I for a stored state |p⟩.
struct StateReflector {
    StateVector about;

    void operator()(StateVector& s) const {
        const cplx c = 2.0 * inner_product(about, s);
        auto a = s.amplitudes();
        for (std::size_t i = 0; i < s.dim(); ++i) a[i] = c * about[i] - a[i];
    }
};

/// G = R · O: the oracle first, then the reflection.
template <class Oracle, class Reflector>
    requires std::invocable<Oracle&, StateVector&> && std::invocable<Reflector&, StateVector&>
void grover_iteration(StateVector& s, Oracle&& oracle, Reflector&& reflect) {
    oracle(s);
    reflect(s);
}

/// Oracle = sign flip on `marked` all ones; reflection about `prepared`.
inline void grover_iteration(StateVector& s, const StateVector& prepared, std::span<const std::size_t> marked) {
    if (s.dim() != prepared.dim()) throw ArgumentError("grover_iteration: size mismatch");
    grover_iteration(
        s, [&](StateVector& x) { flip_sign_if_all_ones(x, marked); },
        [&](StateVector& x) { StateReflector{prepared}(x); });
}

// ---------------------------------------------------------------------------
// Root equations

namespace detail {

/// Golden-section search for a maximum of f on [a, b].
template <class F>
double golden_max(F&& f, double a, double b) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2.0;
}

/// Scans upward from 0 in steps of h to the first local maximum of f, then
/// refines it.
template <class F>
double first_local_max(F&& f, double h, std::uint64_t max_steps) {
    double prev = f(0.0), cur = f(h);
    for (std::uint64_t i = 1; i < max_steps; ++i) {
        const double next = f(static_cast<double>(i + 1) * h);
        if (next < cur && cur >= prev)
            return golden_max(f, static_cast<double>(i - 1) * h, static_cast<double>(i + 1) * h);
        prev = cur;
        cur = next;
    }
    throw NoRootError("first_local_max: no maximum within the scan range");
}

/// Bisection for f(x) = y on [lo, hi] with f increasing.
template <class F>
double bisect_increasing(F&& f, double y, double lo, double hi) {
    for (int i = 0; i < 300; ++i) {
        const double mid = (lo + hi) / 2.0;
        if (mid <= lo || mid >= hi) break;
        (f(mid) < y ? lo : hi) = mid;
    }
    return (lo + hi) / 2.0;
}

}  // namespace detail

/// <cos²(εΣ)> for a normalized bond Σ on a uniform bond variable:
/// ½[1 + cos(ε(1+a)) cos(ε(1−a))], a = e^{−2τ}.
inline double bond_t(double tau, double epsilon) {
    const double a = std::exp(-2.0 * tau);
    return 0.5 * (1.0 + std::cos(epsilon * (1.0 + a)) * std::cos(epsilon * (1.0 - a)));
}

/// Smallest ε > 0 with bond_t(τ, ε) = t*. The expression depends on J only
/// through |J| = 1.
inline double epsilon_for_t(int J, double tau, double t_star) {
    if (J != 1 && J != -1) throw ArgumentError("epsilon_for_t: J must be +1 or -1");
    if (!(tau >= 0.0)) throw ArgumentError("epsilon_for_t: tau must be non-negative");
    const auto neg = [&](double e) { return -bond_t(tau, e); };
    double e_min = std::numbers::pi;
    try {
        e_min = std::min(std::numbers::pi, detail::first_local_max(neg, std::numbers::pi / 4096.0, 4096));
    } catch (const NoRootError&) {
    }
    const double t_min = bond_t(tau, e_min);
    if (!(t_star > t_min && t_star < 1.0)) throw NoRootError("epsilon_for_t: t* outside (t_min, 1)");
    return detail::bisect_increasing(neg, -t_star, 0.0, e_min);
}

/// 2^{−(L−1)} ∏_b [sin²(εσ⁺_b) + sin²(εσ⁻_b)] with σ± the aligned and
/// anti-aligned eigenvalues of each bond (e^{±J_bτ}, or the normalized pair
/// when `normalized`). Equals <∏ sin²(εΣ_b)> over |+⟩^L.
inline double bond_product_s(const IsingChain& chain, double tau, double epsilon, bool normalized = false) {
    double p = 1.0;
    for (std::size_t b = 0; b < chain.bonds(); ++b) {
        const auto sg = bond_sigma(chain.coupling(b), tau, normalized).sigma;
        const double x = std::sin(epsilon * sg[0]), y = std::sin(epsilon * sg[1]);
        p *= 0.5 * (x * x + y * y);
    }
    return p;
}

struct SProfile {
    double epsilon_up = 0.0;  // first local maximum of the product
    double s_max = 0.0;
};

inline SProfile s_profile(const IsingChain& chain, double tau, bool normalized = false) {
    double omega = 0.0;
    for (std::size_t b = 0; b < chain.bonds(); ++b) {
        const auto sg = bond_sigma(chain.coupling(b), tau, normalized).sigma;
        omega = std::max({omega, sg[0], sg[1]});
    }
    const auto f = [&](double e) { return bond_product_s(chain, tau, e, normalized); };
    const double up = detail::first_local_max(f, std::numbers::pi / (omega * 256.0), 10'000'000);
    return {up, f(up)};
}

/// Smallest ε > 0 with bond_product_s(ε) = s*.
inline double epsilon_from_s(const IsingChain& chain, double tau, double s_star, bool normalized = false) {
    if (!(s_star > 0.0 && s_star < 1.0)) throw ArgumentError("epsilon_from_s: s* must lie in (0, 1)");
    const auto prof = s_profile(chain, tau, normalized);
    if (s_star > prof.s_max) throw NoRootError("epsilon_from_s: s* exceeds the maximum of the product");
    const auto f = [&](double e) { return bond_product_s(chain, tau, e, normalized); };
    return detail::bisect_increasing(f, s_star, 0.0, prof.epsilon_up);
}

/// Smallest k >= 1 with s*_k = sin²(π/(4k+2)) reachable.
inline std::uint64_t predicted_iterations(const IsingChain& chain, double tau, bool normalized = false) {
    const double s_max = s_profile(chain, tau, normalized).s_max;
    for (std::uint64_t k = 1; k < 100'000'000; ++k)
        if (s_roots(k, k) <= s_max) return k;
    throw NoRootError("predicted_iterations: no k found");
}

struct GroverPlan {
    std::uint64_t k = 1;
    double target_root = 0.0;              // t* (Method I) or s* (Method II)
    std::vector<double> epsilon_schedule;  // one ε per bond
};

/// Per-bond ε hitting t*_0(k).
inline GroverPlan plan_method1(const IsingChain& chain, double tau, std::uint64_t k) {
    GroverPlan p{k, optimal_t_roots(k, 0), {}};
    for (std::size_t b = 0; b < chain.bonds(); ++b)
        p.epsilon_schedule.push_back(epsilon_for_t(chain.coupling(b), tau, p.target_root));
    return p;
}

/// One shared ε hitting s*_k; k = predicted_iterations when not given.
inline GroverPlan plan_method2(const IsingChain& chain, double tau, std::optional<std::uint64_t> k = std::nullopt,
                               bool normalized = false) {
    const std::uint64_t kk = k ? *k : predicted_iterations(chain, tau, normalized);
    GroverPlan p{kk, s_roots(kk, kk), {}};
    p.epsilon_schedule.assign(chain.bonds(), epsilon_from_s(chain, tau, p.target_root, normalized));
    return p;
}

// ---------------------------------------------------------------------------
// Method I: one reused ancilla, recursive reflections

enum class RunMode { exact, sampled };

struct Method1Options {
    RunMode mode = RunMode::exact;
    double flag_tolerance = 1e-9;
};

struct Method1Bond {
    std::size_t bond = 0;
    int J = 1;
    double epsilon = 0.0;
    double t_target = 0.0;
    double t_actual = 0.0;
    double success_prob = 0.0;       // Born probability of ancilla = 1 after G^k
    double success_predicted = 0.0;  // 1 − failure_prob(t_actual, k)
    int outcome = 1;                 // sampled (or 1 in exact mode)
    bool flagged = false;
    double gate_fidelity = 0.0;      // vs Σ_b|in⟩ normalized
    std::uint64_t reflection_ops = 0;  // elementary operations in one R_b
};

struct Method1Report {
    std::uint64_t k = 1;
    double tau = 0.0;
    std::vector<Method1Bond> bonds;
    bool flagged = false;
    std::optional<StateVector> final_state;
    double fidelity_ite = 0.0;
    double fidelity_ground = 0.0;
    std::uint64_t total_ops = 0;
};

/// The circuit pieces of Method I on L physical qubits plus the ancilla at
/// index L. Every H, X, Z, U and |0⟩-reflection counts as one operation.
class Method1Circuit {
public:
    Method1Circuit(const IsingChain& chain, double tau, std::uint64_t k, std::vector<double> eps)
        : chain_(chain), k_(k), eps_(std::move(eps)), anc_(chain.sites()) {
        for (std::size_t b = 0; b < chain.bonds(); ++b) bonds_.push_back(bond_sigma(chain.coupling(b), tau, true).sigma);
    }

    std::size_t ancilla() const noexcept { return anc_; }
    std::uint64_t ops() const noexcept { return ops_; }

    void hadamard(StateVector& s, std::size_t q) { apply_hadamard(s, q), ++ops_; }
    void x_anc(StateVector& s) { apply_x(s, anc_), ++ops_; }
    void z_anc(StateVector& s) { apply_z(s, anc_), ++ops_; }

    void embed_bond(StateVector& s, std::size_t b, bool inverse) {
        const std::size_t q[] = {b, b + 1};
        apply_embedding(s, bonds_[b], inverse ? -eps_[b] : eps_[b], q, anc_);
        ++ops_;
    }

    /// P_b |0⟩: P_0 = U_0 H_1 H_0, P_b = U_b H_{b+1} X_anc G_{b−1}^k P_{b−1}.
    void prepare(StateVector& s, std::size_t b, bool inverse) {
        if (!inverse) {
            if (b == 0) {
                hadamard(s, 0);
                hadamard(s, 1);
            } else {
                prepare(s, b - 1, false);
                for (std::uint64_t i = 0; i < k_; ++i) grover(s, b - 1, false);
                x_anc(s);
                hadamard(s, b + 1);
            }
            embed_bond(s, b, false);
        } else {
            embed_bond(s, b, true);
            if (b == 0) {
                hadamard(s, 1);
                hadamard(s, 0);
            } else {
                hadamard(s, b + 1);
                x_anc(s);
                for (std::uint64_t i = 0; i < k_; ++i) grover(s, b - 1, true);
                prepare(s, b - 1, true);
            }
        }
    }

    /// R_b = P_b S_0 P_b†, S_0 reflecting about |0⟩ on the ancilla and
    /// qubits 0..b+1.
    void reflect(StateVector& s, std::size_t b) {
        prepare(s, b, true);
        std::vector<std::size_t> qs{anc_};
        for (std::size_t q = 0; q <= b + 1; ++q) qs.push_back(q);
        reflect_about_zero(s, qs);
        ++ops_;
        prepare(s, b, false);
    }

    /// G_b = R_b Z_anc; its inverse is Z_anc R_b.
    void grover(StateVector& s, std::size_t b, bool inverse) {
        if (!inverse) z_anc(s);
        reflect(s, b);
        if (inverse) z_anc(s);
    }

private:
    const IsingChain& chain_;
    std::uint64_t k_;
    std::vector<double> eps_;
    std::size_t anc_;
    std::vector<DiagonalSigma> bonds_;
    std::uint64_t ops_ = 0;
};

inline Method1Report method1_run(const IsingChain& chain, double tau, std::uint64_t k, Rng& rng,
                                 const Method1Options& options = {}) {
    if (k < 1) throw ArgumentError("method1_run: k must be >= 1");
    if (chain.sites() + 1 > 26) throw SizeError("method1_run: register too large");
    const auto plan = plan_method1(chain, tau, k);
    Method1Circuit circ(chain, tau, k, plan.epsilon_schedule);
    const std::size_t L = chain.sites(), anc = circ.ancilla();
    const std::size_t anc_only[] = {anc};

    Method1Report rep;
    rep.k = k;
    rep.tau = tau;
    StateVector s = init_basis_state(L + 1, 0);
    for (std::size_t b = 0; b < chain.bonds(); ++b) {
        if (b == 0) {
            circ.hadamard(s, 0);
            circ.hadamard(s, 1);
        } else {
            circ.hadamard(s, b + 1);
        }

        Method1Bond row;
        row.bond = b;
        row.J = chain.coupling(b);
        row.epsilon = plan.epsilon_schedule[b];
        row.t_target = plan.target_root;

        const int zero[] = {0};
        const StateVector in = extract_slice(s, anc_only, zero);
        const PlacedSigma placed{bond_sigma(row.J, tau, true).sigma, {b, b + 1}};
        const auto w = marginal_weights(placed, basis_weights(in));
        row.t_actual = expectation(placed.sigma.values(), w, [&](double x) {
            const double c = std::cos(row.epsilon * x);
            return c * c;
        });
        row.success_predicted = 1.0 - failure_prob(std::clamp(row.t_actual, 0.0, 1.0), k);

        std::vector<cplx> target(in.dim());
        for (std::size_t z = 0; z < in.dim(); ++z)
            target[z] = placed.sigma[detail::local_index(z, placed.qubits)] * in[z];
        StateVector target_state(L, std::move(target));

        circ.embed_bond(s, b, false);
        for (std::uint64_t i = 0; i < k; ++i) {
            const std::uint64_t before = circ.ops();
            circ.grover(s, b, false);
            row.reflection_ops = circ.ops() - before - 1;
        }

        row.success_prob = probability_of(s, anc, 1);
        if (options.mode == RunMode::sampled) row.outcome = rng.uniform() < row.success_prob ? 1 : 0;
        row.flagged = 1.0 - row.success_prob > options.flag_tolerance || row.outcome == 0;
        rep.flagged = rep.flagged || row.flagged;
        if (project_in_place(s, anc, 1) < kZeroProbability)
            throw AnnihilationError("method1_run: ancilla never flips");

        const int one[] = {1};
        row.gate_fidelity = fidelity(extract_slice(s, anc_only, one), target_state);
        circ.x_anc(s);
        rep.bonds.push_back(row);
    }

    rep.final_state = extract_slice(s, anc_only, std::array<int, 1>{0});
    rep.fidelity_ite = fidelity(*rep.final_state, exact_ite(chain, tau, uniform_superposition(L)));
    rep.fidelity_ground = ground_subspace(chain).overlap(*rep.final_state);
    rep.total_ops = circ.ops();
    return rep;
}

// ---------------------------------------------------------------------------
// Method II: all bond ancillas amplified together

inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 24;

struct Method2Options {
    RunMode mode = RunMode::exact;
    std::optional<std::uint64_t> k;  // nullopt → predicted_iterations
    bool normalized = false;         // bond Σ normalized instead of e^{±Jτ}
    std::uint64_t shots = 10'000;    // sampled mode
    std::size_t amplitude_cap = kDefaultAmplitudeCap;
};

struct Method2Point {
    std::uint64_t k = 0;
    double success_prob = 0.0;       // Born weight of ancillas = 1…1
    double success_predicted = 0.0;  // p₁(s, k)
    double fidelity_ground = 0.0;    // weight on 1…1 ⊗ ground subspace
    double fidelity_ite = 0.0;       // |⟨1…1 ⊗ ite|ψ_k⟩|²
    double postselected_ground = 0.0;
};

struct Method2Report {
    std::size_t sites = 0;
    double tau = 0.0;
    bool normalized = false;
    GroverPlan plan;
    double s_actual = 0.0;  // success probability before any iteration
    std::vector<Method2Point> curve;  // k = 0..plan.k
    std::uint64_t shots = 0, successes = 0;  // sampled mode only
};

/// Register: sites 0..L−1 in |+⟩, ancilla of bond b on L + b.
class Method2Circuit {
public:
    Method2Circuit(const IsingChain& chain, double tau, double epsilon, bool normalized)
        : L_(chain.sites()), eps_(epsilon), bonds_(bond_placements(chain, tau, normalized)) {
        for (std::size_t b = 0; b < bonds_.size(); ++b) anc_.push_back(L_ + b);
        for (std::size_t q = 0; q < L_ + bonds_.size(); ++q) all_.push_back(q);
    }

    std::size_t num_qubits() const noexcept { return all_.size(); }
    std::span<const std::size_t> ancillas() const noexcept { return anc_; }

    void prepare(StateVector& s, bool inverse) const {
        if (!inverse) {
            for (std::size_t q = 0; q < L_; ++q) apply_hadamard(s, q);
            for (std::size_t b = 0; b < bonds_.size(); ++b)
                apply_embedding(s, bonds_[b].sigma, eps_, bonds_[b].qubits, anc_[b]);
        } else {
            for (std::size_t b = bonds_.size(); b-- > 0;)
                apply_embedding(s, bonds_[b].sigma, -eps_, bonds_[b].qubits, anc_[b]);
            for (std::size_t q = L_; q-- > 0;) apply_hadamard(s, q);
        }
    }

    void oracle(StateVector& s) const { flip_sign_if_all_ones(s, anc_); }

    void reflect(StateVector& s) const {
        prepare(s, true);
        reflect_about_zero(s, all_);
        prepare(s, false);
    }

private:
    std::size_t L_;
    double eps_;
    std::vector<PlacedSigma> bonds_;
    std::vector<std::size_t> anc_, all_;
};

inline Method2Report method2_run(const IsingChain& chain, double tau, Rng& rng, const Method2Options& options = {}) {
    const std::size_t L = chain.sites(), n = L + chain.bonds();
    if (n >= 63 || (std::size_t{1} << n) > options.amplitude_cap)
        throw SizeError("method2_run: register of " + std::to_string(n) + " qubits exceeds the amplitude cap of " +
                        std::to_string(options.amplitude_cap));

    Method2Report rep;
    rep.sites = L;
    rep.tau = tau;
    rep.normalized = options.normalized;
    rep.plan = plan_method2(chain, tau, options.k, options.normalized);
    const double eps = rep.plan.epsilon_schedule.front();
    const Method2Circuit circ(chain, tau, eps, options.normalized);

    const StateVector ite = exact_ite(chain, tau, uniform_superposition(L));
    const auto ground = ground_subspace(chain);
    const std::size_t ones = ((std::size_t{1} << chain.bonds()) - 1) << L;

    StateVector s = init_basis_state(n, 0);
    circ.prepare(s, false);

    const auto record = [&](std::uint64_t k) {
        Method2Point p;
        p.k = k;
        cplx ov = 0.0;
        for (std::size_t z = 0; z < ite.dim(); ++z) {
            const cplx a = s[ones | z];
            p.success_prob += std::norm(a);
            ov += std::conj(ite[z]) * a;
        }
        for (const auto z : ground.bitstrings) p.fidelity_ground += std::norm(s[ones | z]);
        p.fidelity_ite = std::norm(ov);
        p.success_predicted = success_prob_multi(std::clamp(rep.s_actual, 0.0, 1.0), k);
        p.postselected_ground = p.success_prob > 0.0 ? p.fidelity_ground / p.success_prob : 0.0;
        rep.curve.push_back(p);
    };

    for (std::size_t z = 0; z < ite.dim(); ++z) rep.s_actual += std::norm(s[ones | z]);
    record(0);
    for (std::uint64_t k = 1; k <= rep.plan.k; ++k) {
        grover_iteration(
            s, [&](StateVector& x) { circ.oracle(x); }, [&](StateVector& x) { circ.reflect(x); });
        record(k);
    }

    if (options.mode == RunMode::sampled) {
        const double p = rep.curve.back().success_prob;
        rep.shots = options.shots;
        for (std::uint64_t i = 0; i < options.shots; ++i) rep.successes += rng.bernoulli(p) ? 1 : 0;
    }
    return rep;
}

}  // namespace nugate
