#pragma once

// One-ancilla embedding of a diagonal nonunitary operator and the
// repeat-until-success protocol built on it.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SVD>

#include "nugate/analytics.hpp"
#include "nugate/errors.hpp"
#include "nugate/sigma.hpp"
#include "nugate/state_vector.hpp"

namespace nugate {

/// exp(−iε σ^y ⊗ Σ) = [[cos εΣ, −sin εΣ], [sin εΣ, cos εΣ]] with the ancilla
/// as the most significant bit of the local index.
struct EmbeddingGate {
    DiagonalSigma sigma;
    double epsilon = 0.0;
    Matrix matrix;

    /// Targets for apply_unitary: the system qubits followed by the ancilla.
    static std::vector<std::size_t> targets(std::span<const std::size_t> system, std::size_t ancilla) {
        std::vector<std::size_t> t(system.begin(), system.end());
        t.push_back(ancilla);
        return t;
    }
};

inline EmbeddingGate embed(const DiagonalSigma& sigma, double epsilon) {
    if (!(epsilon > 0.0)) throw ArgumentError("embed: epsilon must be positive");
    const auto d = static_cast<Eigen::Index>(sigma.dim());
    Matrix u = Matrix::Zero(2 * d, 2 * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double c = std::cos(epsilon * sigma[static_cast<std::size_t>(i)]);
        const double s = std::sin(epsilon * sigma[static_cast<std::size_t>(i)]);
        u(i, i) = c;
        u(i, d + i) = -s;
        u(d + i, i) = s;
        u(d + i, d + i) = c;
    }
    return {sigma, epsilon, std::move(u)};
}

/// Applies exp(−iε σ^y_anc ⊗ Σ) in place. Σ is diagonal, so every
/// (ancilla 0, ancilla 1) amplitude pair just rotates by εσ of its system
/// index. Negative ε applies the inverse.
inline void apply_embedding(StateVector& s, const DiagonalSigma& sigma, double epsilon,
                            std::span<const std::size_t> system, std::size_t ancilla) {
    if (system.size() != sigma.num_qubits()) throw ArgumentError("apply_embedding: Σ arity mismatch");
    std::vector<std::size_t> all(system.begin(), system.end());
    all.push_back(ancilla);
    detail::check_targets(s, all);

    std::vector<double> c(sigma.dim()), sn(sigma.dim());
    for (std::size_t i = 0; i < sigma.dim(); ++i) {
        c[i] = std::cos(epsilon * sigma[i]);
        sn[i] = std::sin(epsilon * sigma[i]);
    }
    const std::size_t abit = std::size_t{1} << ancilla;
    auto a = s.amplitudes();
    for (std::size_t k = 0; k < s.dim() / 2; ++k) {
        const std::size_t i0 = ((k >> ancilla) << (ancilla + 1)) | (k & (abit - 1));
        const std::size_t i1 = i0 | abit;
        std::size_t local = 0;
        for (std::size_t j = 0; j < system.size(); ++j) local |= ((i0 >> system[j]) & 1U) << j;
        const cplx x = a[i0], y = a[i1];
        a[i0] = c[local] * x - sn[local] * y;
        a[i1] = sn[local] * x + c[local] * y;
    }
}

/// Σψ0 / sqrt(<ψ0|Σ²|ψ0>).
inline StateVector target_state(const DiagonalSigma& sigma, const StateVector& psi0) {
    require_same_dim(sigma, psi0);
    std::vector<cplx> out(psi0.dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigma[i] * psi0[i];
    StateVector t(psi0.num_qubits(), std::move(out), false);
    if (t.norm_squared() < kZeroProbability * kZeroProbability)
        throw AnnihilationError("target_state: Σ annihilates ψ0");
    t.normalize();
    return t;
}

// ---------------------------------------------------------------------------
// General matrices

struct Decomposition {
    Matrix left;    // U
    DiagonalSigma sigma;
    Matrix right;   // V, with M_padded = U diag(σ·norm_factor) V†
    std::size_t original_rows = 0, original_cols = 0;

    Matrix reconstruct() const {
        Eigen::VectorXd s(static_cast<Eigen::Index>(sigma.dim()));
        for (std::size_t i = 0; i < sigma.dim(); ++i) s(static_cast<Eigen::Index>(i)) = sigma[i] * sigma.norm_factor();
        return left * s.cast<cplx>().asDiagonal() * right.adjoint();
    }
};

/// Zero-pads M (rows >= cols) to a 2^k square and takes its SVD. Σ comes back
/// normalized so its largest value is 1.
inline Decomposition decompose_and_normalize(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw ArgumentError("decompose_and_normalize: empty matrix");
    if (m.rows() < m.cols()) throw ArgumentError("decompose_and_normalize: rows must be >= columns");
    if (m.cwiseAbs().maxCoeff() == 0.0) throw ArgumentError("decompose_and_normalize: zero matrix");
    const auto n = static_cast<Eigen::Index>(
        std::max<std::uint64_t>(2, std::bit_ceil(static_cast<std::uint64_t>(m.rows()))));
    Matrix padded = Matrix::Zero(n, n);
    padded.topLeftCorner(m.rows(), m.cols()) = m;

    Eigen::JacobiSVD<Matrix> svd(padded, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<double> values(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = sv(i);
    return {svd.matrixU(), DiagonalSigma::normalized(std::move(values)), svd.matrixV(),
            static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())};
}

// ---------------------------------------------------------------------------
// Repeat-until-success

struct RusTrajectory {
    std::uint64_t shots = 0;                     // measurements performed
    std::vector<std::uint8_t> outcomes;          // one per shot
    std::optional<std::uint64_t> success_shot;   // 1-based shot of the first flip
    double cumulative_success_prob = 0.0;        // P(flip within `shots`)
    std::vector<double> fidelity_trace;          // f(n, ε) of the would-be output at shot n
    std::vector<double> flip_probabilities;      // flip probability per shot (with outcomes)
    std::optional<StateVector> output;           // system state after the flip

    bool succeeded() const noexcept { return success_shot.has_value(); }
};

struct RusOptions {
    bool record_fidelity = true;
    bool record_outcomes = true;
};

inline constexpr std::uint64_t kMaxShotsCap = 10'000'000;

/// ceil(10 · mean_shots), capped at 10^7.
inline std::uint64_t default_max_shots(const DiagonalSigma& sigma, const StateVector& psi0, double epsilon) {
    const double nbar = mean_shots(sigma, psi0, epsilon);
    if (!std::isfinite(nbar) || nbar * 10.0 >= static_cast<double>(kMaxShotsCap)) return kMaxShotsCap;
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(10.0 * nbar)));
}

/// Runs the protocol on a register of the system qubits plus one ancilla on
/// the highest index. The ancilla starts in |0⟩ for every shot; a 0 outcome
/// leaves it there, so no explicit reset gate is needed.
inline RusTrajectory rus_run(const StateVector& psi0, const DiagonalSigma& sigma, double epsilon,
                             std::uint64_t max_shots, Rng& rng, const RusOptions& opts = {}) {
    require_same_dim(sigma, psi0);
    if (max_shots < 1) throw ArgumentError("rus_run: max_shots must be >= 1");
    if (!(epsilon > 0.0)) throw ArgumentError("rus_run: epsilon must be positive");

    const std::size_t n_sys = psi0.num_qubits();
    const std::size_t anc = n_sys;
    std::vector<cplx> amps(psi0.dim() * 2);
    std::copy(psi0.amplitudes().begin(), psi0.amplitudes().end(), amps.begin());
    StateVector reg(n_sys + 1, std::move(amps), false);

    std::optional<StateVector> target;
    if (opts.record_fidelity) target = target_state(sigma, psi0);

    RusTrajectory tr;
    double no_flip = 1.0;
    const std::size_t half = psi0.dim();
    // The ancilla is the top qubit, so pair i is (i, half + i) and the
    // system index is i itself.
    std::vector<double> c(half), sn(half);
    for (std::size_t i = 0; i < half; ++i) {
        c[i] = std::cos(epsilon * sigma[i]);
        sn[i] = std::sin(epsilon * sigma[i]);
    }
    auto a = reg.amplitudes();
    for (std::uint64_t shot = 1; shot <= max_shots; ++shot) {
        double p0 = 0.0, p1 = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            const cplx x = a[i], y = a[half + i];
            a[i] = c[i] * x - sn[i] * y;
            a[half + i] = sn[i] * x + c[i] * y;
            p0 += std::norm(a[i]);
            p1 += std::norm(a[half + i]);
        }
        if (opts.record_outcomes) tr.flip_probabilities.push_back(p1);

        if (opts.record_fidelity) {
            cplx ov = 0.0;
            for (std::size_t i = 0; i < half; ++i) ov += std::conj((*target)[i]) * reg[half + i];
            tr.fidelity_trace.push_back(p1 > 0.0 ? std::min(1.0, std::norm(ov) / p1)
                                                 : std::numeric_limits<double>::quiet_NaN());
        }

        const int outcome = rng.uniform() < p1 ? 1 : 0;
        if (outcome == 0) {
            // Collapse onto ancilla 0 without another pass over the register.
            const double inv = 1.0 / std::sqrt(p0);
            for (std::size_t i = 0; i < half; ++i) {
                a[i] *= inv;
                a[half + i] = 0.0;
            }
        }
        tr.shots = shot;
        if (opts.record_outcomes) tr.outcomes.push_back(static_cast<std::uint8_t>(outcome));
        no_flip *= 1.0 - p1;
        if (outcome == 1) {
            tr.success_shot = shot;
            const std::size_t fixed[] = {anc};
            const int ones[] = {1};
            tr.output = extract_slice(reg, fixed, ones);
            break;
        }
    }
    tr.cumulative_success_prob = 1.0 - no_flip;
    return tr;
}

/// RUS for a general matrix M = U Σ V†: V† runs as an ordinary gate before
/// the protocol and U after it, on the system qubits.
inline RusTrajectory rus_run_decomposed(const StateVector& psi0, const Decomposition& dec, double epsilon,
                                        std::uint64_t max_shots, Rng& rng, const RusOptions& opts = {}) {
    require_same_dim(dec.sigma, psi0);
    std::vector<std::size_t> sys(psi0.num_qubits());
    for (std::size_t q = 0; q < sys.size(); ++q) sys[q] = q;
    StateVector rotated = psi0;
    apply_unitary(rotated, Gate::unchecked(dec.right.adjoint()), sys);
    RusOptions inner = opts;
    inner.record_fidelity = false;
    auto tr = rus_run(rotated, dec.sigma, epsilon, max_shots, rng, inner);
    if (tr.output) apply_unitary(*tr.output, Gate::unchecked(dec.left), sys);
    return tr;
}

/// First-flip histogram over independent trajectories.
struct RusEnsemble {
    std::uint64_t trajectories = 0;
    std::uint64_t successes = 0;
    std::vector<std::uint64_t> first_flip_counts;  // index n-1 counts flips at shot n

    double success_frequency() const {
        return trajectories ? static_cast<double>(successes) / static_cast<double>(trajectories) : 0.0;
    }
};

/// Trajectory i uses Rng::split(master_seed, i).
inline RusEnsemble rus_ensemble(const StateVector& psi0, const DiagonalSigma& sigma, double epsilon,
                                std::uint64_t max_shots, std::uint64_t trajectories, std::uint64_t master_seed) {
    RusEnsemble e;
    e.trajectories = trajectories;
    e.first_flip_counts.assign(max_shots, 0);
    const RusOptions opts{false, false};
    for (std::uint64_t i = 0; i < trajectories; ++i) {
        Rng rng = Rng::split(master_seed, i);
        const auto tr = rus_run(psi0, sigma, epsilon, max_shots, rng, opts);
        if (tr.success_shot) {
            ++e.successes;
            ++e.first_flip_counts[*tr.success_shot - 1];
        }
    }
    return e;
}

}  // namespace nugate
