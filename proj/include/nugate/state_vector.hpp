#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nugate/errors.hpp"
#include "nugate/rng.hpp"

namespace nugate {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kZeroProbability = 1e-14;

/// Dense state vector over `num_qubits` qubits. Qubit 0 is the least
/// significant bit of the basis index.
class StateVector {
public:
    StateVector() = default;

    /// Takes ownership of `amplitudes`; the length must be 2^num_qubits.
    /// The amplitudes are renormalized unless `normalize` is false.
    StateVector(std::size_t num_qubits, std::vector<cplx> amplitudes, bool normalize = true)
        : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
        if (num_qubits_ == 0 || num_qubits_ > 40)
            throw ArgumentError("StateVector: num_qubits must be in [1, 40]");
        if (amps_.size() != (std::size_t{1} << num_qubits_))
            throw ArgumentError("StateVector: amplitude count is not 2^num_qubits");
        if (normalize) this->normalize();
    }

    std::size_t num_qubits() const noexcept { return num_qubits_; }
    std::size_t dim() const noexcept { return amps_.size(); }

    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    std::span<cplx> amplitudes() noexcept { return amps_; }

    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    cplx& operator[](std::size_t i) { return amps_[i]; }

    double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    double norm() const noexcept { return std::sqrt(norm_squared()); }

    /// Rescales to unit norm. Throws AnnihilationError on the zero vector.
    void normalize() {
        const double n = norm();
        if (!(n > 0.0) || !std::isfinite(n))
            throw AnnihilationError("StateVector: cannot normalize a zero or non-finite vector");
        const double inv = 1.0 / n;
        for (auto& a : amps_) a *= inv;
    }

    bool is_normalized(double tol = kNormTol) const noexcept {
        return std::abs(norm() - 1.0) <= tol;
    }

private:
    std::size_t num_qubits_ = 0;
    std::vector<cplx> amps_;
};

inline StateVector init_basis_state(std::size_t num_qubits, std::uint64_t basis_index) {
    if (num_qubits == 0 || num_qubits > 40)
        throw ArgumentError("init_basis_state: num_qubits must be in [1, 40]");
    if (basis_index >= (std::uint64_t{1} << num_qubits))
        throw ArgumentError("init_basis_state: basis index out of range");
    std::vector<cplx> amps(std::size_t{1} << num_qubits);
    amps[basis_index] = 1.0;
    return StateVector(num_qubits, std::move(amps), false);
}

/// |+>^{⊗n}
inline StateVector uniform_superposition(std::size_t num_qubits) {
    const std::size_t d = std::size_t{1} << num_qubits;
    std::vector<cplx> amps(d, cplx(1.0 / std::sqrt(static_cast<double>(d)), 0.0));
    return StateVector(num_qubits, std::move(amps), false);
}

/// Haar-ish random state (normalized complex Gaussian vector).
inline StateVector random_state(std::size_t num_qubits, Rng& rng) {
    const std::size_t d = std::size_t{1} << num_qubits;
    std::vector<cplx> amps(d);
    for (auto& a : amps) {
        // Box-Muller on our own uniform source keeps the stream portable.
        const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        a = cplx(r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2));
    }
    return StateVector(num_qubits, std::move(amps));
}

inline cplx inner_product(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits())
        throw ArgumentError("inner_product: dimension mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

/// |<a|b>|^2. Global phase is ignored.
inline double fidelity(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits()) throw ArgumentError("fidelity: dimension mismatch");
    return std::min(1.0, std::norm(inner_product(a, b)));
}

// ---------------------------------------------------------------------------
// Gates

inline double unitarity_defect(const Matrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    const Matrix d = m.adjoint() * m - Matrix::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff();
}

/// A small dense unitary. Unitarity is verified once here; `unchecked`
/// skips the check for operators whose unitarity is established elsewhere.
class Gate {
public:
    explicit Gate(Matrix m) : m_(std::move(m)) {
        check_shape();
        const double defect = unitarity_defect(m_);
        if (!(defect <= kUnitarityTol))
            throw ValidationError("Gate: matrix is not unitary (defect " + std::to_string(defect) + ")");
        pack();
    }

    static Gate unchecked(Matrix m) { return Gate(std::move(m), Unchecked{}); }

    const Matrix& matrix() const noexcept { return m_; }
    std::size_t arity() const noexcept { return arity_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

    Gate adjoint() const { return Gate(m_.adjoint(), Unchecked{}); }

    // Row-major copy for the application kernel.
    const std::vector<cplx>& packed() const noexcept { return packed_; }

private:
    struct Unchecked {};
    Gate(Matrix m, Unchecked) : m_(std::move(m)) {
        check_shape();
        pack();
    }

    void check_shape() {
        const auto r = static_cast<std::uint64_t>(m_.rows());
        if (r == 0 || m_.rows() != m_.cols() || !std::has_single_bit(r))
            throw ArgumentError("Gate: matrix must be square with power-of-two dimension");
        arity_ = static_cast<std::size_t>(std::countr_zero(r));
    }

    void pack() {
        const auto d = dim();
        packed_.resize(d * d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) packed_[r * d + c] = m_(r, c);
    }

    Matrix m_;
    std::size_t arity_ = 0;
    std::vector<cplx> packed_;
};

namespace detail {

inline void check_targets(const StateVector& s, std::span<const std::size_t> targets) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= s.num_qubits()) throw ArgumentError("target qubit out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (targets[i] == targets[j]) throw ArgumentError("target qubits must be distinct");
    }
}

// Spreads the bits of `c` over the positions not occupied by `sorted_targets`.
inline std::size_t insert_zero_bits(std::size_t c, std::span<const std::size_t> sorted_targets) {
    for (const auto t : sorted_targets) {
        const std::size_t low = c & ((std::size_t{1} << t) - 1);
        c = ((c >> t) << (t + 1)) | low;
    }
    return c;
}

}  // namespace detail

/// Applies `gate` to the qubits `targets` in place. targets[j] carries bit j
/// of the gate's local index. Strided gather/scatter; the full 2^n operator is
/// never formed.
inline void apply_unitary(StateVector& state, const Gate& gate, std::span<const std::size_t> targets) {
    if (targets.size() != gate.arity())
        throw ArgumentError("apply_unitary: target count does not match gate arity");
    detail::check_targets(state, targets);

    const std::size_t m = targets.size();
    const std::size_t d = std::size_t{1} << m;
    std::vector<std::size_t> sorted(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::size_t> offsets(d, 0);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t b = 0; b < m; ++b)
            if ((j >> b) & 1U) offsets[j] |= std::size_t{1} << targets[b];

    const auto& g = gate.packed();
    auto amps = state.amplitudes();
    std::vector<cplx> in(d);
    const std::size_t blocks = state.dim() >> m;
    for (std::size_t c = 0; c < blocks; ++c) {
        const std::size_t base = detail::insert_zero_bits(c, sorted);
        for (std::size_t j = 0; j < d; ++j) in[j] = amps[base + offsets[j]];
        for (std::size_t r = 0; r < d; ++r) {
            cplx acc = 0.0;
            const cplx* row = &g[r * d];
            for (std::size_t j = 0; j < d; ++j) acc += row[j] * in[j];
            amps[base + offsets[r]] = acc;
        }
    }
}

inline void apply_unitary(StateVector& state, const Gate& gate, std::initializer_list<std::size_t> targets) {
    apply_unitary(state, gate, std::span<const std::size_t>(targets.begin(), targets.size()));
}

namespace gates {

inline Matrix hadamard() {
    Matrix h(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    h << r, r, r, -r;
    return h;
}

inline Matrix pauli_x() {
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

inline Matrix pauli_y() {
    Matrix y(2, 2);
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    return y;
}

inline Matrix pauli_z() {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

/// a ⊗ b with `a` on the high bits.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace gates

// Fast paths for the fixed one-qubit gates used throughout the circuits.

inline void apply_hadamard(StateVector& s, std::size_t q) {
    if (q >= s.num_qubits()) throw ArgumentError("apply_hadamard: qubit out of range");
    const double r = 1.0 / std::sqrt(2.0);
    const std::size_t bit = std::size_t{1} << q;
    auto a = s.amplitudes();
    for (std::size_t c = 0; c < s.dim() / 2; ++c) {
        const std::size_t i0 = ((c >> q) << (q + 1)) | (c & (bit - 1));
        const std::size_t i1 = i0 | bit;
        const cplx x = a[i0], y = a[i1];
        a[i0] = r * (x + y);
        a[i1] = r * (x - y);
    }
}

inline void apply_x(StateVector& s, std::size_t q) {
    if (q >= s.num_qubits()) throw ArgumentError("apply_x: qubit out of range");
    const std::size_t bit = std::size_t{1} << q;
    auto a = s.amplitudes();
    for (std::size_t c = 0; c < s.dim() / 2; ++c) {
        const std::size_t i0 = ((c >> q) << (q + 1)) | (c & (bit - 1));
        std::swap(a[i0], a[i0 | bit]);
    }
}

inline void apply_z(StateVector& s, std::size_t q) {
    if (q >= s.num_qubits()) throw ArgumentError("apply_z: qubit out of range");
    const std::size_t bit = std::size_t{1} << q;
    auto a = s.amplitudes();
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (i & bit) a[i] = -a[i];
}

inline std::size_t qubit_mask(std::span<const std::size_t> qubits) {
    std::size_t mask = 0;
    for (const auto q : qubits) mask |= std::size_t{1} << q;
    return mask;
}

/// Negates every amplitude whose bits on `qubits` are all 1.
inline void flip_sign_if_all_ones(StateVector& s, std::span<const std::size_t> qubits) {
    detail::check_targets(s, qubits);
    const std::size_t mask = qubit_mask(qubits);
    auto a = s.amplitudes();
    for (std::size_t i = 0; i < s.dim(); ++i)
        if ((i & mask) == mask) a[i] = -a[i];
}

/// (2|0><0|_qubits ⊗ I_rest - I): keeps amplitudes with all `qubits` zero
/// and negates the rest.
inline void reflect_about_zero(StateVector& s, std::span<const std::size_t> qubits) {
    detail::check_targets(s, qubits);
    const std::size_t mask = qubit_mask(qubits);
    auto a = s.amplitudes();
    for (std::size_t i = 0; i < s.dim(); ++i)
        if ((i & mask) != 0) a[i] = -a[i];
}

// ---------------------------------------------------------------------------
// Measurement

inline double probability_of(const StateVector& s, std::size_t qubit, int outcome) {
    if (qubit >= s.num_qubits()) throw ArgumentError("probability_of: qubit out of range");
    if (outcome != 0 && outcome != 1) throw ArgumentError("outcome must be 0 or 1");
    const std::size_t bit = std::size_t{1} << qubit;
    double p = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        if (((i & bit) != 0) == (outcome == 1)) p += std::norm(s[i]);
    return p;
}

/// Result of projecting onto a measurement outcome. `state` is empty when the
/// branch has probability below the zero threshold.
struct Postselection {
    double probability = 0.0;
    std::optional<StateVector> state;

    bool valid() const noexcept { return state.has_value(); }
};

/// Projects `state` in place onto `outcome` of `qubit` and renormalizes.
/// Returns the Born probability; returns false-y (probability < 1e-14) and
/// leaves the state untouched when the branch is empty.
inline double project_in_place(StateVector& s, std::size_t qubit, int outcome) {
    const double p = probability_of(s, qubit, outcome);
    if (p < kZeroProbability) return p;
    const std::size_t bit = std::size_t{1} << qubit;
    const double inv = 1.0 / std::sqrt(p);
    auto a = s.amplitudes();
    for (std::size_t i = 0; i < s.dim(); ++i) {
        if (((i & bit) != 0) == (outcome == 1))
            a[i] *= inv;
        else
            a[i] = 0.0;
    }
    return p;
}

inline Postselection postselect(const StateVector& state, std::size_t qubit, int outcome) {
    StateVector copy = state;
    const double p = project_in_place(copy, qubit, outcome);
    if (p < kZeroProbability) return {p, std::nullopt};
    return {p, std::move(copy)};
}

/// Samples a projective measurement of `qubit` and collapses the state in
/// place. Returns the outcome.
inline int measure(StateVector& s, std::size_t qubit, Rng& rng) {
    const double p1 = probability_of(s, qubit, 1);
    const int outcome = rng.uniform() < p1 ? 1 : 0;
    project_in_place(s, qubit, outcome);
    return outcome;
}

inline std::pair<int, StateVector> sample_measure(const StateVector& state, std::size_t qubit, Rng& rng) {
    StateVector copy = state;
    const int outcome = measure(copy, qubit, rng);
    return {outcome, std::move(copy)};
}

/// Amplitudes of the qubits not in `fixed`, conditioned on the bits of `fixed`
/// equal to `values`, renormalized. Throws AnnihilationError when the slice is
/// empty.
inline StateVector extract_slice(const StateVector& s, std::span<const std::size_t> fixed,
                                 std::span<const int> values) {
    if (fixed.size() != values.size()) throw ArgumentError("extract_slice: size mismatch");
    detail::check_targets(s, fixed);
    if (fixed.size() >= s.num_qubits()) throw ArgumentError("extract_slice: nothing left");
    std::size_t mask = 0, want = 0;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        mask |= std::size_t{1} << fixed[i];
        if (values[i]) want |= std::size_t{1} << fixed[i];
    }
    std::vector<std::size_t> sorted(fixed.begin(), fixed.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t rest = s.num_qubits() - fixed.size();
    std::vector<cplx> out(std::size_t{1} << rest);
    for (std::size_t c = 0; c < out.size(); ++c)
        out[c] = s[detail::insert_zero_bits(c, sorted) | want];
    return StateVector(rest, std::move(out));
}

}  // namespace nugate
