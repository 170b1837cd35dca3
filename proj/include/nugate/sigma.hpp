#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nugate/errors.hpp"
#include "nugate/state_vector.hpp"

namespace nugate {

/// Non-negative diagonal operator Σ, stored eigenvalue-wise, together with
/// the factor it was divided by.
class DiagonalSigma {
public:
    DiagonalSigma() = default;

    /// Divides `values` by their maximum so the largest entry is exactly 1.
    static DiagonalSigma normalized(std::vector<double> values) {
        validate(values);
        const double mx = *std::max_element(values.begin(), values.end());
        if (!(mx > 0.0)) throw ArgumentError("DiagonalSigma: all values are zero");
        for (auto& v : values) v /= mx;
        return DiagonalSigma(std::move(values), mx);
    }

    /// Keeps `values` as given (entries may exceed 1); norm_factor is 1.
    static DiagonalSigma raw(std::vector<double> values) {
        validate(values);
        return DiagonalSigma(std::move(values), 1.0);
    }

    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double norm_factor() const noexcept { return norm_factor_; }
    std::size_t dim() const noexcept { return values_.size(); }
    std::size_t num_qubits() const noexcept {
        return static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(values_.size())));
    }

private:
    DiagonalSigma(std::vector<double> v, double f) : values_(std::move(v)), norm_factor_(f) {}

    static void validate(const std::vector<double>& values) {
        if (values.size() < 2 || !std::has_single_bit(static_cast<std::uint64_t>(values.size())))
            throw ArgumentError("DiagonalSigma: dimension must be a power of two >= 2");
        for (const auto v : values)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ArgumentError("DiagonalSigma: values must be finite and non-negative");
    }

    std::vector<double> values_;
    double norm_factor_ = 1.0;
};

/// Computational-basis probabilities |<i|psi>|^2.
inline std::vector<double> basis_weights(const StateVector& psi) {
    std::vector<double> w(psi.dim());
    for (std::size_t i = 0; i < psi.dim(); ++i) w[i] = std::norm(psi[i]);
    return w;
}

inline void require_same_dim(const DiagonalSigma& sigma, const StateVector& psi) {
    if (sigma.dim() != psi.dim())
        throw ArgumentError("Sigma and state dimensions differ");
}

/// <psi| g(Σ) |psi> for a scalar function g applied eigenvalue-wise.
template <class F>
double expectation(const std::vector<double>& sigma, const std::vector<double>& weights, F&& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i)
        if (weights[i] != 0.0) s += weights[i] * g(sigma[i]);
    return s;
}

/// Σ² = Σ on the support of the weights (support threshold 1e-14).
inline bool is_idempotent_on(const std::vector<double>& sigma, const std::vector<double>& weights,
                             double tol = 1e-10) {
    for (std::size_t i = 0; i < sigma.size(); ++i)
        if (weights[i] > kZeroProbability && std::abs(sigma[i] * sigma[i] - sigma[i]) >= tol) return false;
    return true;
}

}  // namespace nugate
