// Repeat-until-success on one qubit: Σ = diag(1, 0.5), ψ0 = |+⟩.
// Prints the shot threshold for a fidelity bound and one sampled trajectory.

#include <cstdio>

#include "nugate/nugate.hpp"

int main() {
    using namespace nugate;
    const auto sigma = DiagonalSigma::normalized({1.0, 0.5});
    const auto psi0 = uniform_superposition(1);
    const double eps = 0.1, eta = 0.01;

    const TradeoffQuery q{sigma, psi0, eta, eps};
    const auto n_star = threshold_shots(q);
    std::printf("n* = %llu, P(flip within n*) = %.6f, eps->0 limit = %.6f\n",
                static_cast<unsigned long long>(*n_star), cumulative_success(q),
                limiting_success(sigma, psi0, eta).value);

    Rng rng(2024);
    const auto tr = rus_run(psi0, sigma, eps, *n_star, rng);
    if (tr.succeeded()) {
        std::printf("flipped at shot %llu, fidelity with target %.8f (closed form %.8f)\n",
                    static_cast<unsigned long long>(*tr.success_shot), fidelity(*tr.output, target_state(sigma, psi0)),
                    fidelity_after(q, *tr.success_shot));
    } else {
        std::printf("no flip within %llu shots\n", static_cast<unsigned long long>(tr.shots));
    }
}
