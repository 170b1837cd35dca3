// Grover iterations on a single embedded gate, compared with the 2x2
// transfer matrix.

#include <cstdio>
#include <vector>

#include "nugate/nugate.hpp"

int main() {
    using namespace nugate;
    const auto sigma = DiagonalSigma::normalized({1.0, 0.9, 0.3, 0.05});
    const auto psi0 = uniform_superposition(2);
    const double eps = 0.08;

    const std::vector<PlacedSigma> gate{{sigma, {0, 1}}};
    const StateVector prepared = prepare_branches(gate, psi0, eps);
    const double t = branch_weights(gate, psi0, eps)[0];
    const TransferMatrix2 T(t);
    const std::size_t anc[] = {2};

    StateVector s = prepared;
    std::printf("t = %.6f\n k   simulated     transfer      closed form\n", t);
    for (std::uint64_t k = 0; k <= 8; ++k) {
        std::printf("%2llu   %.10f  %.10f  %.10f\n", static_cast<unsigned long long>(k), probability_of(s, 2, 1),
                    1.0 - T.failure(k), 1.0 - failure_prob(t, k));
        grover_iteration(s, prepared, anc);
    }
}
