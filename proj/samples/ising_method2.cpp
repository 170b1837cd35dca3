// Whole-register Grover amplification of a random 8-site Ising chain at
// τ = 10: success probability and ground-subspace weight per iteration.

#include <cstdio>

#include "nugate/nugate.hpp"

int main() {
    using namespace nugate;
    Rng rng(11);
    const auto chain = random_chain(8, rng);
    const auto rep = method2_run(chain, 10.0, rng);
    std::printf("k = %llu, eps = %.6g, s = %.6g\n", static_cast<unsigned long long>(rep.plan.k),
                rep.plan.epsilon_schedule.front(), rep.s_actual);
    for (const auto& p : rep.curve)
        std::printf("k=%2llu  success=%.8f  ground=%.8f\n", static_cast<unsigned long long>(p.k), p.success_prob,
                    p.fidelity_ground);
}
