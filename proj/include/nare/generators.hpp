#pragma once

#include <cstdint>

#include "nare/classify.hpp"

namespace nare {

/// A = D = P + j eta I, B = C = u I, where P has xi on the diagonal, -1 on
/// the superdiagonal and -1 in the bottom-left corner.
NareProblem gen_example_71(Index n, double xi, double eta, double u, double omega);

/// A = eta blkdiag(I, -I) + 3j I, D = 2 eta blkdiag(I, -I) + 3j I, B = C = I.
NareProblem gen_example_72(Index n, double eta, double omega);

/// Random instance in the strict class. Off-diagonal entries of Q are uniform
/// in the unit disc; each diagonal entry is placed so that its
/// omega-projection is (q_i + margin) rho_i with rho_i in [1, 2).
NareProblem gen_random_homega(Index n, Index m, double omega, double margin, std::uint64_t seed);

/// RICCATI_SEED from the environment when set, otherwise fallback.
std::uint64_t seed_from_env(std::uint64_t fallback);

}  // namespace nare
