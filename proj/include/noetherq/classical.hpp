#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "noetherq/semigroups.hpp"

namespace noetherq {

// Finite Markov data in the column convention: matrix(i, j) is the flow from
// state j into state i, so distributions evolve as p -> M p. Stochastic
// matrices have nonnegative entries and unit column sums; rate matrices have
// nonnegative off-diagonal entries and zero column sums.
enum class ChainKind { stochastic, rate };

struct ClassicalChain {
  int states = 0;
  ChainKind kind = ChainKind::stochastic;
  RMat matrix;
};

using ObservableVector = RVec;
using Distribution = RVec;

void validate_chain(const ClassicalChain& c, const Tolerances& tol = {});

// One-step conservation of a classical observable. Clauses, all one group:
// commutation of diag(o) with the transition matrix, conservation of o and
// o² against a basis of distributions (the transpose applied to o and o²),
// and multi-step constancy at a few sampled step counts.
NoetherVerdict classical_noether_discrete(const ClassicalChain& c, const RVec& o,
                                          const Tolerances& tol = {});

// Continuous counterpart for rate matrices: commutation of diag(o) with the
// semigroup exp(tH) at sampled times and with H itself, and membership of o
// and o² in the kernel of the transposed rate matrix.
NoetherVerdict classical_noether_continuous(const ClassicalChain& c, const RVec& o,
                                            const Tolerances& tol = {});

// Quantum embedding on diagonal matrices. A stochastic matrix U becomes the
// schrodinger channel with Kraus family {sqrt(U_ij) E_ij}, which carries
// diag(p) to diag(Up) and annihilates coherences; a rate matrix H becomes
// the generator with jumps {sqrt(H_ij) E_ij, i != j} and zero hamiltonian.
std::variant<KrausChannel, SemigroupSpec> embed_diagonal(const ClassicalChain& c,
                                                         const Tolerances& tol = {});

struct ClassicalCounterexample {
  ClassicalChain chain;
  RVec observable;
  double conservation_residual = 0.0;  // ||U^T o − o||, should be ~0
  double square_violation = 0.0;       // ||U^T o² − o²||, should be large
  std::string note;
};

// Searches for a chain conserving an observable but not its square. Random
// absorbing-block constructions are tried first and verified; the known
// 3-state instance is the fallback. Two states provably cannot work, which
// an exhaustive grid pass at resolution 1/64 double-checks before falling
// back with a note.
ClassicalCounterexample counterexample_search_classical(int n_max, std::uint64_t seed,
                                                        const Tolerances& tol = {});

}  // namespace noetherq
