#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noetherq/channels.hpp"
#include "noetherq/linalg.hpp"

namespace noetherq {

// Solutions of S(x) = x. An operator system (selfadjoint, contains the
// identity when S is unital), but not an algebra in general.
OperatorSubspace fixed_point_space(const SuperOperator& s, const Tolerances& tol = {});

// Largest subspace on which a unital CP map is multiplicative against the
// whole algebra. Computed from the linear characterization: x belongs iff
// S(bx) = S(b)S(x) and S(xb) = S(x)S(b) for every basis element b. The
// quadratic description through vanishing Schwarz defects is equivalent and
// kept to the tests as a cross-check.
OperatorSubspace multiplicative_domain(const SuperOperator& s, const Tolerances& tol = {});

// Operators x with S(xb) = x S(b) and S(bx) = S(b) x for all b. For a unital
// CP map this equals fix ∩ mult_domain; it needs no positivity to define.
OperatorSubspace bimodule_domain(const SuperOperator& s, const Tolerances& tol = {});

struct SquareWitness {
  Mat element;            // hermitian fixed point whose square escapes
  double square_residual;  // distance of element² from the fixed space
};

struct FixedStructureReport {
  OperatorSubspace fix;
  OperatorSubspace mult_domain;
  OperatorSubspace bimodule;
  OperatorSubspace constants2;  // fix ∩ mult_domain
  bool fix_is_algebra = false;
  std::optional<SquareWitness> witness;  // set when fix is not an algebra
};

// Full structural survey of a unital CP map. The witness search runs over
// the hermitian fixed basis and seeded random real combinations, keeping the
// element whose square has the largest residual against fix.
FixedStructureReport constants_scale(const SuperOperator& s, std::uint64_t seed,
                                     const Tolerances& tol = {});

// One named check inside a verdict. Clauses sharing a positive group id are
// claimed equivalent by the underlying theorem; group 0 entries are
// informational only. A clause can be inapplicable (for instance when an
// equivalence needs complete positivity the map does not have).
struct Clause {
  std::string name;
  bool applicable = true;
  bool holds = false;
  double residual = 0.0;
  int group = 0;
  std::string note;
};

struct NoetherVerdict {
  std::vector<Clause> clauses;
  bool consistent = false;  // every group is uniformly true or uniformly false
};

bool clauses_consistent(const std::vector<Clause>& clauses);

// Propagation of a single fixed point of a unital CP map. Clauses:
//   (i)   x, x†x and xx† are all fixed
//   (ii)  x is fixed and both Schwarz defects of x and x† vanish
//   (iii) the unital algebra generated by x stays inside the fixed space
// For normal x a two-condition clause (x and x†x fixed) joins the group.
NoetherVerdict propagation_check(const SuperOperator& s, const Mat& x,
                                 const Tolerances& tol = {});

// Compression by b: X -> b† X b. Its trace dual is compression by b†.
SuperOperator measurement_superop(const Mat& b);

// Conservation of an observable under a trace-preserving evolution, checked
// through every route the discrete theorem offers:
//   left/right multiplication operators commuting with the map,
//   conservation of the observable and of its absolute square over states,
//   the dual fixing the observable and its absolute square.
// Non-hermitian observables split into two equivalence groups (one built on
// x†x, the mirrored one on xx†); hermitian observables merge them and gain
// an expectation-and-deviation clause over sampled states. Maps that are
// positive but not CP keep only the duality-based clauses applicable.
NoetherVerdict noether_discrete(const SuperOperator& psi, const Mat& a, std::uint64_t seed,
                                const Tolerances& tol = {});

// Conservation of a PSD observable under a stochastic (trace-preserving,
// positive, not necessarily CP) map: commutation with compression by the
// square root, the same for the dual, the dual fixing a and a², commutation
// with compressions by spectral projections and by sampled polynomials of a.
// All clauses form one equivalence group.
NoetherVerdict noether_measurement(const SuperOperator& s, const Mat& a, std::uint64_t seed,
                                   const Tolerances& tol = {});

// Eigenvalue clustering width used when extracting spectral projections.
double spectral_cluster_width(const Mat& a);

}  // namespace noetherq
