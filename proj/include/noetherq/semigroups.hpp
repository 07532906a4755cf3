#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noetherq/fixed_structure.hpp"

namespace noetherq {

// Generator data in jump-operator form. The schrodinger action is
//   g(S) = sum_k (L_k S L_k† − ½ S L_k†L_k − ½ L_k†L_k S) + i[S, H]
// and the heisenberg action is its trace dual,
//   g♯(T) = sum_k (L_k† T L_k − ½ L_k†L_k T − ½ T L_k†L_k) − i[T, H].
// H enters through a commutator, so only its hermitian part is admitted.
struct LindbladGenerator {
  int dim = 0;
  std::vector<Mat> lindblad;
  Mat hamiltonian;  // empty means zero
};

SuperOperator lindblad_super(const LindbladGenerator& g, Picture picture,
                             const Tolerances& tol = {});

// A one-parameter semigroup exp(t * generator), described either by jump
// operators or by a channel-minus-identity generator. Both picture
// generators are materialized on construction; the time grid is carried
// along for routines that sample the evolution.
class SemigroupSpec {
 public:
  static std::vector<double> default_time_grid();

  static SemigroupSpec from_lindblad(LindbladGenerator g,
                                     std::vector<double> grid = default_time_grid(),
                                     const Tolerances& tol = {});
  // channel must satisfy its picture normalization; complete positivity is
  // recorded but not required, so stochastic semigroups are admitted too
  static SemigroupSpec from_channel_minus_id(const SuperOperator& channel, Picture given,
                                             std::vector<double> grid = default_time_grid(),
                                             const Tolerances& tol = {});

  int dim() const { return schrodinger_.dim(); }
  const SuperOperator& generator(Picture p) const;
  const std::vector<double>& time_grid() const { return grid_; }
  const std::optional<LindbladGenerator>& lindblad_form() const { return lindblad_; }
  bool completely_positive() const { return cp_; }

 private:
  SemigroupSpec() = default;
  SuperOperator schrodinger_;
  SuperOperator heisenberg_;
  std::vector<double> grid_;
  std::optional<LindbladGenerator> lindblad_;
  bool cp_ = false;
};

// exp(t g) in the requested picture, t >= 0.
SuperOperator evolve(const SemigroupSpec& sg, double t, Picture picture = Picture::schrodinger,
                     const Tolerances& tol = {});

// Spectral abscissa of the generator. Finite dimension makes this the least
// omega with ||exp(t g)|| growing no faster than exp(omega t); a properly
// normalized generator gives exactly 0.
double growth_bound(const SemigroupSpec& sg);

// Resolvent exponential formula: e^{−λt} sum_n (λ²t)ⁿ (λI − g)^{−n} / n!,
// truncated once the Poisson tail falls below eq_tol. Requires λ above the
// growth bound. Converges to evolve(t) as λ grows.
SuperOperator yosida_approx(const SemigroupSpec& sg, double t, double lambda,
                            Picture picture = Picture::schrodinger, const Tolerances& tol = {});

// Kernel of the heisenberg generator: observables stationary under the dual
// evolution for every t. Verified against the fixed spaces of the evolution
// at incommensurate sample times; disagreement lands in the notes.
OperatorSubspace constants_of_motion(const SemigroupSpec& sg, const Tolerances& tol = {});

struct ErgodicReport {
  SuperOperator projection;  // idempotent averaging map, unital side
  OperatorSubspace range;    // joint fixed points
  std::string method;        // "cesaro" or "spectral"
  int doublings = 0;         // averaging rounds used before convergence/cap
  double idempotency_residual = 0.0;
  std::vector<std::string> notes;
};

// Discrete averaging of a unital CP map: doubling Cesàro means with an
// iteration budget, then a spectral projection onto ker(S − I) along
// ran(S − I) when averaging alone has not stabilized. Eigenvalue 1 of a
// power-bounded map is semisimple, so the spectral route is exact.
ErgodicReport ergodic_projection_discrete(const SuperOperator& s, const Tolerances& tol = {});

// Continuous counterpart: spectral projection onto ker(g♯) along ran(g♯).
ErgodicReport ergodic_projection_continuous(const SemigroupSpec& sg, const Tolerances& tol = {});

struct ConditionalExpectationReport {
  bool passes = false;
  double max_residual = 0.0;
  Mat witness_module_element;  // a attaining the max
  Mat witness_range_element;   // r attaining the max
};

// Module property of an idempotent: p(a r) = p(a) r and p(r a) = r p(a) for
// r in the range and a running over matrix units. Passes exactly when the
// range is closed under multiplication.
ConditionalExpectationReport conditional_expectation_check(const SuperOperator& p,
                                                           const Tolerances& tol = {});

// Continuous-time conservation verdict for an observable. Mirrors the
// discrete clauses over the spec's time grid and adds the generator forms:
// commutators with the generator and membership of a (and its square) in
// the kernel of the dual generator. PSD observables gain the compression
// clauses, which hold without complete positivity.
NoetherVerdict noether_continuous(const SemigroupSpec& sg, const Mat& a, std::uint64_t seed,
                                  const Tolerances& tol = {});

struct ObservableStats {
  double expectation = 0.0;
  double variance = 0.0;
  double std_dev = 0.0;
};

// Moments of a hermitian observable in a state (PSD, unit trace).
ObservableStats quantum_stats(const Mat& a, const Mat& rho, const Tolerances& tol = {});

}  // namespace noetherq
