#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "noetherq/linalg.hpp"

namespace noetherq {

// Which normalization a channel is held to. The action is the same formula
// in both pictures, X -> sum_k A_k X A_k†; schrodinger channels preserve the
// trace (sum A_k† A_k = I), heisenberg channels preserve the identity
// (sum A_k A_k† = I). trace_dual swaps the two.
enum class Picture { schrodinger, heisenberg };

struct KrausChannel {
  int dim = 0;
  std::vector<Mat> kraus;
  Picture picture = Picture::schrodinger;
};

// sum A_k† A_k for schrodinger, sum A_k A_k† for heisenberg; the picture's
// normalization demands this equal the identity.
Mat picture_gram(const KrausChannel& ch);
bool channel_normalized(const KrausChannel& ch, const Tolerances& tol = {});
void validate_channel(const KrausChannel& ch, const Tolerances& tol = {});

// Adjoint channel: each Kraus operator adjointed, picture swapped.
KrausChannel channel_dual(const KrausChannel& ch);

// Measurement channel from effects: PSD operators summing to the identity.
// Kraus operators are the positive square roots of the effects, so the
// result is trace preserving and unital at once. Eigenvalues of an effect
// that dip slightly negative (within psd_tol) are clamped to zero.
KrausChannel build_luders(const std::vector<Mat>& effects, const Tolerances& tol = {});

// Superoperator matrix sum_k conj(A_k) kron A_k, with flags filled in from
// the picture and a completeness check of the Kraus family.
SuperOperator channel_super(const KrausChannel& ch, const Tolerances& tol = {});

// C = sum_ij E_ij kron S(E_ij). S is completely positive iff C is PSD.
Mat choi_matrix(const SuperOperator& s);

// X -> X^T as a superoperator. Positive, trace preserving, unital, not 2-positive.
SuperOperator transpose_superop(int dim);

// Stochastic maps are built from pipelines of stages; a stage is a Kraus
// channel or the transpose. Several pipelines may be mixed convexly.
struct TransposeStage {
  int dim = 0;
};
using PipelineStage = std::variant<KrausChannel, TransposeStage>;

struct Pipeline {
  std::vector<PipelineStage> stages;  // applied in order, first stage first
};

struct StochasticMapSpec {
  int dim = 0;
  std::vector<Pipeline> pipelines;
  std::vector<double> weights;  // empty for a single pipeline, else convex
};

// Multiplies the stage matrices (and convexly combines pipelines), then
// recomputes all structural flags on the result. Rejects weights that are
// negative or fail to sum to one.
SuperOperator compile_map(const StochasticMapSpec& spec, const Tolerances& tol = {});

// Negative certification of k-positivity by witness search. For each k up to
// k_max the canonical entanglement witness sum_{ij} E_ij kron E_ij is tried
// first, then `samples` random PSD inputs of unit norm. A violation is a
// certificate; its absence is only evidence.
struct KPositivityResult {
  int k = 0;
  bool violated = false;
  double min_eigenvalue = 0.0;
  Mat witness;  // kd x kd PSD input achieving min_eigenvalue
};

struct PositivityProfile {
  bool trace_preserving = false;
  bool unital = false;
  bool hermiticity_preserving = false;
  bool completely_positive = false;
  double choi_min_eigenvalue = 0.0;
  std::vector<KPositivityResult> k_levels;
};

PositivityProfile positivity_profile(const SuperOperator& s, int k_max, int samples,
                                     std::uint64_t seed, const Tolerances& tol = {});

// Dilation (K; rep; V) of the operator-side action: rep(a) = a kron I_m on
// K = C^d kron C^m and V†(a kron I_m)V reproduces the unital-picture channel.
// A schrodinger channel is dilated through its trace dual, so the
// reconstructed map is always the heisenberg-side action. V is a contraction
// with V†V equal to the channel's value at the identity; m = number of Kraus
// operators, no minimality attempted.
struct StinespringTriple {
  int dim = 0;
  int env_dim = 0;
  Mat isometry;               // (dim * env_dim) x dim
  SuperOperator reconstructed;  // the heisenberg-side action V represents
};

Mat representation(const StinespringTriple& st, const Mat& a);
Mat stinespring_apply(const StinespringTriple& st, const Mat& a);  // V†(a kron I)V
StinespringTriple stinespring_dilation(const KrausChannel& ch, const Tolerances& tol = {});

// D = S(a†a) − S(a)†S(a). PSD for unital completely positive S; the inputs
// with D = 0 are exactly where S multiplies. Refuses maps without the
// unital CP certificate.
Mat schwarz_defect(const SuperOperator& s, const Mat& a, const Tolerances& tol = {});

}  // namespace noetherq
