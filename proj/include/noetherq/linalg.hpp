#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "noetherq/types.hpp"

namespace noetherq {

// Column-stacking vectorization: vec(X)[j*d + i] = X(i, j), so that
// vec(A X B) = (B^T kron A) vec(X). All superoperator matrices in this
// library are written against this convention.
Vec vec(const Mat& x);
Mat unvec(const Vec& v, int dim);

Mat kron(const Mat& a, const Mat& b);

double min_eigenvalue_hermitian_part(const Mat& a);

// Positive square root of a PSD matrix. Eigenvalues inside [-psd_tol, 0)
// clamp to zero; anything further below is an error.
Mat psd_sqrt(const Mat& a, const Tolerances& tol = {});

// Tolerance-aware operator predicates. Equality-style checks scale eq_tol by
// max(1, norm); the PSD check uses psd_tol as an absolute slack on the
// minimum eigenvalue of the hermitian part.
bool is_hermitian(const Mat& a, const Tolerances& tol = {});
bool is_psd(const Mat& a, const Tolerances& tol = {});
bool is_projection(const Mat& a, const Tolerances& tol = {});
bool is_unitary(const Mat& a, const Tolerances& tol = {});

// Cached structural flags of a linear map on operators. A set flag must agree
// with recomputation from the matrix; absent means not yet classified.
struct MapFlags {
  std::optional<bool> trace_preserving;
  std::optional<bool> unital;
  std::optional<bool> hermiticity_preserving;
  std::optional<bool> completely_positive;
};

// A linear map on d x d operators, stored as its d^2 x d^2 matrix in the
// vectorization convention above.
class SuperOperator {
 public:
  SuperOperator() = default;
  SuperOperator(int dim, Mat m);

  static SuperOperator identity(int dim);
  static SuperOperator left_mult(const Mat& a);   // X -> a X
  static SuperOperator right_mult(const Mat& a);  // X -> X a
  static SuperOperator sandwich(const Mat& a, const Mat& b);  // X -> a X b
  static SuperOperator from_action(int dim, const std::function<Mat(const Mat&)>& f);

  int dim() const { return dim_; }
  const Mat& matrix() const { return m_; }
  Mat apply(const Mat& x) const;

  // this after inner, i.e. X -> this(inner(X))
  SuperOperator compose(const SuperOperator& inner) const;

  SuperOperator operator+(const SuperOperator& o) const;
  SuperOperator operator-(const SuperOperator& o) const;
  SuperOperator scaled(Complex c) const;

  bool is_trace_preserving(const Tolerances& tol = {}) const;
  bool is_unital(const Tolerances& tol = {}) const;
  bool is_hermiticity_preserving(const Tolerances& tol = {}) const;
  bool is_completely_positive(const Tolerances& tol = {}) const;

  MapFlags& flags() { return flags_; }
  const MapFlags& flags() const { return flags_; }

 private:
  int dim_ = 0;
  Mat m_;
  MapFlags flags_;
};

Mat apply_super(const SuperOperator& s, const Mat& x);

// Adjoint with respect to the trace pairing <T, S> = tr(TS). Only defined
// here for hermiticity-preserving maps, where it coincides with the
// conjugate transpose of the superoperator matrix; anything else is refused.
// Trace-preserving and unital flags swap, the other two carry over.
SuperOperator trace_dual(const SuperOperator& s, const Tolerances& tol = {});

// A subspace of d x d operators held as a Hilbert-Schmidt orthonormal basis.
class OperatorSubspace {
 public:
  OperatorSubspace() = default;
  OperatorSubspace(int dim, std::vector<Mat> orthonormal_basis);

  // Orthonormalizes an arbitrary spanning set, dropping near-dependent
  // elements at the rank tolerance.
  static OperatorSubspace span_of(int dim, const std::vector<Mat>& generators,
                                  const Tolerances& tol = {});

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(basis_.size()); }
  bool empty() const { return basis_.empty(); }
  const std::vector<Mat>& basis() const { return basis_; }

  // Vectorized basis as the columns of a d^2 x size matrix.
  Mat basis_matrix() const;

  Mat project(const Mat& x) const;
  double residual(const Mat& x) const;
  bool contains(const Mat& x, const Tolerances& tol = {}) const;
  bool contains(const OperatorSubspace& other, const Tolerances& tol = {}) const;
  bool same_space(const OperatorSubspace& other, const Tolerances& tol = {}) const;

  bool basis_is_hermitian(const Tolerances& tol = {}) const;

  const std::vector<std::string>& notes() const { return notes_; }
  void add_note(std::string n) { notes_.push_back(std::move(n)); }

 private:
  int dim_ = 0;
  std::vector<Mat> basis_;
  std::vector<std::string> notes_;
};

// Numerical kernel of a matrix acting on vectorized operators. m must have
// d^2 columns; rows may be any positive multiple (stacked conditions).
// Singular values at or below rank_tol * sigma_max count as zero; a cluster
// of singular values within a factor of 10 of the cutoff on either side is
// reported in the result's notes instead of being silently classified.
// If the kernel is closed under the adjoint, the returned basis is rebuilt
// from hermitian elements (real combinations of V + V† and i(V − V†)).
OperatorSubspace kernel_subspace(const Mat& m, int op_dim, const Tolerances& tol = {});

// Intersection as the kernel of the stacked projector complements.
OperatorSubspace subspace_intersect(const OperatorSubspace& v, const OperatorSubspace& w,
                                    const Tolerances& tol = {});

// Smallest subspace containing the generators (and the identity when asked)
// that is closed under adjoints and products. Iterates adjoin-and-close
// rounds; the dimension is monotone and capped by d^2, so this terminates.
OperatorSubspace algebra_closure(const std::vector<Mat>& generators, bool include_identity,
                                 const Tolerances& tol = {});

}  // namespace noetherq
