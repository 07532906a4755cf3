#include "noetherq/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace noetherq {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("operator dimension " + std::to_string(dim) +
                                " outside supported range [1, " + std::to_string(kMaxDim) + "]");
  }
}

// Swap matrix T with vec(X^T) = T vec(X). Real, symmetric, involutive.
Mat commutation_matrix(int d) {
  Mat t = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i * d + j, j * d + i) = 1.0;
  return t;
}

Mat choi_of(const Mat& m, int d) {
  // C = sum_ij E_ij kron S(E_ij); block (i,j) of size d holds S(E_ij),
  // which is column j*d+i of m reshaped.
  Mat c = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::Map<const Mat> block(m.col(j * d + i).data(), d, d);
      c.block(i * d, j * d, d, d) = block;
    }
  return c;
}

}  // namespace

Vec vec(const Mat& x) {
  return Eigen::Map<const Vec>(x.data(), x.size());
}

Mat unvec(const Vec& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    throw std::invalid_argument("unvec: length does not match dimension");
  return Eigen::Map<const Mat>(v.data(), dim, dim);
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double min_eigenvalue_hermitian_part(const Mat& a) {
  Mat h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat psd_sqrt(const Mat& a, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (a + a.adjoint())));
  if (es.eigenvalues().minCoeff() < -tol.psd_tol)
    throw std::invalid_argument("psd_sqrt: matrix is not positive semidefinite");
  Vec roots(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < roots.size(); ++i)
    roots(i) = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

bool is_hermitian(const Mat& a, const Tolerances& tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol.eq_tol * std::max(1.0, a.norm());
}

bool is_psd(const Mat& a, const Tolerances& tol) {
  if (!is_hermitian(a, tol)) return false;
  return min_eigenvalue_hermitian_part(a) >= -tol.psd_tol;
}

bool is_projection(const Mat& a, const Tolerances& tol) {
  if (!is_hermitian(a, tol)) return false;
  return (a * a - a).norm() <= tol.eq_tol * std::max(1.0, a.norm());
}

bool is_unitary(const Mat& a, const Tolerances& tol) {
  if (a.rows() != a.cols()) return false;
  Mat gram = a.adjoint() * a;
  return (gram - Mat::Identity(a.rows(), a.cols())).norm() <=
         tol.eq_tol * std::max(1.0, a.squaredNorm());
}

SuperOperator::SuperOperator(int dim, Mat m) : dim_(dim), m_(std::move(m)) {
  check_dim(dim);
  if (m_.rows() != static_cast<Eigen::Index>(dim) * dim || m_.rows() != m_.cols())
    throw std::invalid_argument("superoperator matrix must be dim^2 x dim^2");
}

SuperOperator SuperOperator::identity(int dim) {
  check_dim(dim);
  SuperOperator s(dim, Mat::Identity(dim * dim, dim * dim));
  s.flags_ = {true, true, true, true};
  return s;
}

SuperOperator SuperOperator::left_mult(const Mat& a) {
  const int d = static_cast<int>(a.rows());
  return SuperOperator(d, kron(Mat::Identity(d, d), a));
}

SuperOperator SuperOperator::right_mult(const Mat& a) {
  const int d = static_cast<int>(a.rows());
  return SuperOperator(d, kron(a.transpose(), Mat::Identity(d, d)));
}

SuperOperator SuperOperator::sandwich(const Mat& a, const Mat& b) {
  const int d = static_cast<int>(a.rows());
  return SuperOperator(d, kron(b.transpose(), a));
}

SuperOperator SuperOperator::from_action(int dim, const std::function<Mat(const Mat&)>& f) {
  check_dim(dim);
  Mat m(dim * dim, dim * dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) {
      Mat unit = Mat::Zero(dim, dim);
      unit(i, j) = 1.0;
      Mat out = f(unit);
      if (out.rows() != dim || out.cols() != dim)
        throw std::invalid_argument("from_action: action changes dimension");
      m.col(j * dim + i) = vec(out);
    }
  return SuperOperator(dim, std::move(m));
}

Mat SuperOperator::apply(const Mat& x) const {
  if (x.rows() != dim_ || x.cols() != dim_)
    throw std::invalid_argument("apply: operand dimension mismatch");
  return unvec(m_ * vec(x), dim_);
}

SuperOperator SuperOperator::compose(const SuperOperator& inner) const {
  if (inner.dim_ != dim_) throw std::invalid_argument("compose: dimension mismatch");
  return SuperOperator(dim_, m_ * inner.m_);
}

SuperOperator SuperOperator::operator+(const SuperOperator& o) const {
  if (o.dim_ != dim_) throw std::invalid_argument("sum: dimension mismatch");
  return SuperOperator(dim_, m_ + o.m_);
}

SuperOperator SuperOperator::operator-(const SuperOperator& o) const {
  if (o.dim_ != dim_) throw std::invalid_argument("difference: dimension mismatch");
  return SuperOperator(dim_, m_ - o.m_);
}

SuperOperator SuperOperator::scaled(Complex c) const { return SuperOperator(dim_, c * m_); }

bool SuperOperator::is_trace_preserving(const Tolerances& tol) const {
  Vec id = vec(Mat::Identity(dim_, dim_));
  return (m_.adjoint() * id - id).norm() <= tol.eq_tol * std::max(1.0, id.norm());
}

bool SuperOperator::is_unital(const Tolerances& tol) const {
  Vec id = vec(Mat::Identity(dim_, dim_));
  return (m_ * id - id).norm() <= tol.eq_tol * std::max(1.0, id.norm());
}

bool SuperOperator::is_hermiticity_preserving(const Tolerances& tol) const {
  Mat t = commutation_matrix(dim_);
  return (m_.conjugate() - t * m_ * t).norm() <= tol.eq_tol * std::max(1.0, m_.norm());
}

bool SuperOperator::is_completely_positive(const Tolerances& tol) const {
  Mat c = choi_of(m_, dim_);
  if ((c - c.adjoint()).norm() > tol.eq_tol * std::max(1.0, c.norm())) return false;
  return min_eigenvalue_hermitian_part(c) >= -tol.psd_tol;
}

Mat apply_super(const SuperOperator& s, const Mat& x) { return s.apply(x); }

SuperOperator trace_dual(const SuperOperator& s, const Tolerances& tol) {
  bool hp = s.flags().hermiticity_preserving.value_or(s.is_hermiticity_preserving(tol));
  if (!hp)
    throw std::invalid_argument(
        "trace_dual: map is not hermiticity preserving, refusing the matrix-adjoint shortcut");
  SuperOperator d(s.dim(), s.matrix().adjoint());
  d.flags().trace_preserving = s.flags().unital;
  d.flags().unital = s.flags().trace_preserving;
  d.flags().hermiticity_preserving = true;
  d.flags().completely_positive = s.flags().completely_positive;
  return d;
}

OperatorSubspace::OperatorSubspace(int dim, std::vector<Mat> orthonormal_basis)
    : dim_(dim), basis_(std::move(orthonormal_basis)) {
  check_dim(dim);
  for (const Mat& b : basis_)
    if (b.rows() != dim || b.cols() != dim)
      throw std::invalid_argument("subspace basis element has wrong dimension");
}

OperatorSubspace OperatorSubspace::span_of(int dim, const std::vector<Mat>& generators,
                                           const Tolerances& tol) {
  check_dim(dim);
  if (generators.empty()) return OperatorSubspace(dim, {});
  Mat cols(dim * dim, static_cast<Eigen::Index>(generators.size()));
  for (std::size_t k = 0; k < generators.size(); ++k) {
    if (generators[k].rows() != dim || generators[k].cols() != dim)
      throw std::invalid_argument("span_of: generator dimension mismatch");
    cols.col(static_cast<Eigen::Index>(k)) = vec(generators[k]);
  }
  Eigen::BDCSVD<Mat> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double cutoff = tol.rank_tol * (sv.size() ? sv(0) : 0.0);
  std::vector<Mat> basis;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) basis.push_back(unvec(svd.matrixU().col(i), dim));
  return OperatorSubspace(dim, std::move(basis));
}

Mat OperatorSubspace::basis_matrix() const {
  Mat b(dim_ * dim_, size());
  for (int i = 0; i < size(); ++i) b.col(i) = vec(basis_[static_cast<std::size_t>(i)]);
  return b;
}

Mat OperatorSubspace::project(const Mat& x) const {
  if (x.rows() != dim_ || x.cols() != dim_)
    throw std::invalid_argument("project: operand dimension mismatch");
  if (empty()) return Mat::Zero(dim_, dim_);
  Mat b = basis_matrix();
  return unvec(b * (b.adjoint() * vec(x)), dim_);
}

double OperatorSubspace::residual(const Mat& x) const { return (x - project(x)).norm(); }

bool OperatorSubspace::contains(const Mat& x, const Tolerances& tol) const {
  return residual(x) <= tol.eq_tol * std::max(1.0, x.norm());
}

bool OperatorSubspace::contains(const OperatorSubspace& other, const Tolerances& tol) const {
  for (const Mat& b : other.basis())
    if (!contains(b, tol)) return false;
  return true;
}

bool OperatorSubspace::same_space(const OperatorSubspace& other, const Tolerances& tol) const {
  return size() == other.size() && contains(other, tol) && other.contains(*this, tol);
}

bool OperatorSubspace::basis_is_hermitian(const Tolerances& tol) const {
  for (const Mat& b : basis_)
    if (!is_hermitian(b, tol)) return false;
  return true;
}

namespace {

// Rebuild a *-closed orthonormal basis out of hermitian elements. The real
// span of {(V + V†)/2, (V − V†)/2i} inside the hermitian matrices has real
// dimension equal to the complex dimension of the original space, so a real
// SVD recovers exactly k orthonormal hermitian elements. Returns nothing if
// the count comes out wrong (input was not actually *-closed).
std::vector<Mat> hermitian_rebasis(int dim, const std::vector<Mat>& basis,
                                   const Tolerances& tol, bool* ok) {
  *ok = false;
  const int k = static_cast<int>(basis.size());
  if (k == 0) {
    *ok = true;
    return {};
  }
  const int n = dim * dim;
  RMat cand(2 * n, 2 * k);
  for (int i = 0; i < k; ++i) {
    Mat re = 0.5 * (basis[static_cast<std::size_t>(i)] + basis[static_cast<std::size_t>(i)].adjoint());
    Mat im = Complex(0, -0.5) *
             (basis[static_cast<std::size_t>(i)] - basis[static_cast<std::size_t>(i)].adjoint());
    Vec vre = vec(re), vim = vec(im);
    cand.col(2 * i) << vre.real(), vre.imag();
    cand.col(2 * i + 1) << vim.real(), vim.imag();
  }
  Eigen::BDCSVD<RMat> svd(cand, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  double cutoff = tol.rank_tol * (sv.size() ? sv(0) : 0.0);
  std::vector<Mat> herm;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cutoff) continue;
    Vec v(n);
    v.real() = svd.matrixU().col(i).head(n);
    v.imag() = svd.matrixU().col(i).tail(n);
    herm.push_back(unvec(v, dim));
  }
  if (static_cast<int>(herm.size()) != k) return basis;
  *ok = true;
  return herm;
}

}  // namespace

OperatorSubspace kernel_subspace(const Mat& m, int op_dim, const Tolerances& tol) {
  check_dim(op_dim);
  const Eigen::Index n = static_cast<Eigen::Index>(op_dim) * op_dim;
  if (m.cols() != n) throw std::invalid_argument("kernel_subspace: column count must be dim^2");
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cutoff = tol.rank_tol * smax;
  std::vector<Mat> basis;
  bool near_threshold = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = i < sv.size() ? sv(i) : 0.0;
    if (s <= cutoff) basis.push_back(unvec(svd.matrixV().col(i), op_dim));
    if (cutoff > 0.0 && s > cutoff / 10.0 && s < cutoff * 10.0) near_threshold = true;
  }
  OperatorSubspace ker(op_dim, std::move(basis));
  if (near_threshold)
    ker.add_note("singular values within a factor of 10 of the rank cutoff; "
                 "kernel dimension may be sensitive to rank_tol");

  // Kernels of the maps this library builds are *-closed whenever the parent
  // map is hermiticity preserving; present such kernels with hermitian bases.
  bool star_closed = true;
  for (const Mat& b : ker.basis())
    if (!ker.contains(b.adjoint(), tol)) {
      star_closed = false;
      break;
    }
  if (star_closed && !ker.empty()) {
    bool ok = false;
    std::vector<Mat> herm = hermitian_rebasis(op_dim, ker.basis(), tol, &ok);
    OperatorSubspace out(op_dim, std::move(herm));
    for (const std::string& note : ker.notes()) out.add_note(note);
    if (!ok) out.add_note("hermitian rebasis failed; keeping complex kernel basis");
    return out;
  }
  return ker;
}

OperatorSubspace subspace_intersect(const OperatorSubspace& v, const OperatorSubspace& w,
                                    const Tolerances& tol) {
  if (v.dim() != w.dim()) throw std::invalid_argument("subspace_intersect: dimension mismatch");
  const int d = v.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Mat bv = v.basis_matrix(), bw = w.basis_matrix();
  Mat stacked(2 * n, n);
  stacked.topRows(n) = Mat::Identity(n, n) - bv * bv.adjoint();
  stacked.bottomRows(n) = Mat::Identity(n, n) - bw * bw.adjoint();
  return kernel_subspace(stacked, d, tol);
}

OperatorSubspace algebra_closure(const std::vector<Mat>& generators, bool include_identity,
                                 const Tolerances& tol) {
  if (generators.empty())
    throw std::invalid_argument("algebra_closure: at least one generator is required");
  const int d = static_cast<int>(generators.front().rows());
  std::vector<Mat> gen = generators;
  if (include_identity) gen.push_back(Mat::Identity(d, d));
  OperatorSubspace cur = OperatorSubspace::span_of(d, gen, tol);
  for (int round = 0; round <= d * d + 1; ++round) {
    std::vector<Mat> next = cur.basis();
    for (const Mat& a : cur.basis()) next.push_back(a.adjoint());
    for (const Mat& a : cur.basis())
      for (const Mat& b : cur.basis()) next.push_back(a * b);
    OperatorSubspace grown = OperatorSubspace::span_of(d, next, tol);
    if (grown.size() == cur.size()) {
      bool ok = false;
      std::vector<Mat> herm = hermitian_rebasis(d, grown.basis(), tol, &ok);
      OperatorSubspace out(d, std::move(herm));
      if (!ok) out.add_note("hermitian rebasis failed; keeping complex basis");
      return out;
    }
    cur = grown;
  }
  throw std::runtime_error("algebra_closure: failed to stabilize within dimension bound");
}

}  // namespace noetherq
