#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "noetherq/classical.hpp"
#include "noetherq/random.hpp"

namespace helpers {

using namespace noetherq;

inline std::string fixture_path(const std::string& name) {
  return std::string(NOETHERQ_FIXTURE_DIR) + "/" + name;
}

inline bool close(const Mat& a, const Mat& b, double tol = 1e-9) {
  return (a - b).norm() <= tol * std::max(1.0, b.norm());
}

inline Mat inverse_sqrt_pd(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  Vec inv = es.eigenvalues().cwiseSqrt().cwiseInverse().template cast<Complex>();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

// sum A_k A_k† = I, so the operator-side action is unital.
inline KrausChannel random_unital_cp(int dim, int ops, Rng& rng) {
  std::vector<Mat> g(ops);
  Mat s = Mat::Zero(dim, dim);
  for (Mat& a : g) {
    a = random_gaussian(dim, dim, rng);
    s += a * a.adjoint();
  }
  Mat w = inverse_sqrt_pd(s);
  KrausChannel ch{dim, {}, Picture::heisenberg};
  for (const Mat& a : g) ch.kraus.push_back(w * a);
  return ch;
}

// sum A_k† A_k = I, the state-side normalization.
inline KrausChannel random_tp_channel(int dim, int ops, Rng& rng) {
  std::vector<Mat> g(ops);
  Mat s = Mat::Zero(dim, dim);
  for (Mat& a : g) {
    a = random_gaussian(dim, dim, rng);
    s += a.adjoint() * a;
  }
  Mat w = inverse_sqrt_pd(s);
  KrausChannel ch{dim, {}, Picture::schrodinger};
  for (const Mat& a : g) ch.kraus.push_back(a * w);
  return ch;
}

inline LindbladGenerator random_lindblad(int dim, int jumps, Rng& rng, bool with_h = true) {
  LindbladGenerator g;
  g.dim = dim;
  for (int k = 0; k < jumps; ++k) g.lindblad.push_back(random_gaussian(dim, dim, rng));
  if (with_h) g.hamiltonian = random_hermitian(dim, rng);
  return g;
}

// Compression to the top corner with the compressed-away trace weight dumped
// into the third diagonal entry. Written in plain 3x3 arithmetic so it can
// stand against the superoperator machinery as an independent oracle.
inline Mat m3_apply(const Mat& x) {
  Mat y = Mat::Zero(3, 3);
  y.topLeftCorner(2, 2) = x.topLeftCorner(2, 2);
  y(2, 2) = (x(0, 0) + x(1, 1)) / 2.0;
  return y;
}

inline Mat m3_dual_apply(const Mat& y) {
  Mat z = Mat::Zero(3, 3);
  z.topLeftCorner(2, 2) = y.topLeftCorner(2, 2);
  z(0, 0) += y(2, 2) / 2.0;
  z(1, 1) += y(2, 2) / 2.0;
  return z;
}

inline KrausChannel m3_heisenberg() {
  const double s2 = std::sqrt(0.5);
  Mat p = Mat::Zero(3, 3);
  p(0, 0) = 1;
  p(1, 1) = 1;
  Mat e31 = Mat::Zero(3, 3), e32 = Mat::Zero(3, 3);
  e31(2, 0) = s2;
  e32(2, 1) = s2;
  return KrausChannel{3, {p, e31, e32}, Picture::heisenberg};
}

inline Mat m3_observable() {
  Mat a = Mat::Zero(3, 3);
  a(0, 0) = 1;
  a(2, 2) = 0.5;
  return a;
}

inline Mat matrix_unit(int dim, int i, int j) {
  Mat e = Mat::Zero(dim, dim);
  e(i, j) = 1;
  return e;
}

inline Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace helpers
