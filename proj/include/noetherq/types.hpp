#pragma once

#include <Eigen/Dense>
#include <complex>

namespace noetherq {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Numerical slack shared across the library.
//   rank_tol: relative singular-value cutoff for kernel and rank decisions
//   eq_tol:   relative residual bound when comparing operators
//   psd_tol:  absolute slack on the minimum eigenvalue in PSD checks
struct Tolerances {
  double rank_tol = 1e-10;
  double eq_tol = 1e-9;
  double psd_tol = 1e-9;
};

// Operator dimensions are capped; everything here is dense and O(d^6) in the
// worst case, so the library refuses inputs it cannot handle responsibly.
inline constexpr int kMaxDim = 32;

}  // namespace noetherq
