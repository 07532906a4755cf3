#include "noetherq/random.hpp"

#include <Eigen/QR>

namespace noetherq {

Mat random_gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = Complex(n(rng), n(rng));
  return g;
}

Mat random_hermitian(int dim, Rng& rng) {
  Mat g = random_gaussian(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

Mat random_psd_unit(int dim, Rng& rng) {
  Mat g = random_gaussian(dim, dim, rng);
  Mat p = g * g.adjoint();
  return p / p.norm();
}

Mat random_density(int dim, Rng& rng) {
  Mat g = random_gaussian(dim, dim, rng);
  Mat p = g * g.adjoint();
  return p / p.trace();
}

Mat random_unitary(int dim, Rng& rng) {
  Mat g = random_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  // fix the phase of each column so the distribution is Haar
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

}  // namespace noetherq
