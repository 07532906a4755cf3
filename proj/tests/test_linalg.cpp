#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "noetherq/linalg.hpp"

using namespace noetherq;
using helpers::close;
using helpers::matrix_unit;
using helpers::pauli_x;
using helpers::pauli_z;

TEST_CASE("vec stacks columns") {
  Rng rng(1);
  Mat x = random_gaussian(3, 3, rng);
  Vec v = vec(x);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) CHECK(v(j * 3 + i) == x(i, j));
  CHECK(close(unvec(v, 3), x, 1e-15));
}

TEST_CASE("kron carries two-sided multiplication onto vec") {
  Rng rng(2);
  Mat a = random_gaussian(3, 3, rng);
  Mat b = random_gaussian(3, 3, rng);
  Mat x = random_gaussian(3, 3, rng);
  Vec lhs = vec(Mat(a * x * b));
  Vec rhs = kron(b.transpose(), a) * vec(x);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("superoperator factories agree with direct actions") {
  Rng rng(3);
  Mat a = random_gaussian(3, 3, rng);
  Mat b = random_gaussian(3, 3, rng);
  Mat x = random_gaussian(3, 3, rng);

  CHECK(close(SuperOperator::identity(3).apply(x), x, 1e-15));
  CHECK(close(SuperOperator::left_mult(a).apply(x), Mat(a * x), 1e-12));
  CHECK(close(SuperOperator::right_mult(b).apply(x), Mat(x * b), 1e-12));
  CHECK(close(SuperOperator::sandwich(a, b).apply(x), Mat(a * x * b), 1e-12));

  SuperOperator f = SuperOperator::from_action(3, [&](const Mat& y) { return Mat(a * y * b); });
  CHECK(close(f.matrix(), SuperOperator::sandwich(a, b).matrix(), 1e-12));
}

TEST_CASE("compose multiplies matrices in application order") {
  Rng rng(4);
  SuperOperator s = SuperOperator::left_mult(random_gaussian(2, 2, rng));
  SuperOperator t = SuperOperator::right_mult(random_gaussian(2, 2, rng));
  Mat x = random_gaussian(2, 2, rng);
  CHECK(close(s.compose(t).apply(x), s.apply(t.apply(x)), 1e-12));
  CHECK(close(s.compose(t).matrix(), Mat(s.matrix() * t.matrix()), 1e-12));
}

TEST_CASE("hermitian-part minimum eigenvalue") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = -2;
  CHECK(min_eigenvalue_hermitian_part(a) == doctest::Approx(-2).epsilon(1e-12));
}

TEST_CASE("psd_sqrt squares back and clamps slightly negative spectra") {
  Rng rng(5);
  Mat a = random_psd_unit(3, rng);
  Mat r = psd_sqrt(a);
  CHECK(close(Mat(r * r), a, 1e-10));

  Mat dip = Mat::Identity(2, 2);
  dip(1, 1) = -1e-10;  // inside psd_tol, clamps to zero
  Mat rd = psd_sqrt(dip);
  CHECK(rd(1, 1).real() == doctest::Approx(0).epsilon(1e-12));

  Mat bad = Mat::Identity(2, 2);
  bad(1, 1) = -1;
  CHECK_THROWS_AS(psd_sqrt(bad), std::invalid_argument);
}

TEST_CASE("operator predicates") {
  CHECK(is_hermitian(pauli_z()));
  CHECK_FALSE(is_hermitian(matrix_unit(2, 0, 1)));
  CHECK(is_psd(Mat(Mat::Identity(2, 2))));
  CHECK_FALSE(is_psd(pauli_z()));
  CHECK(is_projection(matrix_unit(2, 0, 0)));
  CHECK_FALSE(is_projection(Mat(0.5 * Mat::Identity(2, 2))));
  CHECK(is_unitary(pauli_x()));
  CHECK_FALSE(is_unitary(Mat(2.0 * Mat::Identity(2, 2))));
}

TEST_CASE("structural flags of superoperators") {
  SuperOperator id = SuperOperator::identity(2);
  CHECK(id.is_trace_preserving());
  CHECK(id.is_unital());
  CHECK(id.is_hermiticity_preserving());
  CHECK(id.is_completely_positive());

  // one-sided multiplication destroys hermiticity preservation
  CHECK_FALSE(SuperOperator::left_mult(pauli_x()).is_hermiticity_preserving());
}

TEST_CASE("trace dual realizes the pairing and swaps the normalizations") {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    // hermiticity-preserving but otherwise unstructured map
    Mat a = random_hermitian(3, rng);
    Mat b = random_hermitian(3, rng);
    SuperOperator s = SuperOperator::sandwich(a, a) + SuperOperator::sandwich(b, b);
    SuperOperator sd = trace_dual(s);
    Mat x = random_gaussian(3, 3, rng);
    Mat y = random_gaussian(3, 3, rng);
    Complex lhs = (sd.apply(y) * x).trace();
    Complex rhs = (y * s.apply(x)).trace();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }

  SuperOperator tp = SuperOperator::sandwich(pauli_x(), Mat(pauli_x().adjoint()));
  CHECK(tp.is_trace_preserving());
  CHECK(trace_dual(tp).is_trace_preserving());
  CHECK(trace_dual(tp).is_unital());

  CHECK_THROWS_AS(trace_dual(SuperOperator::left_mult(pauli_x())), std::invalid_argument);
}

TEST_CASE("subspace span, projection, and intersection") {
  Mat i2 = Mat::Identity(2, 2);
  OperatorSubspace xz = OperatorSubspace::span_of(2, {i2, pauli_x(), Mat(2.0 * pauli_x())});
  CHECK(xz.size() == 2);  // duplicate direction dropped
  CHECK(xz.contains(Mat(i2 + 3.0 * pauli_x())));
  CHECK_FALSE(xz.contains(pauli_z()));
  CHECK(xz.residual(pauli_z()) == doctest::Approx(pauli_z().norm()).epsilon(1e-12));

  OperatorSubspace zi = OperatorSubspace::span_of(2, {i2, pauli_z()});
  OperatorSubspace meet = subspace_intersect(xz, zi);
  CHECK(meet.size() == 1);
  CHECK(meet.contains(i2));
}

TEST_CASE("kernel of pinching minus identity is the diagonal algebra") {
  Mat e00 = matrix_unit(2, 0, 0), e11 = matrix_unit(2, 1, 1);
  SuperOperator pinch = SuperOperator::sandwich(e00, e00) + SuperOperator::sandwich(e11, e11);
  Mat m = pinch.matrix() - Mat::Identity(4, 4);
  OperatorSubspace k = kernel_subspace(m, 2);
  CHECK(k.size() == 2);
  CHECK(k.contains(e00));
  CHECK(k.contains(e11));
  CHECK_FALSE(k.contains(pauli_x()));
  CHECK(k.basis_is_hermitian());
}

TEST_CASE("algebra closure dimensions") {
  Mat i2 = Mat::Identity(2, 2);
  CHECK(algebra_closure({i2}, false).size() == 1);

  Mat d12(2, 2);
  d12 << 1, 0, 0, 2;
  CHECK(algebra_closure({d12}, true).size() == 2);

  // a nilpotent generates everything in dimension two
  CHECK(algebra_closure({matrix_unit(2, 0, 1)}, true).size() == 4);

  // corner embedding with a scalar tail: M2 plus one extra diagonal line
  std::vector<Mat> gens;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Mat g = Mat::Zero(3, 3);
      g(i, j) = 1;
      if (i == j) g(2, 2) = 0.5;
      gens.push_back(g);
    }
  CHECK(algebra_closure(gens, true).size() == 5);

  CHECK_THROWS_AS(algebra_closure({}, true), std::invalid_argument);
}

TEST_CASE("span rejects dimension mismatches") {
  CHECK_THROWS_AS(OperatorSubspace::span_of(2, {Mat::Identity(3, 3)}), std::invalid_argument);
}
