#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "noetherq/semigroups.hpp"

using namespace noetherq;
using helpers::close;
using helpers::matrix_unit;
using helpers::pauli_x;
using helpers::pauli_z;

namespace {

LindbladGenerator dephasing() {
  LindbladGenerator g;
  g.dim = 2;
  g.lindblad = {pauli_z()};
  return g;
}

SuperOperator pinching2() {
  Mat e00 = matrix_unit(2, 0, 0), e11 = matrix_unit(2, 1, 1);
  return channel_super(build_luders({e00, e11}));
}

bool group_uniform(const NoetherVerdict& v, int group, bool value) {
  int seen = 0;
  for (const Clause& c : v.clauses) {
    if (c.group != group || !c.applicable) continue;
    ++seen;
    if (c.holds != value) return false;
  }
  return seen > 0;
}

}  // namespace

TEST_CASE("dephasing generator acts as expected on coherences") {
  SuperOperator g = lindblad_super(dephasing(), Picture::schrodinger);
  Mat e01 = matrix_unit(2, 0, 1);
  CHECK(close(g.apply(e01), Mat(-2.0 * e01), 1e-13));
  CHECK(close(g.apply(matrix_unit(2, 0, 0)), Mat(Mat::Zero(2, 2)), 1e-13));

  // hermitian jump operator: the dissipator is its own trace dual
  SuperOperator gh = lindblad_super(dephasing(), Picture::heisenberg);
  CHECK(close(gh.matrix(), g.matrix(), 1e-13));

  LindbladGenerator ham;
  ham.dim = 2;
  ham.hamiltonian = pauli_z();
  SuperOperator hs = lindblad_super(ham, Picture::schrodinger);
  SuperOperator hh = lindblad_super(ham, Picture::heisenberg);
  CHECK(close(hs.apply(e01), Mat(Complex(0, -2) * e01), 1e-13));
  CHECK(close(hh.apply(e01), Mat(Complex(0, 2) * e01), 1e-13));

  LindbladGenerator bad = ham;
  bad.hamiltonian = matrix_unit(2, 0, 1);
  CHECK_THROWS_AS(lindblad_super(bad, Picture::schrodinger), std::invalid_argument);
}

TEST_CASE("evolution obeys the semigroup law and the known decay rate") {
  Rng rng(41);
  SemigroupSpec sg = SemigroupSpec::from_lindblad(helpers::random_lindblad(3, 2, rng));
  SuperOperator a = evolve(sg, 0.3);
  SuperOperator b = evolve(sg, 0.9);
  SuperOperator c = evolve(sg, 1.2);
  CHECK(close(c.matrix(), Mat(a.matrix() * b.matrix()), 1e-9));
  CHECK(close(evolve(sg, 0).matrix(), Mat(Mat::Identity(9, 9)), 1e-12));
  CHECK_THROWS_AS(evolve(sg, -0.5), std::invalid_argument);

  SemigroupSpec dp = SemigroupSpec::from_lindblad(dephasing());
  Mat e01 = matrix_unit(2, 0, 1);
  CHECK(close(evolve(dp, 0.5).apply(e01), Mat(std::exp(-1.0) * e01), 1e-11));
}

TEST_CASE("channel-minus-identity semigroup freezes the channel's fixed space") {
  SuperOperator phi = channel_super(helpers::m3_heisenberg());
  SuperOperator psi = trace_dual(phi);
  SemigroupSpec sg = SemigroupSpec::from_channel_minus_id(psi, Picture::schrodinger);

  OperatorSubspace cons = constants_of_motion(sg);
  CHECK(cons.size() == 4);
  CHECK(cons.same_space(fixed_point_space(phi)));

  Mat a = helpers::m3_observable();
  CHECK(cons.contains(a));
  CHECK_FALSE(cons.contains(Mat(a * a)));

  SuperOperator half{2, Mat(0.5 * Mat::Identity(4, 4))};
  CHECK_THROWS_AS(SemigroupSpec::from_channel_minus_id(half, Picture::schrodinger),
                  std::invalid_argument);
}

TEST_CASE("growth bound of a normalized generator vanishes") {
  Rng rng(42);
  SemigroupSpec sg = SemigroupSpec::from_lindblad(helpers::random_lindblad(3, 3, rng));
  CHECK(std::abs(growth_bound(sg)) <= 1e-8);
  CHECK(std::abs(growth_bound(SemigroupSpec::from_lindblad(dephasing()))) <= 1e-12);
}

TEST_CASE("yosida approximants converge and match the closed form") {
  SemigroupSpec sg = SemigroupSpec::from_lindblad(dephasing());
  const double t = 1.0;
  Mat target = evolve(sg, t).matrix();

  double prev = 1e100;
  for (double lambda : {10.0, 100.0, 1000.0}) {
    double err = (yosida_approx(sg, t, lambda).matrix() - target).norm();
    CHECK(err < prev);
    prev = err;
  }

  // e^{-lt} sum (l^2 t)^n R^n / n! equals exp(t l (l R - I)) exactly
  const double lambda = 50.0;
  Mat g = sg.generator(Picture::schrodinger).matrix();
  Mat r = (lambda * Mat::Identity(4, 4) - g).partialPivLu().solve(Mat::Identity(4, 4));
  Mat closed = Mat(t * lambda * (lambda * r - Mat::Identity(4, 4))).exp();
  CHECK(close(yosida_approx(sg, t, lambda).matrix(), closed, 1e-9));

  CHECK_THROWS_AS(yosida_approx(sg, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("constants of motion of dephasing are the diagonals") {
  SemigroupSpec sg = SemigroupSpec::from_lindblad(dephasing());
  OperatorSubspace cons = constants_of_motion(sg);
  CHECK(cons.size() == 2);
  CHECK(cons.contains(pauli_z()));
  CHECK_FALSE(cons.contains(pauli_x()));
  CHECK(cons.basis_is_hermitian());
}

TEST_CASE("discrete averaging of idempotent and peripheral maps") {
  // fully depolarizing: already idempotent, the average is the map itself
  Mat sy(2, 2);
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  KrausChannel dep{2,
                   {Mat(Mat::Identity(2, 2) / 2.0), Mat(pauli_x() / 2.0), Mat(sy / 2.0),
                    Mat(pauli_z() / 2.0)},
                   Picture::schrodinger};
  SuperOperator s = channel_super(dep);
  ErgodicReport rep = ergodic_projection_discrete(s);
  CHECK(close(rep.projection.matrix(), s.matrix(), 1e-9));
  CHECK(rep.range.size() == 1);
  CHECK(rep.idempotency_residual <= 1e-9);
  CHECK(close(rep.projection.apply(Mat(Mat::Identity(2, 2))), Mat(Mat::Identity(2, 2)), 1e-10));

  // conjugation by distinct phases: peripheral spectrum forces the spectral
  // route, and the limit is the diagonal pinching
  Mat u = Mat::Zero(3, 3);
  u(0, 0) = 1;
  u(1, 1) = std::exp(Complex(0, 0.7));
  u(2, 2) = std::exp(Complex(0, 2.1));
  SuperOperator conj = channel_super(KrausChannel{3, {u}, Picture::heisenberg});
  ErgodicReport rp = ergodic_projection_discrete(conj);
  CHECK(rp.range.size() == 3);
  Mat pinch = Mat::Zero(9, 9);
  for (int i = 0; i < 3; ++i) pinch(i * 3 + i, i * 3 + i) = 1;
  CHECK(close(rp.projection.matrix(), pinch, 1e-9));

  CHECK_THROWS_AS(ergodic_projection_discrete(transpose_superop(2)), std::invalid_argument);
}

TEST_CASE("continuous averaging of dephasing lands on the pinching") {
  SemigroupSpec sg = SemigroupSpec::from_lindblad(dephasing());
  ErgodicReport rep = ergodic_projection_continuous(sg);
  CHECK(rep.method == "spectral");
  CHECK(close(rep.projection.matrix(), pinching2().matrix(), 1e-9));
  CHECK(rep.range.size() == 2);
  CHECK(rep.idempotency_residual <= 1e-9);

  ConditionalExpectationReport ce = conditional_expectation_check(rep.projection);
  CHECK(ce.passes);
  CHECK(ce.max_residual <= 1e-8);
}

TEST_CASE("averaging the corner compression exposes the non-algebra range") {
  SuperOperator phi = channel_super(helpers::m3_heisenberg());
  ErgodicReport rep = ergodic_projection_discrete(phi);
  CHECK(rep.range.size() == 4);
  CHECK(rep.range.same_space(fixed_point_space(phi)));
  CHECK(rep.idempotency_residual <= 1e-9);

  ConditionalExpectationReport ce = conditional_expectation_check(rep.projection);
  CHECK_FALSE(ce.passes);
  CHECK(ce.max_residual > 0.1);
  CHECK(ce.witness_module_element.rows() == 3);
  CHECK(ce.witness_range_element.rows() == 3);

  // a non-idempotent map is not a conditional expectation candidate at all
  SemigroupSpec dp = SemigroupSpec::from_lindblad(dephasing());
  CHECK_THROWS_AS(conditional_expectation_check(evolve(dp, 1.0)), std::invalid_argument);
}

TEST_CASE("continuous conservation clauses") {
  SemigroupSpec sg = SemigroupSpec::from_lindblad(dephasing());

  NoetherVerdict keep = noether_continuous(sg, pauli_z(), 51);
  CHECK(keep.consistent);
  CHECK(group_uniform(keep, 1, true));

  NoetherVerdict lost = noether_continuous(sg, pauli_x(), 51);
  CHECK(lost.consistent);
  CHECK(group_uniform(lost, 1, false));

  // PSD observable gains the root-compression clauses
  Mat a(2, 2);
  a << 2, 0, 0, 1;
  NoetherVerdict psd = noether_continuous(sg, a, 51);
  CHECK(psd.consistent);
  CHECK(group_uniform(psd, 1, true));
  bool saw_root = false;
  for (const Clause& c : psd.clauses)
    if (c.name.find("root_compression") != std::string::npos) saw_root = true;
  CHECK(saw_root);

  // non-hermitian observable splits into the two square groups
  NoetherVerdict nh = noether_continuous(sg, matrix_unit(2, 0, 1), 51);
  CHECK(nh.consistent);
  CHECK(group_uniform(nh, 1, false));
  CHECK(group_uniform(nh, 2, false));

  Mat d(2, 2);
  d << 1, 0, 0, Complex(0, 1);
  NoetherVerdict dkeep = noether_continuous(sg, d, 51);
  CHECK(dkeep.consistent);
  CHECK(group_uniform(dkeep, 1, true));
  CHECK(group_uniform(dkeep, 2, true));
}

TEST_CASE("moments of an observable in a state") {
  Mat rho(2, 2);
  rho << 0.75, 0, 0, 0.25;
  ObservableStats st = quantum_stats(pauli_z(), rho);
  CHECK(st.expectation == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(st.variance == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(st.std_dev == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));

  CHECK_THROWS_AS(quantum_stats(matrix_unit(2, 0, 1), rho), std::invalid_argument);
  CHECK_THROWS_AS(quantum_stats(pauli_z(), Mat(2.0 * rho)), std::invalid_argument);
}

TEST_CASE("time grids are carried and validated") {
  SemigroupSpec sg = SemigroupSpec::from_lindblad(dephasing(), {0.0, 1.0, 2.0});
  CHECK(sg.time_grid() == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(SemigroupSpec::default_time_grid().front() == 0.0);
  CHECK(sg.lindblad_form().has_value());
  CHECK(sg.completely_positive());
}
