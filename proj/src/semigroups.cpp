#include "noetherq/semigroups.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "noetherq/random.hpp"

namespace noetherq {

namespace {

double rel(double raw, double scale) { return raw / std::max(1.0, scale); }

Mat hamiltonian_or_zero(const LindbladGenerator& g) {
  if (g.hamiltonian.size() == 0) return Mat::Zero(g.dim, g.dim);
  return g.hamiltonian;
}

}  // namespace

SuperOperator lindblad_super(const LindbladGenerator& g, Picture picture, const Tolerances& tol) {
  if (g.dim < 1 || g.dim > kMaxDim)
    throw std::invalid_argument("lindblad_super: dimension outside supported range");
  const int d = g.dim;
  Mat h = hamiltonian_or_zero(g);
  if (h.rows() != d || h.cols() != d)
    throw std::invalid_argument("lindblad_super: hamiltonian dimension mismatch");
  if (!is_hermitian(h, tol))
    throw std::invalid_argument("lindblad_super: hamiltonian must be hermitian");

  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  Mat id = Mat::Identity(d, d);
  Mat m = Mat::Zero(n, n);
  for (const Mat& l : g.lindblad) {
    if (l.rows() != d || l.cols() != d)
      throw std::invalid_argument("lindblad_super: jump operator dimension mismatch");
    Mat gram = l.adjoint() * l;
    Mat diss = picture == Picture::schrodinger ? kron(l.conjugate(), l) : kron(l.transpose(), l.adjoint());
    m += diss - 0.5 * kron(id, gram) - 0.5 * kron(gram.transpose(), id);
  }
  Mat comm = Complex(0, 1) * (kron(h.transpose(), id) - kron(id, h));
  m += picture == Picture::schrodinger ? comm : Mat(-comm);

  SuperOperator s(d, std::move(m));
  s.flags().hermiticity_preserving = true;
  return s;
}

std::vector<double> SemigroupSpec::default_time_grid() { return {0.0, 0.1, 0.5, 1.0, 2.0, 10.0}; }

SemigroupSpec SemigroupSpec::from_lindblad(LindbladGenerator g, std::vector<double> grid,
                                           const Tolerances& tol) {
  SemigroupSpec sg;
  sg.schrodinger_ = lindblad_super(g, Picture::schrodinger, tol);
  sg.heisenberg_ = lindblad_super(g, Picture::heisenberg, tol);
  sg.grid_ = std::move(grid);
  sg.lindblad_ = std::move(g);
  sg.cp_ = true;
  return sg;
}

SemigroupSpec SemigroupSpec::from_channel_minus_id(const SuperOperator& channel, Picture given,
                                                   std::vector<double> grid,
                                                   const Tolerances& tol) {
  bool ok = given == Picture::schrodinger
                ? channel.flags().trace_preserving.value_or(channel.is_trace_preserving(tol))
                : channel.flags().unital.value_or(channel.is_unital(tol));
  if (!ok)
    throw std::invalid_argument("from_channel_minus_id: channel fails its picture normalization");
  const Eigen::Index n = static_cast<Eigen::Index>(channel.dim()) * channel.dim();
  SuperOperator gen(channel.dim(), Mat(channel.matrix() - Mat::Identity(n, n)));
  gen.flags().hermiticity_preserving =
      channel.flags().hermiticity_preserving.value_or(channel.is_hermiticity_preserving(tol));

  SemigroupSpec sg;
  if (given == Picture::schrodinger) {
    sg.schrodinger_ = gen;
    sg.heisenberg_ = trace_dual(gen, tol);
  } else {
    sg.heisenberg_ = gen;
    sg.schrodinger_ = trace_dual(gen, tol);
  }
  sg.grid_ = std::move(grid);
  sg.cp_ = channel.flags().completely_positive.value_or(channel.is_completely_positive(tol));
  return sg;
}

const SuperOperator& SemigroupSpec::generator(Picture p) const {
  return p == Picture::schrodinger ? schrodinger_ : heisenberg_;
}

SuperOperator evolve(const SemigroupSpec& sg, double t, Picture picture, const Tolerances& tol) {
  if (t < 0.0) throw std::invalid_argument("evolve: negative time");
  Mat m = (t * sg.generator(picture).matrix()).exp();
  SuperOperator s(sg.dim(), std::move(m));
  s.flags().hermiticity_preserving = true;
  s.flags().trace_preserving = s.is_trace_preserving(tol);
  s.flags().unital = s.is_unital(tol);
  if (sg.completely_positive()) s.flags().completely_positive = true;
  return s;
}

double growth_bound(const SemigroupSpec& sg) {
  Eigen::ComplexEigenSolver<Mat> es(sg.generator(Picture::schrodinger).matrix(), false);
  return es.eigenvalues().real().maxCoeff();
}

SuperOperator yosida_approx(const SemigroupSpec& sg, double t, double lambda, Picture picture,
                            const Tolerances& tol) {
  if (t < 0.0) throw std::invalid_argument("yosida_approx: negative time");
  if (lambda <= growth_bound(sg))
    throw std::invalid_argument("yosida_approx: lambda must exceed the growth bound");
  const Eigen::Index n = static_cast<Eigen::Index>(sg.dim()) * sg.dim();
  const Mat& g = sg.generator(picture).matrix();
  if (t * lambda == 0.0) return SuperOperator(sg.dim(), Mat::Identity(n, n));

  // (λ²t)ⁿ(λI − g)⁻ⁿ = (λt)ⁿ Bⁿ with B = λ(λI − g)⁻¹, so the series is a
  // Poisson average of powers of B. Weights are formed in log space; e^{−λt}
  // alone underflows long before the terms stop mattering.
  Mat b = Eigen::PartialPivLU<Mat>(lambda * Mat::Identity(n, n) - g)
              .solve(Mat(lambda * Mat::Identity(n, n)));
  const double lt = lambda * t;
  const Eigen::Index n_cap =
      static_cast<Eigen::Index>(lt + 40.0 * std::sqrt(lt + 1.0) + 100.0);
  Mat sum = Mat::Zero(n, n);
  Mat power = Mat::Identity(n, n);
  double mass = 0.0;
  for (Eigen::Index k = 0; k <= n_cap; ++k) {
    double logw = -lt + k * std::log(lt) - std::lgamma(static_cast<double>(k) + 1.0);
    double w = std::exp(logw);
    sum += w * power;
    mass += w;
    if (mass >= 1.0 - 0.1 * tol.eq_tol && k > static_cast<Eigen::Index>(lt)) break;
    power = power * b;
  }
  return SuperOperator(sg.dim(), std::move(sum));
}

OperatorSubspace constants_of_motion(const SemigroupSpec& sg, const Tolerances& tol) {
  const SuperOperator& gen = sg.generator(Picture::heisenberg);
  OperatorSubspace ker = kernel_subspace(gen.matrix(), sg.dim(), tol);

  Eigen::BDCSVD<Mat> svd(gen.matrix());
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  for (const Mat& b : ker.basis())
    if (gen.apply(b).norm() > 10.0 * tol.rank_tol * std::max(smax, 1.0))
      throw std::runtime_error("constants_of_motion: kernel element fails the stationarity bound");

  // Two incommensurate times pin the joint fixed space of the dual
  // evolution; eigenvalues 2πik/t of the generator can fool a single time.
  Tolerances relaxed = tol;
  relaxed.eq_tol = 100.0 * tol.eq_tol;
  OperatorSubspace f1 = fixed_point_space(evolve(sg, 1.0, Picture::heisenberg, tol), tol);
  OperatorSubspace f2 =
      fixed_point_space(evolve(sg, std::sqrt(2.0), Picture::heisenberg, tol), tol);
  OperatorSubspace joint = subspace_intersect(f1, f2, tol);
  if (!(joint.contains(ker, relaxed) && ker.contains(joint, relaxed)))
    ker.add_note("kernel disagrees with the joint fixed space of the dual evolution "
                 "at times 1 and sqrt(2)");
  return ker;
}

namespace {

ErgodicReport spectral_projection_onto_kernel(const SuperOperator& op_minus_target, int dim,
                                              const Tolerances& tol) {
  // projection onto ker(M) along ran(M); exact when 0 is semisimple for M
  const Eigen::Index n = static_cast<Eigen::Index>(dim) * dim;
  const Mat& m = op_minus_target.matrix();
  OperatorSubspace ker = kernel_subspace(m, dim, tol);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double cutoff = tol.rank_tol * (sv.size() ? sv(0) : 0.0);
  Mat w(n, n);
  Mat kb = ker.basis_matrix();
  w.leftCols(ker.size()) = kb;
  Eigen::Index col = ker.size();
  for (Eigen::Index i = 0; i < sv.size() && col < n; ++i)
    if (sv(i) > cutoff) w.col(col++) = svd.matrixU().col(i);
  if (col != n) throw std::runtime_error("spectral projection: kernel and range do not fill space");

  Mat winv = Eigen::PartialPivLU<Mat>(w).solve(Mat::Identity(n, n));
  ErgodicReport rep;
  rep.projection = SuperOperator(dim, Mat(kb * winv.topRows(ker.size())));
  rep.range = std::move(ker);
  rep.method = "spectral";
  rep.idempotency_residual =
      rel((rep.projection.matrix() * rep.projection.matrix() - rep.projection.matrix()).norm(),
          rep.projection.matrix().norm());
  return rep;
}

void finish_ergodic_flags(ErgodicReport& rep, const Tolerances& tol) {
  SuperOperator& p = rep.projection;
  p.flags().unital = p.is_unital(tol);
  p.flags().hermiticity_preserving = p.is_hermiticity_preserving(tol);
  p.flags().completely_positive = p.is_completely_positive(tol);
  p.flags().trace_preserving = p.is_trace_preserving(tol);
  if (!p.flags().unital.value()) rep.notes.push_back("projection is not unital");
  if (!p.flags().completely_positive.value())
    rep.notes.push_back("projection failed the complete positivity check");
}

}  // namespace

ErgodicReport ergodic_projection_discrete(const SuperOperator& s, const Tolerances& tol) {
  bool unital = s.flags().unital.value_or(s.is_unital(tol));
  bool cp = s.flags().completely_positive.value_or(s.is_completely_positive(tol));
  if (!unital || !cp)
    throw std::invalid_argument("ergodic_projection_discrete: needs a unital CP map");
  const Eigen::Index n = static_cast<Eigen::Index>(s.dim()) * s.dim();

  // doubling Cesàro: avg_{k+1} = (avg_k + S^{2^k} avg_k)/2 averages 2^{k+1}
  // powers; 17 doublings pass the 1e5 iteration budget
  Mat avg = Mat::Identity(n, n);
  Mat pow2 = s.matrix();
  int k = 0;
  double diff = std::numeric_limits<double>::infinity();
  for (; k < 17; ++k) {
    Mat next = 0.5 * (avg + pow2 * avg);
    diff = (next - avg).norm();
    avg = std::move(next);
    if (diff <= 0.01 * tol.eq_tol) break;
    pow2 = pow2 * pow2;
  }
  double idem = rel((avg * avg - avg).norm(), avg.norm());
  if (diff <= 0.01 * tol.eq_tol && idem <= 10.0 * tol.eq_tol) {
    ErgodicReport rep;
    rep.projection = SuperOperator(s.dim(), std::move(avg));
    rep.range = fixed_point_space(s, tol);
    rep.method = "cesaro";
    rep.doublings = k + 1;
    rep.idempotency_residual = idem;
    finish_ergodic_flags(rep, tol);
    return rep;
  }

  ErgodicReport rep = spectral_projection_onto_kernel(
      SuperOperator(s.dim(), Mat(s.matrix() - Mat::Identity(n, n))), s.dim(), tol);
  rep.doublings = k;
  rep.notes.push_back("averaging hit its iteration budget; spectral projection used");
  finish_ergodic_flags(rep, tol);
  return rep;
}

ErgodicReport ergodic_projection_continuous(const SemigroupSpec& sg, const Tolerances& tol) {
  ErgodicReport rep =
      spectral_projection_onto_kernel(sg.generator(Picture::heisenberg), sg.dim(), tol);
  finish_ergodic_flags(rep, tol);
  return rep;
}

ConditionalExpectationReport conditional_expectation_check(const SuperOperator& p,
                                                           const Tolerances& tol) {
  double idem = rel((p.matrix() * p.matrix() - p.matrix()).norm(), p.matrix().norm());
  if (idem > 100.0 * tol.eq_tol)
    throw std::invalid_argument("conditional_expectation_check: map is not idempotent");
  const int d = p.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  OperatorSubspace range = kernel_subspace(Mat(p.matrix() - Mat::Identity(n, n)), d, tol);

  ConditionalExpectationReport rep;
  for (const Mat& r : range.basis()) {
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        Mat a = Mat::Zero(d, d);
        a(i, j) = 1.0;
        Mat pa = p.apply(a);
        double res = std::max(rel((p.apply(Mat(a * r)) - pa * r).norm(), r.norm()),
                              rel((p.apply(Mat(r * a)) - r * pa).norm(), r.norm()));
        if (res > rep.max_residual) {
          rep.max_residual = res;
          rep.witness_module_element = a;
          rep.witness_range_element = r;
        }
      }
  }
  rep.passes = rep.max_residual <= 10.0 * tol.eq_tol;
  return rep;
}

NoetherVerdict noether_continuous(const SemigroupSpec& sg, const Mat& a, std::uint64_t seed,
                                  const Tolerances& tol) {
  if (a.rows() != sg.dim() || a.cols() != sg.dim())
    throw std::invalid_argument("noether_continuous: observable dimension mismatch");
  const bool cp = sg.completely_positive();
  const bool herm = is_hermitian(a, tol);
  const bool psd = herm && is_psd(a, tol);
  const double as = a.norm();
  Rng rng(seed);

  std::vector<double> grid = sg.time_grid();
  std::vector<SuperOperator> forward, backward;
  for (double t : grid) {
    forward.push_back(evolve(sg, t, Picture::schrodinger, tol));
    backward.push_back(evolve(sg, t, Picture::heisenberg, tol));
  }
  const Mat& gen = sg.generator(Picture::schrodinger).matrix();
  const SuperOperator& gen_dual = sg.generator(Picture::heisenberg);
  Mat la = SuperOperator::left_mult(a).matrix();
  Mat ra = SuperOperator::right_mult(a).matrix();

  auto max_comm_over_grid = [&](const Mat& x, bool dual_side) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Mat& m = dual_side ? backward[i].matrix() : forward[i].matrix();
      worst = std::max(worst, (x * m - m * x).norm());
    }
    return rel(worst, as);
  };
  auto dual_evolution_fix = [&](const Mat& y) {
    double worst = 0.0;
    for (const SuperOperator& b : backward) worst = std::max(worst, (b.apply(y) - y).norm());
    return rel(worst, y.norm());
  };
  auto conserved_over_grid = [&](const Mat& y) {
    double worst = 0.0;
    for (int i = 0; i < 12; ++i) {
      Mat rho = random_density(sg.dim(), rng);
      Complex base = (rho * y).trace();
      for (const SuperOperator& f : forward)
        worst = std::max(worst, std::abs((f.apply(rho) * y).trace() - base));
    }
    return rel(worst, y.norm());
  };

  NoetherVerdict v;
  auto cp_clause = [&](std::string name, double r, int group) {
    Clause c{std::move(name), cp, r <= tol.eq_tol, r, group, ""};
    if (!cp) c.note = "equivalence needs complete positivity; semigroup is only positive";
    return c;
  };

  auto add_square_group = [&](const Mat& sq, const std::string& sq_label, int group,
                              const std::string& side, const Mat& comm_forward,
                              const std::string& dual_side, const Mat& comm_dual) {
    v.clauses.push_back(cp_clause(side + "_mult_commutes_with_evolution",
                                  max_comm_over_grid(comm_forward, false), group));
    v.clauses.push_back(cp_clause(side + "_mult_commutes_with_generator",
                                  rel((comm_forward * gen - gen * comm_forward).norm(), as), group));
    v.clauses.push_back(cp_clause(dual_side + "_mult_commutes_with_dual_evolution",
                                  max_comm_over_grid(comm_dual, true), group));
    {
      double r = std::max(rel(gen_dual.apply(a).norm(), as),
                          rel(gen_dual.apply(sq).norm(), sq.norm()));
      v.clauses.push_back(Clause{"observable_and_" + sq_label + "_in_dual_generator_kernel", true,
                                 r <= tol.eq_tol, r, group, ""});
    }
    {
      double r = std::max(dual_evolution_fix(a), dual_evolution_fix(sq));
      v.clauses.push_back(Clause{"observable_and_" + sq_label + "_fixed_by_dual_evolution", true,
                                 r <= tol.eq_tol, r, group, ""});
    }
    {
      double r = std::max(conserved_over_grid(a), conserved_over_grid(sq));
      v.clauses.push_back(Clause{"observable_and_" + sq_label + "_conserved_over_states", true,
                                 r <= tol.eq_tol, r, group, "sampled over 12 random states"});
    }
  };

  if (herm) {
    Mat sq = a * a;
    add_square_group(sq, "square", 1, "left", la, "right", ra);
    // the mirrored commutators collapse onto the same group for hermitian a
    v.clauses.push_back(cp_clause("right_mult_commutes_with_evolution",
                                  max_comm_over_grid(ra, false), 1));
    {
      double worst = 0.0;
      for (int i = 0; i < 12; ++i) {
        Mat rho = random_density(sg.dim(), rng);
        double e0 = (rho * a).trace().real();
        double m0 = (rho * sq).trace().real();
        double s0 = std::sqrt(std::max(0.0, m0 - e0 * e0));
        for (const SuperOperator& f : forward) {
          Mat out = f.apply(rho);
          double e1 = (out * a).trace().real();
          double m1 = (out * sq).trace().real();
          double s1 = std::sqrt(std::max(0.0, m1 - e1 * e1));
          worst = std::max({worst, std::abs(e1 - e0), std::abs(s1 - s0)});
        }
      }
      double r = rel(worst, as);
      v.clauses.push_back(Clause{"expectation_and_deviation_constant", true, r <= tol.eq_tol, r, 1,
                                 "sampled over 12 random states"});
    }
    double ka = rel(gen_dual.apply(a).norm(), as);
    double ks = rel(gen_dual.apply(sq).norm(), sq.norm());
    v.clauses.push_back(Clause{"observable_in_dual_generator_kernel", true, ka <= tol.eq_tol, ka, 0, ""});
    v.clauses.push_back(Clause{"square_in_dual_generator_kernel", true, ks <= tol.eq_tol, ks, 0, ""});
  } else {
    add_square_group(Mat(a.adjoint() * a), "absolute_square", 1, "left", la, "right", ra);
    add_square_group(Mat(a * a.adjoint()), "conjugate_square", 2, "right", ra, "left", la);
  }

  if (psd) {
    // compression clauses cover the stochastic case, no CP needed
    Mat root = psd_sqrt(a, tol);
    Mat mr = measurement_superop(root).matrix();
    double scale = std::max(1.0, root.squaredNorm());
    {
      double worst = 0.0;
      for (const SuperOperator& f : forward)
        worst = std::max(worst, (mr * f.matrix() - f.matrix() * mr).norm());
      double r = worst / scale;
      v.clauses.push_back(
          Clause{"root_compression_commutes_with_evolution", true, r <= tol.eq_tol, r, 1, ""});
    }
    {
      double r = (mr * gen - gen * mr).norm() / scale;
      v.clauses.push_back(
          Clause{"root_compression_commutes_with_generator", true, r <= tol.eq_tol, r, 1, ""});
    }
  }
  v.consistent = clauses_consistent(v.clauses);
  return v;
}

ObservableStats quantum_stats(const Mat& a, const Mat& rho, const Tolerances& tol) {
  if (!is_hermitian(a, tol)) throw std::invalid_argument("quantum_stats: observable not hermitian");
  if (!is_psd(rho, tol) || std::abs(rho.trace().real() - 1.0) > tol.eq_tol * 10.0 ||
      std::abs(rho.trace().imag()) > tol.eq_tol)
    throw std::invalid_argument("quantum_stats: state must be PSD with unit trace");
  ObservableStats st;
  st.expectation = (rho * a).trace().real();
  st.variance = (rho * a * a).trace().real() - st.expectation * st.expectation;
  st.std_dev = std::sqrt(std::max(0.0, st.variance));
  return st;
}

}  // namespace noetherq
