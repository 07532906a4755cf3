#include "noetherq/fixed_structure.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "noetherq/random.hpp"

namespace noetherq {

namespace {

double rel(double raw, double scale) { return raw / std::max(1.0, scale); }

void require_unital_cp(const SuperOperator& s, const Tolerances& tol, const char* who) {
  bool unital = s.flags().unital.value_or(s.is_unital(tol));
  bool cp = s.flags().completely_positive.value_or(s.is_completely_positive(tol));
  if (!unital || !cp)
    throw std::invalid_argument(std::string(who) + ": needs a unital completely positive map");
}

void require_trace_preserving(const SuperOperator& s, const Tolerances& tol, const char* who) {
  if (!s.flags().trace_preserving.value_or(s.is_trace_preserving(tol)))
    throw std::invalid_argument(std::string(who) + ": needs a trace-preserving map");
}

double comm_norm(const Mat& p, const Mat& q) { return (p * q - q * p).norm(); }

}  // namespace

OperatorSubspace fixed_point_space(const SuperOperator& s, const Tolerances& tol) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.dim()) * s.dim();
  return kernel_subspace(Mat(s.matrix() - Mat::Identity(n, n)), s.dim(), tol);
}

OperatorSubspace multiplicative_domain(const SuperOperator& s, const Tolerances& tol) {
  require_unital_cp(s, tol, "multiplicative_domain");
  const int d = s.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  const Mat& m = s.matrix();
  Mat id = Mat::Identity(d, d);

  // x is in the domain iff S(bx) = S(b)S(x) and S(xb) = S(x)S(b) for every
  // basis element b; each condition is linear in x.
  Mat stacked(2 * n * n, n);
  Eigen::Index row = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      Mat b = Mat::Zero(d, d);
      b(i, j) = 1.0;
      Mat sb = s.apply(b);
      stacked.middleRows(row, n) = m * kron(id, b) - kron(id, sb) * m;
      row += n;
      stacked.middleRows(row, n) = m * kron(b.transpose(), id) - kron(sb.transpose(), id) * m;
      row += n;
    }
  return kernel_subspace(stacked, d, tol);
}

OperatorSubspace bimodule_domain(const SuperOperator& s, const Tolerances& tol) {
  const int d = s.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(d) * d;
  const Mat& m = s.matrix();
  Mat id = Mat::Identity(d, d);

  // S(xb) = x S(b) and S(bx) = S(b) x for every b, linear in x.
  Mat stacked(2 * n * n, n);
  Eigen::Index row = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      Mat b = Mat::Zero(d, d);
      b(i, j) = 1.0;
      Mat sb = s.apply(b);
      stacked.middleRows(row, n) = m * kron(b.transpose(), id) - kron(sb.transpose(), id);
      row += n;
      stacked.middleRows(row, n) = m * kron(id, b) - kron(id, sb);
      row += n;
    }
  return kernel_subspace(stacked, d, tol);
}

FixedStructureReport constants_scale(const SuperOperator& s, std::uint64_t seed,
                                     const Tolerances& tol) {
  require_unital_cp(s, tol, "constants_scale");
  FixedStructureReport rep;
  rep.fix = fixed_point_space(s, tol);
  rep.mult_domain = multiplicative_domain(s, tol);
  rep.bimodule = bimodule_domain(s, tol);
  rep.constants2 = subspace_intersect(rep.fix, rep.mult_domain, tol);

  Tolerances closure_tol = tol;
  closure_tol.eq_tol = 10.0 * tol.eq_tol;
  rep.fix_is_algebra = true;
  for (const Mat& a : rep.fix.basis()) {
    for (const Mat& b : rep.fix.basis()) {
      if (!rep.fix.contains(Mat(a * b), closure_tol)) {
        rep.fix_is_algebra = false;
        break;
      }
    }
    if (!rep.fix_is_algebra) break;
  }

  if (!rep.fix_is_algebra) {
    // hermitian candidates: basis elements themselves plus seeded random
    // real combinations, best square-escape kept
    std::vector<Mat> cands;
    for (const Mat& b : rep.fix.basis())
      cands.push_back(is_hermitian(b, tol) ? b : Mat(0.5 * (b + b.adjoint())));
    Rng rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int t = 0; t < 64; ++t) {
      Mat c = Mat::Zero(s.dim(), s.dim());
      for (const Mat& b : cands) c += n01(rng) * b;
      if (c.norm() > 1e-12) cands.push_back(Mat(c / c.norm()));
    }
    SquareWitness best;
    best.square_residual = -1.0;
    for (const Mat& c : cands) {
      if (c.norm() < 1e-12) continue;
      double r = rep.fix.residual(Mat(c * c)) / std::max(1.0, c.squaredNorm());
      if (r > best.square_residual) {
        best.square_residual = r;
        best.element = c;
      }
    }
    rep.witness = best;
  }
  return rep;
}

bool clauses_consistent(const std::vector<Clause>& clauses) {
  std::map<int, std::pair<bool, bool>> seen;  // group -> (any, value)
  for (const Clause& c : clauses) {
    if (c.group <= 0 || !c.applicable) continue;
    auto it = seen.find(c.group);
    if (it == seen.end()) {
      seen[c.group] = {true, c.holds};
    } else if (it->second.second != c.holds) {
      return false;
    }
  }
  return true;
}

NoetherVerdict propagation_check(const SuperOperator& s, const Mat& x, const Tolerances& tol) {
  require_unital_cp(s, tol, "propagation_check");
  NoetherVerdict v;
  const double xs = x.norm();

  auto fix_res = [&](const Mat& y) { return rel((s.apply(y) - y).norm(), y.norm()); };

  {
    Clause c{"trio_fixed", true, false, 0.0, 1, ""};
    c.residual = std::max({fix_res(x), fix_res(Mat(x.adjoint() * x)), fix_res(Mat(x * x.adjoint()))});
    c.holds = c.residual <= tol.eq_tol;
    v.clauses.push_back(c);
  }
  {
    Clause c{"fixed_with_vanishing_schwarz_defects", true, false, 0.0, 1, ""};
    double defects = std::max(rel(schwarz_defect(s, x, tol).norm(), xs * xs),
                              rel(schwarz_defect(s, Mat(x.adjoint()), tol).norm(), xs * xs));
    c.residual = std::max(fix_res(x), defects);
    c.holds = c.residual <= tol.eq_tol;
    v.clauses.push_back(c);
  }
  {
    Clause c{"generated_algebra_fixed", true, false, 0.0, 1, ""};
    OperatorSubspace alg = algebra_closure({x}, true, tol);
    double worst = 0.0;
    for (const Mat& b : alg.basis()) worst = std::max(worst, fix_res(b));
    c.residual = worst;
    c.holds = worst <= tol.eq_tol;
    c.note = "algebra dimension " + std::to_string(alg.size());
    v.clauses.push_back(c);
  }
  if ((x.adjoint() * x - x * x.adjoint()).norm() <= tol.eq_tol * std::max(1.0, xs * xs)) {
    Clause c{"normal_pair_fixed", true, false, 0.0, 1, "x is normal"};
    c.residual = std::max(fix_res(x), fix_res(Mat(x.adjoint() * x)));
    c.holds = c.residual <= tol.eq_tol;
    v.clauses.push_back(c);
  }
  v.consistent = clauses_consistent(v.clauses);
  return v;
}

SuperOperator measurement_superop(const Mat& b) {
  if (b.rows() != b.cols()) throw std::invalid_argument("measurement_superop: matrix must be square");
  SuperOperator s = SuperOperator::sandwich(b.adjoint(), b);
  s.flags().completely_positive = true;
  s.flags().hermiticity_preserving = true;
  return s;
}

namespace {

// conservation of tr(rho y) under one application of psi, over sampled states
double conservation_residual(const SuperOperator& psi, const Mat& y, Rng& rng, int n_states) {
  double worst = 0.0;
  for (int i = 0; i < n_states; ++i) {
    Mat rho = random_density(psi.dim(), rng);
    worst = std::max(worst, std::abs((psi.apply(rho) * y).trace() - (rho * y).trace()));
  }
  return rel(worst, y.norm());
}

}  // namespace

NoetherVerdict noether_discrete(const SuperOperator& psi, const Mat& a, std::uint64_t seed,
                                const Tolerances& tol) {
  require_trace_preserving(psi, tol, "noether_discrete");
  if (a.rows() != psi.dim() || a.cols() != psi.dim())
    throw std::invalid_argument("noether_discrete: observable dimension mismatch");
  const bool cp = psi.flags().completely_positive.value_or(psi.is_completely_positive(tol));
  const bool herm = is_hermitian(a, tol);
  SuperOperator dual = trace_dual(psi, tol);
  const Mat& m = psi.matrix();
  const Mat& md = dual.matrix();
  Mat la = SuperOperator::left_mult(a).matrix();
  Mat ra = SuperOperator::right_mult(a).matrix();
  Mat abs_sq = a.adjoint() * a;
  Mat conj_sq = a * a.adjoint();
  const double as = a.norm();
  Rng rng(seed);

  NoetherVerdict v;
  auto comm_clause = [&](std::string name, const Mat& p, const Mat& q, int group) {
    Clause c{std::move(name), true, false, rel(comm_norm(p, q), as), group, ""};
    if (!cp) {
      c.applicable = false;
      c.note = "equivalence needs complete positivity; map is only positive";
    }
    c.holds = c.residual <= tol.eq_tol;
    return c;
  };
  auto dual_fix_clause = [&](std::string name, const Mat& sq, int group) {
    double r = std::max(rel((dual.apply(a) - a).norm(), as),
                        rel((dual.apply(sq) - sq).norm(), sq.norm()));
    Clause c{std::move(name), true, r <= tol.eq_tol, r, group, ""};
    return c;
  };
  auto conserved_clause = [&](std::string name, const Mat& sq, int group) {
    double r = std::max(conservation_residual(psi, a, rng, 24),
                        conservation_residual(psi, sq, rng, 24));
    Clause c{std::move(name), true, r <= tol.eq_tol, r, group, "sampled over 24 random states"};
    return c;
  };

  if (herm) {
    Mat sq = a * a;
    v.clauses.push_back(comm_clause("left_mult_commutes", la, m, 1));
    v.clauses.push_back(comm_clause("right_mult_commutes", ra, m, 1));
    v.clauses.push_back(comm_clause("dual_commutes_left_mult", la, md, 1));
    v.clauses.push_back(comm_clause("dual_commutes_right_mult", ra, md, 1));
    v.clauses.push_back(conserved_clause("conserved_with_square", sq, 1));
    v.clauses.push_back(dual_fix_clause("dual_fixes_observable_and_square", sq, 1));
    {
      // expectation and standard deviation of a, compared before and after
      double worst = 0.0;
      for (int i = 0; i < 24; ++i) {
        Mat rho = random_density(psi.dim(), rng);
        Mat out = psi.apply(rho);
        double e0 = (rho * a).trace().real(), e1 = (out * a).trace().real();
        double m0 = (rho * sq).trace().real(), m1 = (out * sq).trace().real();
        double s0 = std::sqrt(std::max(0.0, m0 - e0 * e0));
        double s1 = std::sqrt(std::max(0.0, m1 - e1 * e1));
        worst = std::max({worst, std::abs(e1 - e0), std::abs(s1 - s0)});
      }
      double r = rel(worst, as);
      v.clauses.push_back(
          Clause{"expectation_and_deviation_constant", true, r <= tol.eq_tol, r, 1,
                 "sampled over 24 random states"});
    }
    // informational split of the conjunction
    double ra_ = rel((dual.apply(a) - a).norm(), as);
    double rs_ = rel((dual.apply(sq) - sq).norm(), sq.norm());
    v.clauses.push_back(Clause{"observable_fixed_by_dual", true, ra_ <= tol.eq_tol, ra_, 0, ""});
    v.clauses.push_back(Clause{"square_fixed_by_dual", true, rs_ <= tol.eq_tol, rs_, 0, ""});
  } else {
    v.clauses.push_back(comm_clause("left_mult_commutes", la, m, 1));
    v.clauses.push_back(conserved_clause("conserved_with_absolute_square", abs_sq, 1));
    v.clauses.push_back(comm_clause("dual_commutes_right_mult", ra, md, 1));
    v.clauses.push_back(dual_fix_clause("dual_fixes_observable_and_absolute_square", abs_sq, 1));

    v.clauses.push_back(comm_clause("right_mult_commutes", ra, m, 2));
    v.clauses.push_back(conserved_clause("conserved_with_conjugate_square", conj_sq, 2));
    v.clauses.push_back(comm_clause("dual_commutes_left_mult", la, md, 2));
    v.clauses.push_back(dual_fix_clause("dual_fixes_observable_and_conjugate_square", conj_sq, 2));

    double ra_ = rel((dual.apply(a) - a).norm(), as);
    v.clauses.push_back(Clause{"observable_fixed_by_dual", true, ra_ <= tol.eq_tol, ra_, 0, ""});
  }
  v.consistent = clauses_consistent(v.clauses);
  return v;
}

double spectral_cluster_width(const Mat& a) { return 1e-6 * a.norm(); }

NoetherVerdict noether_measurement(const SuperOperator& s, const Mat& a, std::uint64_t seed,
                                   const Tolerances& tol) {
  require_trace_preserving(s, tol, "noether_measurement");
  if (!s.flags().hermiticity_preserving.value_or(s.is_hermiticity_preserving(tol)))
    throw std::invalid_argument("noether_measurement: map must be hermiticity preserving");
  if (!is_psd(a, tol))
    throw std::invalid_argument("noether_measurement: observable must be positive semidefinite");

  Rng rng(seed);
  // positivity is sampled, not certified; a found violation is disqualifying
  if (!s.flags().completely_positive.value_or(false)) {
    for (int i = 0; i < 32; ++i)
      if (min_eigenvalue_hermitian_part(s.apply(random_psd_unit(s.dim(), rng))) < -tol.psd_tol)
        throw std::invalid_argument("noether_measurement: map sends a PSD input to a non-PSD output");
  }

  SuperOperator dual = trace_dual(s, tol);
  Mat root = psd_sqrt(a, tol);
  Mat sq = a * a;
  const double as = a.norm();

  NoetherVerdict v;
  auto comp_comm = [&](const Mat& b) {
    return rel(comm_norm(measurement_superop(b).matrix(), s.matrix()),
               std::max(1.0, b.squaredNorm()));
  };

  {
    double r = comp_comm(root);
    v.clauses.push_back(
        Clause{"evolution_commutes_with_root_compression", true, r <= tol.eq_tol, r, 1, ""});
  }
  {
    double r = rel(comm_norm(measurement_superop(root).matrix(), dual.matrix()),
                   std::max(1.0, root.squaredNorm()));
    v.clauses.push_back(
        Clause{"dual_commutes_with_root_compression", true, r <= tol.eq_tol, r, 1, ""});
  }
  {
    double r = std::max(rel((dual.apply(a) - a).norm(), as),
                        rel((dual.apply(sq) - sq).norm(), sq.norm()));
    v.clauses.push_back(Clause{"dual_fixes_observable_and_square", true, r <= tol.eq_tol, r, 1, ""});
  }
  {
    double r = std::max(conservation_residual(s, a, rng, 24),
                        conservation_residual(s, sq, rng, 24));
    v.clauses.push_back(Clause{"conserved_with_square_over_states", true, r <= tol.eq_tol, r, 1,
                               "sampled over 24 random states"});
  }
  {
    // spectral projections of a, eigenvalues clustered against noise
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (a + a.adjoint())));
    const double width = spectral_cluster_width(a);
    double worst = 0.0;
    int n_proj = 0;
    Eigen::Index i = 0;
    while (i < es.eigenvalues().size()) {
      Eigen::Index j = i;
      while (j + 1 < es.eigenvalues().size() &&
             es.eigenvalues()(j + 1) - es.eigenvalues()(j) <= width)
        ++j;
      Mat proj = Mat::Zero(a.rows(), a.cols());
      for (Eigen::Index k = i; k <= j; ++k)
        proj += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
      worst = std::max(worst, comp_comm(proj));
      ++n_proj;
      i = j + 1;
    }
    v.clauses.push_back(Clause{"spectral_compressions_commute", true, worst <= tol.eq_tol, worst, 1,
                               std::to_string(n_proj) + " spectral projections"});
  }
  {
    // compressions by polynomials of the observable
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::vector<double>> polys = {{0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}};
    polys.push_back({u(rng), u(rng), u(rng), u(rng)});
    double worst = 0.0;
    for (const auto& coeff : polys) {
      Mat f = Mat::Zero(a.rows(), a.cols());
      Mat pw = Mat::Identity(a.rows(), a.cols());
      for (double c : coeff) {
        f += c * pw;
        pw = pw * a;
      }
      worst = std::max(worst, comp_comm(f));
    }
    v.clauses.push_back(Clause{"polynomial_compressions_commute", true, worst <= tol.eq_tol, worst,
                               1, std::to_string(polys.size()) + " polynomials"});
  }
  v.consistent = clauses_consistent(v.clauses);
  return v;
}

}  // namespace noetherq
