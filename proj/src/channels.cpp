#include "noetherq/channels.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "noetherq/random.hpp"

namespace noetherq {

namespace {

void check_channel_shape(const KrausChannel& ch) {
  if (ch.dim < 1 || ch.dim > kMaxDim)
    throw std::invalid_argument("channel dimension outside supported range");
  if (ch.kraus.empty()) throw std::invalid_argument("channel needs at least one Kraus operator");
  for (const Mat& a : ch.kraus)
    if (a.rows() != ch.dim || a.cols() != ch.dim)
      throw std::invalid_argument("Kraus operator dimension mismatch");
}

}  // namespace

Mat picture_gram(const KrausChannel& ch) {
  check_channel_shape(ch);
  Mat g = Mat::Zero(ch.dim, ch.dim);
  for (const Mat& a : ch.kraus)
    g += ch.picture == Picture::schrodinger ? Mat(a.adjoint() * a) : Mat(a * a.adjoint());
  return g;
}

bool channel_normalized(const KrausChannel& ch, const Tolerances& tol) {
  Mat g = picture_gram(ch);
  return (g - Mat::Identity(ch.dim, ch.dim)).norm() <= tol.eq_tol * std::max(1.0, g.norm());
}

void validate_channel(const KrausChannel& ch, const Tolerances& tol) {
  check_channel_shape(ch);
  if (!channel_normalized(ch, tol))
    throw std::invalid_argument(
        ch.picture == Picture::schrodinger
            ? "schrodinger channel is not trace preserving (sum A†A differs from identity)"
            : "heisenberg channel is not unital (sum AA† differs from identity)");
}

KrausChannel channel_dual(const KrausChannel& ch) {
  check_channel_shape(ch);
  KrausChannel d;
  d.dim = ch.dim;
  d.picture = ch.picture == Picture::schrodinger ? Picture::heisenberg : Picture::schrodinger;
  d.kraus.reserve(ch.kraus.size());
  for (const Mat& a : ch.kraus) d.kraus.push_back(a.adjoint());
  return d;
}

KrausChannel build_luders(const std::vector<Mat>& effects, const Tolerances& tol) {
  if (effects.empty()) throw std::invalid_argument("build_luders: no effects given");
  const int d = static_cast<int>(effects.front().rows());
  Mat sum = Mat::Zero(d, d);
  KrausChannel ch;
  ch.dim = d;
  ch.picture = Picture::schrodinger;
  for (const Mat& e : effects) {
    if (e.rows() != d || e.cols() != d)
      throw std::invalid_argument("build_luders: effect dimension mismatch");
    if (!is_hermitian(e, tol)) throw std::invalid_argument("build_luders: effect not hermitian");
    sum += e;
    try {
      ch.kraus.push_back(psd_sqrt(e, tol));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("build_luders: effect is not positive semidefinite");
    }
  }
  if ((sum - Mat::Identity(d, d)).norm() > tol.eq_tol * std::max(1.0, sum.norm()))
    throw std::invalid_argument("build_luders: effects do not sum to the identity");
  return ch;
}

SuperOperator channel_super(const KrausChannel& ch, const Tolerances& tol) {
  validate_channel(ch, tol);
  Mat m = Mat::Zero(ch.dim * ch.dim, ch.dim * ch.dim);
  for (const Mat& a : ch.kraus) m += kron(a.conjugate(), a);
  SuperOperator s(ch.dim, std::move(m));
  s.flags().completely_positive = true;
  s.flags().hermiticity_preserving = true;
  s.flags().trace_preserving = s.is_trace_preserving(tol);
  s.flags().unital = s.is_unital(tol);
  return s;
}

Mat choi_matrix(const SuperOperator& s) {
  const int d = s.dim();
  Mat c(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::Map<const Mat> block(s.matrix().col(j * d + i).data(), d, d);
      c.block(i * d, j * d, d, d) = block;
    }
  return c;
}

SuperOperator transpose_superop(int dim) {
  Mat t = Mat::Zero(dim * dim, dim * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) t(i * dim + j, j * dim + i) = 1.0;
  SuperOperator s(dim, std::move(t));
  s.flags().trace_preserving = true;
  s.flags().unital = true;
  s.flags().hermiticity_preserving = true;
  s.flags().completely_positive = dim == 1;
  return s;
}

SuperOperator compile_map(const StochasticMapSpec& spec, const Tolerances& tol) {
  if (spec.pipelines.empty()) throw std::invalid_argument("compile_map: no pipelines");
  if (!spec.weights.empty() && spec.weights.size() != spec.pipelines.size())
    throw std::invalid_argument("compile_map: weight count differs from pipeline count");
  if (spec.weights.empty() && spec.pipelines.size() > 1)
    throw std::invalid_argument("compile_map: several pipelines need convex weights");

  double wsum = 0.0;
  for (double w : spec.weights) {
    if (w < -tol.eq_tol) throw std::invalid_argument("compile_map: negative weight");
    wsum += w;
  }
  if (!spec.weights.empty() && std::abs(wsum - 1.0) > tol.eq_tol)
    throw std::invalid_argument("compile_map: weights must sum to one");

  const int n = spec.dim * spec.dim;
  Mat total = Mat::Zero(n, n);
  for (std::size_t p = 0; p < spec.pipelines.size(); ++p) {
    Mat acc = Mat::Identity(n, n);
    for (const PipelineStage& stage : spec.pipelines[p].stages) {
      Mat sm;
      if (const auto* ch = std::get_if<KrausChannel>(&stage)) {
        if (ch->dim != spec.dim) throw std::invalid_argument("compile_map: stage dimension mismatch");
        sm = channel_super(*ch, tol).matrix();
      } else {
        const auto& tr = std::get<TransposeStage>(stage);
        if (tr.dim != spec.dim) throw std::invalid_argument("compile_map: stage dimension mismatch");
        sm = transpose_superop(spec.dim).matrix();
      }
      acc = sm * acc;  // later stages act on the output of earlier ones
    }
    total += (spec.weights.empty() ? 1.0 : spec.weights[p]) * acc;
  }

  SuperOperator s(spec.dim, std::move(total));
  // transpose stages can destroy complete positivity, so nothing is assumed
  s.flags().trace_preserving = s.is_trace_preserving(tol);
  s.flags().unital = s.is_unital(tol);
  s.flags().hermiticity_preserving = s.is_hermiticity_preserving(tol);
  s.flags().completely_positive = s.is_completely_positive(tol);
  return s;
}

PositivityProfile positivity_profile(const SuperOperator& s, int k_max, int samples,
                                     std::uint64_t seed, const Tolerances& tol) {
  if (k_max < 1) throw std::invalid_argument("positivity_profile: k_max must be at least 1");
  const int d = s.dim();
  PositivityProfile prof;
  prof.trace_preserving = s.is_trace_preserving(tol);
  prof.unital = s.is_unital(tol);
  prof.hermiticity_preserving = s.is_hermiticity_preserving(tol);
  Mat choi = choi_matrix(s);
  prof.choi_min_eigenvalue = min_eigenvalue_hermitian_part(choi);
  prof.completely_positive =
      (choi - choi.adjoint()).norm() <= tol.eq_tol * std::max(1.0, choi.norm()) &&
      prof.choi_min_eigenvalue >= -tol.psd_tol;

  Rng rng(seed);
  for (int k = 1; k <= k_max; ++k) {
    KPositivityResult res;
    res.k = k;
    res.min_eigenvalue = std::numeric_limits<double>::infinity();

    // amplified action on a kd x kd input, blockwise
    auto amplified = [&](const Mat& x) {
      Mat y(k * d, k * d);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          y.block(i * d, j * d, d, d) = s.apply(x.block(i * d, j * d, d, d));
      return y;
    };
    auto consider = [&](const Mat& x) {
      double lam = min_eigenvalue_hermitian_part(amplified(x));
      if (lam < res.min_eigenvalue) {
        res.min_eigenvalue = lam;
        res.witness = x;
      }
    };

    // canonical witness: the matrix-unit pattern that catches the transpose
    const int m = std::min(k, d);
    Mat canonical = Mat::Zero(k * d, k * d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) canonical(i * d + i, j * d + j) = 1.0;
    consider(canonical);
    for (int t = 0; t < samples; ++t) consider(random_psd_unit(k * d, rng));

    res.violated = res.min_eigenvalue < -tol.psd_tol;
    prof.k_levels.push_back(std::move(res));
  }
  return prof;
}

Mat representation(const StinespringTriple& st, const Mat& a) {
  if (a.rows() != st.dim || a.cols() != st.dim)
    throw std::invalid_argument("representation: operand dimension mismatch");
  return kron(a, Mat::Identity(st.env_dim, st.env_dim));
}

Mat stinespring_apply(const StinespringTriple& st, const Mat& a) {
  return st.isometry.adjoint() * representation(st, a) * st.isometry;
}

StinespringTriple stinespring_dilation(const KrausChannel& ch, const Tolerances& tol) {
  check_channel_shape(ch);
  // Contractive channels are admitted: the picture gram may sit below the
  // identity, in which case V†V = gram ≤ I and V is a strict contraction.
  Mat gram = picture_gram(ch);
  if (min_eigenvalue_hermitian_part(Mat(Mat::Identity(ch.dim, ch.dim) - gram)) < -tol.psd_tol)
    throw std::invalid_argument("stinespring_dilation: channel exceeds its normalization");

  // Work with the schrodinger-side Kraus family {B_k}; then
  // V h = sum_k (B_k h) kron e_k satisfies V†(a kron I)V = sum_k B_k† a B_k,
  // the heisenberg-side action, and V†V is the picture gram.
  std::vector<Mat> b;
  if (ch.picture == Picture::schrodinger) {
    b = ch.kraus;
  } else {
    b.reserve(ch.kraus.size());
    for (const Mat& a : ch.kraus) b.push_back(a.adjoint());
  }

  StinespringTriple st;
  st.dim = ch.dim;
  st.env_dim = static_cast<int>(b.size());
  st.isometry = Mat::Zero(st.dim * st.env_dim, st.dim);
  for (int k = 0; k < st.env_dim; ++k)
    for (int i = 0; i < st.dim; ++i)
      st.isometry.row(i * st.env_dim + k) = b[static_cast<std::size_t>(k)].row(i);

  Mat rec = Mat::Zero(ch.dim * ch.dim, ch.dim * ch.dim);
  for (const Mat& bk : b) rec += kron(bk.transpose(), bk.adjoint());
  st.reconstructed = SuperOperator(ch.dim, std::move(rec));
  st.reconstructed.flags().completely_positive = true;
  st.reconstructed.flags().hermiticity_preserving = true;
  return st;
}

Mat schwarz_defect(const SuperOperator& s, const Mat& a, const Tolerances& tol) {
  bool unital = s.flags().unital.value_or(s.is_unital(tol));
  bool cp = s.flags().completely_positive.value_or(s.is_completely_positive(tol));
  if (!unital || !cp)
    throw std::invalid_argument("schwarz_defect: needs a unital completely positive map");
  Mat fa = s.apply(a);
  return s.apply(Mat(a.adjoint() * a)) - fa.adjoint() * fa;
}

}  // namespace noetherq
