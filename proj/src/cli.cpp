#include "noetherq/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "noetherq/classical.hpp"
#include "noetherq/io.hpp"

namespace noetherq {
namespace {

using io::json;

struct CommonOpts {
  Tolerances tol;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  bool as_json = false;
};

std::uint64_t resolve_seed(const CommonOpts& c) {
  if (c.seed_opt != nullptr && c.seed_opt->count() > 0) return c.seed;
  if (const char* env = std::getenv("NOETHERQ_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && end != nullptr && *end == '\0') return v;
  }
  return 12345;
}

void add_common(CLI::App* sc, CommonOpts& c) {
  sc->add_option("--tol-rank", c.tol.rank_tol, "rank cutoff for kernels and spans")
      ->check(CLI::PositiveNumber);
  sc->add_option("--tol-eq", c.tol.eq_tol, "tolerance for equality checks")
      ->check(CLI::PositiveNumber);
  sc->add_option("--tol-psd", c.tol.psd_tol, "slack on minimum eigenvalues")
      ->check(CLI::PositiveNumber);
  c.seed_opt = sc->add_option("--seed", c.seed, "RNG seed (default: NOETHERQ_SEED, else 12345)");
  sc->add_flag("--json", c.as_json, "emit a JSON report instead of text");
}

std::string num(double x) {
  char b[48];
  std::snprintf(b, sizeof b, "%.6g", x);
  return b;
}

const char* yesno(bool b) { return b ? "yes" : "no"; }

json verdict_to_json(const NoetherVerdict& v) {
  json j;
  j["consistent"] = v.consistent;
  json cl = json::array();
  for (const Clause& c : v.clauses) {
    json e;
    e["name"] = c.name;
    e["group"] = c.group;
    e["applicable"] = c.applicable;
    e["holds"] = c.holds;
    e["residual"] = c.residual;
    if (!c.note.empty()) e["note"] = c.note;
    cl.push_back(std::move(e));
  }
  j["clauses"] = std::move(cl);
  return j;
}

void print_verdict(std::ostream& out, const std::string& title, const NoetherVerdict& v) {
  out << title << ": " << (v.consistent ? "consistent" : "INCONSISTENT") << "\n";
  for (const Clause& c : v.clauses) {
    const char* mark = !c.applicable ? " -- " : (c.holds ? " ok " : "FAIL");
    out << "  [" << mark << "] group " << c.group << "  residual " << num(c.residual) << "  "
        << c.name;
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << "\n";
  }
}

void emit(std::ostream& out, const CommonOpts& c, const json& doc,
          const std::function<void(std::ostream&)>& text) {
  if (c.as_json)
    out << io::canonical_dump(doc) << "\n";
  else
    text(out);
}

// Structural analysis wants the unital side. Trace-preserving maps are
// analyzed through their trace dual; a map with neither normalization is
// taken as given, with a note.
SuperOperator structural_side(const SuperOperator& s, const Tolerances& tol, std::string& side,
                              std::vector<std::string>& notes) {
  side = "given";
  if (s.is_unital(tol)) return s;
  if (s.is_trace_preserving(tol) && s.is_hermiticity_preserving(tol)) {
    side = "dual";
    notes.push_back("map is trace preserving but not unital; structure analyzed on the trace dual");
    return trace_dual(s, tol);
  }
  notes.push_back("map is neither unital nor trace preserving; structure analyzed as given");
  return s;
}

struct AnalyzeOpts {
  CommonOpts common;
  std::string file;
  int kmax = 2;
  int samples = 200;
};

int run_analyze(const AnalyzeOpts& o, std::ostream& out) {
  const Tolerances& tol = o.common.tol;
  SuperOperator s = compile_map(io::map_spec_from_json(io::load_file(o.file)), tol);
  PositivityProfile profile = positivity_profile(s, o.kmax, o.samples, resolve_seed(o.common), tol);

  std::vector<std::string> notes;
  std::string side;
  SuperOperator su = structural_side(s, tol, side, notes);

  json doc;
  doc["command"] = "analyze-channel";
  doc["dim"] = s.dim();
  {
    json fl;
    fl["trace_preserving"] = profile.trace_preserving;
    fl["unital"] = profile.unital;
    fl["hermiticity_preserving"] = profile.hermiticity_preserving;
    fl["completely_positive"] = profile.completely_positive;
    doc["flags"] = std::move(fl);
  }
  doc["choi_min_eigenvalue"] = profile.choi_min_eigenvalue;
  {
    json kl = json::array();
    for (const KPositivityResult& k : profile.k_levels) {
      json e;
      e["k"] = k.k;
      e["violated"] = k.violated;
      e["min_eigenvalue"] = k.min_eigenvalue;
      kl.push_back(std::move(e));
    }
    doc["k_positivity"] = std::move(kl);
  }
  doc["analyzed_side"] = side;

  std::optional<FixedStructureReport> rep;
  int fix_dim = 0;
  int bim_dim = 0;
  if (profile.completely_positive && su.is_unital(tol)) {
    rep = constants_scale(su, resolve_seed(o.common), tol);
    fix_dim = rep->fix.size();
    bim_dim = rep->bimodule.size();
    doc["fixed_points_dim"] = rep->fix.size();
    doc["multiplicative_domain_dim"] = rep->mult_domain.size();
    doc["bimodule_dim"] = rep->bimodule.size();
    doc["constants_dim"] = rep->constants2.size();
    doc["fix_is_algebra"] = rep->fix_is_algebra;
    if (rep->witness) doc["witness_square_residual"] = rep->witness->square_residual;
    for (const std::string& n : rep->fix.notes()) notes.push_back(n);
    for (const std::string& n : rep->constants2.notes()) notes.push_back(n);
  } else {
    OperatorSubspace fix = fixed_point_space(su, tol);
    OperatorSubspace bim = bimodule_domain(su, tol);
    fix_dim = fix.size();
    bim_dim = bim.size();
    doc["fixed_points_dim"] = fix.size();
    doc["multiplicative_domain_dim"] = nullptr;
    doc["bimodule_dim"] = bim.size();
    doc["constants_dim"] = nullptr;
    doc["fix_is_algebra"] = nullptr;
    notes.push_back("multiplicative domain and square scaling need a unital completely positive map");
    for (const std::string& n : fix.notes()) notes.push_back(n);
  }
  doc["notes"] = json(notes);

  emit(out, o.common, doc, [&](std::ostream& os) {
    os << "map on dim " << s.dim() << ": trace preserving " << yesno(profile.trace_preserving)
       << ", unital " << yesno(profile.unital) << ", hermiticity preserving "
       << yesno(profile.hermiticity_preserving) << ", completely positive "
       << yesno(profile.completely_positive) << "\n";
    os << "choi minimum eigenvalue: " << num(profile.choi_min_eigenvalue) << "\n";
    for (const KPositivityResult& k : profile.k_levels) {
      os << "k=" << k.k << ": "
         << (k.violated ? "violated (min eigenvalue " : "no violation found (min eigenvalue ")
         << num(k.min_eigenvalue) << ")\n";
    }
    os << "analyzed side: " << side << "\n";
    os << "fixed points: dim " << fix_dim << "\n";
    if (rep) {
      os << "multiplicative domain: dim " << rep->mult_domain.size() << "\n";
      os << "bimodule domain: dim " << rep->bimodule.size() << "\n";
      os << "constants closed under squares: dim " << rep->constants2.size() << "\n";
      os << "fixed points form an algebra: " << yesno(rep->fix_is_algebra) << "\n";
      if (rep->witness)
        os << "square escape witness residual: " << num(rep->witness->square_residual) << "\n";
    } else {
      os << "multiplicative domain: not applicable\n";
      os << "bimodule domain: dim " << bim_dim << "\n";
    }
    for (const std::string& n : notes) os << "note: " << n << "\n";
  });
  return 0;
}

struct NoetherOpts {
  CommonOpts common;
  std::string channel;
  std::string observable;
};

int run_noether(const NoetherOpts& o, std::ostream& out) {
  const Tolerances& tol = o.common.tol;
  SuperOperator s = compile_map(io::map_spec_from_json(io::load_file(o.channel)), tol);
  Mat a = io::observable_from_json(io::load_file(o.observable));
  if (a.rows() != s.dim())
    throw std::invalid_argument("observable dimension disagrees with the map");

  std::vector<std::string> notes;
  SuperOperator psi = s;
  if (!s.is_trace_preserving(tol)) {
    if (s.is_unital(tol) && s.is_hermiticity_preserving(tol)) {
      psi = trace_dual(s, tol);
      notes.push_back("map is unital but not trace preserving; its trace dual drives the evolution");
    } else {
      throw std::invalid_argument("conservation checks need a trace-preserving evolution");
    }
  }

  const bool herm = is_hermitian(a, tol);
  const bool psd = herm && is_psd(a, tol);
  NoetherVerdict evo = noether_discrete(psi, a, resolve_seed(o.common), tol);
  std::optional<NoetherVerdict> meas;
  if (psd)
    meas = noether_measurement(psi, a, resolve_seed(o.common), tol);
  else
    notes.push_back("observable is not PSD; measurement clauses skipped");

  const bool consistent = evo.consistent && (!meas || meas->consistent);

  json doc;
  doc["command"] = "noether";
  doc["dim"] = s.dim();
  doc["observable_hermitian"] = herm;
  doc["observable_psd"] = psd;
  doc["evolution"] = verdict_to_json(evo);
  if (meas)
    doc["measurement"] = verdict_to_json(*meas);
  else
    doc["measurement"] = nullptr;
  doc["consistent"] = consistent;
  doc["notes"] = json(notes);

  emit(out, o.common, doc, [&](std::ostream& os) {
    print_verdict(os, "evolution clauses", evo);
    if (meas) print_verdict(os, "measurement clauses", *meas);
    for (const std::string& n : notes) os << "note: " << n << "\n";
    os << "overall: " << (consistent ? "consistent" : "INCONSISTENT") << "\n";
  });
  return consistent ? 0 : 2;
}

struct LindbladOpts {
  CommonOpts common;
  std::string file;
  std::string observable;
  std::vector<double> times;
};

SemigroupSpec load_semigroup(const json& j, std::vector<double> grid, const Tolerances& tol) {
  if (j.contains("lindblad"))
    return SemigroupSpec::from_lindblad(io::lindblad_from_json(j), std::move(grid), tol);
  SuperOperator s = compile_map(io::map_spec_from_json(j), tol);
  Picture given;
  if (s.is_trace_preserving(tol))
    given = Picture::schrodinger;
  else if (s.is_unital(tol))
    given = Picture::heisenberg;
  else
    throw std::invalid_argument("channel-minus-identity generators need a normalized channel");
  return SemigroupSpec::from_channel_minus_id(s, given, std::move(grid), tol);
}

int run_lindblad(const LindbladOpts& o, std::ostream& out) {
  const Tolerances& tol = o.common.tol;
  for (double t : o.times)
    if (t < 0) throw std::invalid_argument("--times entries must be nonnegative");
  std::vector<double> grid = o.times.empty() ? SemigroupSpec::default_time_grid() : o.times;
  SemigroupSpec sg = load_semigroup(io::load_file(o.file), grid, tol);

  OperatorSubspace cons = constants_of_motion(sg, tol);
  const double gb = growth_bound(sg);

  std::vector<std::string> notes = cons.notes();
  std::optional<NoetherVerdict> verdict;
  if (!o.observable.empty()) {
    Mat a = io::observable_from_json(io::load_file(o.observable));
    if (a.rows() != sg.dim())
      throw std::invalid_argument("observable dimension disagrees with the generator");
    verdict = noether_continuous(sg, a, resolve_seed(o.common), tol);
  }

  json doc;
  doc["command"] = "lindblad-constants";
  doc["dim"] = sg.dim();
  doc["completely_positive"] = sg.completely_positive();
  doc["growth_bound"] = gb;
  doc["time_grid"] = json(sg.time_grid());
  doc["constants_dim"] = cons.size();
  if (verdict)
    doc["verdict"] = verdict_to_json(*verdict);
  else
    doc["verdict"] = nullptr;
  doc["notes"] = json(notes);

  const bool consistent = !verdict || verdict->consistent;
  emit(out, o.common, doc, [&](std::ostream& os) {
    os << "semigroup on dim " << sg.dim() << ", completely positive "
       << yesno(sg.completely_positive()) << "\n";
    os << "growth bound: " << num(gb) << "\n";
    os << "constants of the motion: dim " << cons.size() << "\n";
    if (verdict) print_verdict(os, "conservation clauses", *verdict);
    for (const std::string& n : notes) os << "note: " << n << "\n";
  });
  return consistent ? 0 : 2;
}

struct ErgodicOpts {
  CommonOpts common;
  std::string file;
};

int run_ergodic(const ErgodicOpts& o, std::ostream& out) {
  const Tolerances& tol = o.common.tol;
  json j = io::load_file(o.file);

  std::vector<std::string> notes;
  ErgodicReport rep;
  std::string kind;
  if (j.contains("lindblad")) {
    SemigroupSpec sg =
        SemigroupSpec::from_lindblad(io::lindblad_from_json(j), SemigroupSpec::default_time_grid(), tol);
    rep = ergodic_projection_continuous(sg, tol);
    kind = "continuous";
  } else {
    SuperOperator s = compile_map(io::map_spec_from_json(j), tol);
    if (!s.is_completely_positive(tol))
      throw std::invalid_argument("ergodic averaging needs a completely positive map");
    SuperOperator su = s;
    if (!s.is_unital(tol)) {
      if (!s.is_trace_preserving(tol))
        throw std::invalid_argument("ergodic averaging needs a unital or trace-preserving map");
      su = trace_dual(s, tol);
      notes.push_back("averaging the trace dual of the given map");
    }
    rep = ergodic_projection_discrete(su, tol);
    kind = "discrete";
  }
  for (const std::string& n : rep.notes) notes.push_back(n);

  ConditionalExpectationReport ce = conditional_expectation_check(rep.projection, tol);

  json doc;
  doc["command"] = "ergodic";
  doc["kind"] = kind;
  doc["dim"] = rep.projection.dim();
  doc["method"] = rep.method;
  doc["doublings"] = rep.doublings;
  doc["idempotency_residual"] = rep.idempotency_residual;
  doc["range_dim"] = rep.range.size();
  {
    json cj;
    cj["passes"] = ce.passes;
    cj["max_residual"] = ce.max_residual;
    doc["conditional_expectation"] = std::move(cj);
  }
  doc["notes"] = json(notes);

  emit(out, o.common, doc, [&](std::ostream& os) {
    os << kind << " averaging on dim " << rep.projection.dim() << " via " << rep.method;
    if (rep.method == "cesaro") os << " (" << rep.doublings << " doublings)";
    os << "\n";
    os << "idempotency residual: " << num(rep.idempotency_residual) << "\n";
    os << "range of the projection: dim " << rep.range.size() << "\n";
    os << "conditional expectation onto the range: " << (ce.passes ? "yes" : "no")
       << " (module residual " << num(ce.max_residual) << ")\n";
    for (const std::string& n : notes) os << "note: " << n << "\n";
  });
  return 0;
}

struct ClassicalOpts {
  CommonOpts common;
  std::string matrix;
  std::string observable;
  bool embed = false;
};

bool group_holds(const NoetherVerdict& v, int group) {
  bool any = false;
  for (const Clause& c : v.clauses) {
    if (c.group != group || !c.applicable) continue;
    any = true;
    if (!c.holds) return false;
  }
  return any;
}

int run_classical(const ClassicalOpts& o, std::ostream& out) {
  const Tolerances& tol = o.common.tol;
  ClassicalChain chain = io::chain_from_json(io::load_file(o.matrix));
  validate_chain(chain, tol);

  json oj = io::load_file(o.observable);
  if (!oj.is_object() || !oj.contains("states") || !oj.contains("values"))
    throw std::invalid_argument("classical observables need \"states\" and \"values\" fields");
  RVec obs = io::rvec_from_json(oj["values"]);
  if (!oj["states"].is_number_integer() || oj["states"].get<int>() != chain.states ||
      obs.size() != chain.states)
    throw std::invalid_argument("observable length disagrees with the chain");

  NoetherVerdict v = chain.kind == ChainKind::stochastic
                         ? classical_noether_discrete(chain, obs, tol)
                         : classical_noether_continuous(chain, obs, tol);

  json doc;
  doc["command"] = "classical";
  doc["states"] = chain.states;
  doc["kind"] = chain.kind == ChainKind::stochastic ? "stochastic" : "rate";
  doc["verdict"] = verdict_to_json(v);

  bool consistent = v.consistent;
  std::optional<NoetherVerdict> qv;
  std::optional<bool> agrees;
  if (o.embed) {
    Mat diag_o = Mat::Zero(chain.states, chain.states);
    for (int i = 0; i < chain.states; ++i) diag_o(i, i) = obs(i);
    auto embedded = embed_diagonal(chain, tol);
    if (std::holds_alternative<KrausChannel>(embedded)) {
      SuperOperator s = channel_super(std::get<KrausChannel>(embedded), tol);
      qv = noether_discrete(s, diag_o, resolve_seed(o.common), tol);
    } else {
      qv = noether_continuous(std::get<SemigroupSpec>(embedded), diag_o, resolve_seed(o.common), tol);
    }
    agrees = qv->consistent && group_holds(v, 1) == group_holds(*qv, 1);
    doc["embedded_verdict"] = verdict_to_json(*qv);
    doc["embedding_agrees"] = *agrees;
    consistent = consistent && *agrees;
  }
  doc["consistent"] = consistent;

  emit(out, o.common, doc, [&](std::ostream& os) {
    print_verdict(os, "classical clauses", v);
    if (qv) {
      print_verdict(os, "embedded quantum clauses", *qv);
      os << "embedding agrees with the classical verdict: " << yesno(*agrees) << "\n";
    }
    os << "overall: " << (consistent ? "consistent" : "INCONSISTENT") << "\n";
  });
  return consistent ? 0 : 2;
}

struct DilateOpts {
  CommonOpts common;
  std::string channel;
};

int run_dilate(const DilateOpts& o, std::ostream& out) {
  const Tolerances& tol = o.common.tol;
  KrausChannel ch = io::channel_from_json(io::load_file(o.channel));
  StinespringTriple st = stinespring_dilation(ch, tol);

  const int d = ch.dim;
  KrausChannel heis = ch.picture == Picture::heisenberg ? ch : channel_dual(ch);
  Mat expected = Mat::Zero(d * d, d * d);
  for (const Mat& b : heis.kraus) expected += kron(b.conjugate(), b);
  const double recon =
      (expected - st.reconstructed.matrix()).norm() / std::max(1.0, expected.norm());

  Mat gram = st.isometry.adjoint() * st.isometry;
  Mat slack = Mat::Identity(d, d) - gram;
  const double isometry_defect = (gram - Mat::Identity(d, d)).norm();
  const double slack_min = min_eigenvalue_hermitian_part(slack);

  json doc;
  doc["command"] = "dilate";
  doc["dim"] = d;
  doc["env_dim"] = st.env_dim;
  doc["isometry_defect"] = isometry_defect;
  doc["contraction_slack_min_eigenvalue"] = slack_min;
  doc["reconstruction_residual"] = recon;

  emit(out, o.common, doc, [&](std::ostream& os) {
    os << "dilation space: dim " << d << " x env " << st.env_dim << "\n";
    os << "V*V deviation from identity: " << num(isometry_defect) << "\n";
    os << "min eigenvalue of I - V*V: " << num(slack_min) << "\n";
    os << "reconstruction residual of the operator-side action: " << num(recon) << "\n";
  });
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"structure of trace-preserving and unital maps on matrix algebras"};
  app.name("noetherq");
  app.require_subcommand(1);

  AnalyzeOpts an;
  NoetherOpts no;
  LindbladOpts li;
  ErgodicOpts er;
  ClassicalOpts cl;
  DilateOpts di;

  CLI::App* an_sc =
      app.add_subcommand("analyze-channel", "positivity profile and fixed structure of a map");
  an_sc->add_option("--file", an.file, "map description (channel, pipeline, or mixture)")
      ->required();
  an_sc->add_option("--kmax", an.kmax, "largest k probed for k-positivity")->check(CLI::Range(1, 6));
  an_sc->add_option("--samples", an.samples, "random witnesses per positivity level")
      ->check(CLI::Range(0, 100000));
  add_common(an_sc, an.common);

  CLI::App* no_sc =
      app.add_subcommand("noether", "conservation clauses for an observable under a map");
  no_sc->add_option("--channel", no.channel, "map description")->required();
  no_sc->add_option("--observable", no.observable, "observable file")->required();
  add_common(no_sc, no.common);

  CLI::App* li_sc = app.add_subcommand(
      "lindblad-constants", "constants of the motion of a one-parameter semigroup");
  li_sc->add_option("--file", li.file, "generator file (jump operators or a channel)")->required();
  li_sc->add_option("--observable", li.observable, "optional observable to check");
  li_sc->add_option("--times", li.times, "sample times for the evolution")->delimiter(',');
  add_common(li_sc, li.common);

  CLI::App* er_sc = app.add_subcommand("ergodic", "averaging projection and its module property");
  er_sc->add_option("--file", er.file, "channel or generator file")->required();
  add_common(er_sc, er.common);

  CLI::App* cl_sc =
      app.add_subcommand("classical", "conservation clauses for a finite Markov chain");
  cl_sc->add_option("--matrix", cl.matrix, "chain file")->required();
  cl_sc->add_option("--observable", cl.observable, "classical observable file")->required();
  cl_sc->add_flag("--embed", cl.embed, "also run the diagonal quantum embedding");
  add_common(cl_sc, cl.common);

  CLI::App* di_sc = app.add_subcommand("dilate", "isometric dilation of a Kraus channel");
  di_sc->add_option("--channel", di.channel, "channel file (Kraus form)")->required();
  add_common(di_sc, di.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (an_sc->parsed()) return run_analyze(an, out);
    if (no_sc->parsed()) return run_noether(no, out);
    if (li_sc->parsed()) return run_lindblad(li, out);
    if (er_sc->parsed()) return run_ergodic(er, out);
    if (cl_sc->parsed()) return run_classical(cl, out);
    if (di_sc->parsed()) return run_dilate(di, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace noetherq
