#include "noetherq/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace noetherq::io {

namespace {

Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument("matrix entries must be numbers or [re, im] pairs");
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

int int_field(const json& j, const char* key, int lo, int hi) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw std::invalid_argument(std::string("missing or non-integer field \"") + key + "\"");
  long long v = j[key].get<long long>();
  if (v < lo || v > hi)
    throw std::invalid_argument(std::string("field \"") + key + "\" is out of range");
  return static_cast<int>(v);
}

void require_rows(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string(what) + " must be a non-empty array of rows");
}

}  // namespace

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const RMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const RVec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Mat mat_from_json(const json& j) {
  require_rows(j, "a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  if (cols == 0) throw std::invalid_argument("matrix rows must be non-empty arrays");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix rows must all have the same length");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

RMat rmat_from_json(const json& j) {
  require_rows(j, "a real matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  if (cols == 0) throw std::invalid_argument("matrix rows must be non-empty arrays");
  RMat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("matrix rows must all have the same length");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& e = row[static_cast<std::size_t>(k)];
      if (!e.is_number()) throw std::invalid_argument("real matrix entries must be plain numbers");
      m(i, k) = e.get<double>();
    }
  }
  return m;
}

RVec rvec_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty array of numbers");
  RVec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const json& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw std::invalid_argument("vector entries must be plain numbers");
    v(i) = e.get<double>();
  }
  return v;
}

json channel_to_json(const KrausChannel& ch) {
  json j;
  j["dim"] = ch.dim;
  j["picture"] = ch.picture == Picture::schrodinger ? "schrodinger" : "heisenberg";
  json ops = json::array();
  for (const Mat& a : ch.kraus) ops.push_back(to_json(a));
  j["kraus"] = std::move(ops);
  return j;
}

namespace {

Picture picture_from_json(const json& j) {
  if (!j.contains("picture")) return Picture::schrodinger;
  if (!j["picture"].is_string()) throw std::invalid_argument("\"picture\" must be a string");
  const std::string p = j["picture"].get<std::string>();
  if (p == "schrodinger") return Picture::schrodinger;
  if (p == "heisenberg") return Picture::heisenberg;
  throw std::invalid_argument("\"picture\" must be \"schrodinger\" or \"heisenberg\"");
}

KrausChannel channel_from_json_dim(const json& j, int outer_dim) {
  KrausChannel ch;
  ch.dim = j.contains("dim") ? int_field(j, "dim", 1, kMaxDim) : outer_dim;
  if (ch.dim <= 0) throw std::invalid_argument("channel needs a \"dim\" field");
  if (outer_dim > 0 && ch.dim != outer_dim)
    throw std::invalid_argument("channel dimension disagrees with the surrounding map");
  ch.picture = picture_from_json(j);
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty())
    throw std::invalid_argument("channel needs a non-empty \"kraus\" array");
  for (const json& op : j["kraus"]) {
    Mat a = mat_from_json(op);
    if (a.rows() != ch.dim || a.cols() != ch.dim)
      throw std::invalid_argument("Kraus operators must be dim x dim");
    ch.kraus.push_back(std::move(a));
  }
  return ch;
}

Pipeline pipeline_from_json(const json& j, int dim) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("a pipeline must be a non-empty array of stages");
  Pipeline p;
  for (const json& stage : j) {
    if (!stage.is_object()) throw std::invalid_argument("pipeline stages must be objects");
    if (stage.contains("transpose")) {
      if (!stage["transpose"].is_boolean() || !stage["transpose"].get<bool>())
        throw std::invalid_argument("a transpose stage is written as {\"transpose\": true}");
      p.stages.push_back(TransposeStage{dim});
    } else {
      p.stages.push_back(channel_from_json_dim(stage, dim));
    }
  }
  return p;
}

}  // namespace

KrausChannel channel_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("expected a channel object");
  return channel_from_json_dim(j, 0);
}

json lindblad_to_json(const LindbladGenerator& g) {
  json j;
  j["dim"] = g.dim;
  json ops = json::array();
  for (const Mat& l : g.lindblad) ops.push_back(to_json(l));
  j["lindblad"] = std::move(ops);
  if (g.hamiltonian.size() > 0) j["hamiltonian"] = to_json(g.hamiltonian);
  return j;
}

LindbladGenerator lindblad_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("expected a generator object");
  LindbladGenerator g;
  g.dim = int_field(j, "dim", 1, kMaxDim);
  if (!j.contains("lindblad") || !j["lindblad"].is_array())
    throw std::invalid_argument("generator needs a \"lindblad\" array (possibly empty)");
  for (const json& op : j["lindblad"]) {
    Mat l = mat_from_json(op);
    if (l.rows() != g.dim || l.cols() != g.dim)
      throw std::invalid_argument("Lindblad operators must be dim x dim");
    g.lindblad.push_back(std::move(l));
  }
  if (j.contains("hamiltonian")) {
    g.hamiltonian = mat_from_json(j["hamiltonian"]);
    if (g.hamiltonian.rows() != g.dim || g.hamiltonian.cols() != g.dim)
      throw std::invalid_argument("the Hamiltonian must be dim x dim");
  }
  if (g.lindblad.empty() && g.hamiltonian.size() == 0)
    throw std::invalid_argument("generator needs Lindblad operators or a Hamiltonian");
  return g;
}

json chain_to_json(const ClassicalChain& c) {
  json j;
  j["states"] = c.states;
  j["kind"] = c.kind == ChainKind::stochastic ? "stochastic" : "rate";
  j["matrix"] = to_json(c.matrix);
  return j;
}

ClassicalChain chain_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("expected a chain object");
  ClassicalChain c;
  c.states = int_field(j, "states", 1, kMaxDim);
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("chain needs a \"kind\" field");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "stochastic")
    c.kind = ChainKind::stochastic;
  else if (kind == "rate")
    c.kind = ChainKind::rate;
  else
    throw std::invalid_argument("\"kind\" must be \"stochastic\" or \"rate\"");
  if (!j.contains("matrix")) throw std::invalid_argument("chain needs a \"matrix\" field");
  c.matrix = rmat_from_json(j["matrix"]);
  if (c.matrix.rows() != c.states || c.matrix.cols() != c.states)
    throw std::invalid_argument("chain matrix must be states x states");
  return c;
}

StochasticMapSpec map_spec_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("expected a map object");
  StochasticMapSpec spec;
  if (j.contains("mixture")) {
    spec.dim = int_field(j, "dim", 1, kMaxDim);
    const json& mix = j["mixture"];
    if (!mix.is_array() || mix.empty())
      throw std::invalid_argument("\"mixture\" must be a non-empty array");
    for (const json& part : mix) {
      if (!part.is_object() || !part.contains("weight") || !part["weight"].is_number() ||
          !part.contains("pipeline"))
        throw std::invalid_argument("mixture parts need \"weight\" and \"pipeline\" fields");
      spec.weights.push_back(part["weight"].get<double>());
      spec.pipelines.push_back(pipeline_from_json(part["pipeline"], spec.dim));
    }
    return spec;
  }
  if (j.contains("pipeline")) {
    spec.dim = int_field(j, "dim", 1, kMaxDim);
    spec.pipelines.push_back(pipeline_from_json(j["pipeline"], spec.dim));
    spec.weights.push_back(1.0);
    return spec;
  }
  if (j.contains("kraus")) {
    KrausChannel ch = channel_from_json(j);
    spec.dim = ch.dim;
    Pipeline p;
    p.stages.push_back(std::move(ch));
    spec.pipelines.push_back(std::move(p));
    spec.weights.push_back(1.0);
    return spec;
  }
  if (j.contains("transpose")) {
    spec.dim = int_field(j, "dim", 1, kMaxDim);
    Pipeline p;
    p.stages.push_back(TransposeStage{spec.dim});
    spec.pipelines.push_back(std::move(p));
    spec.weights.push_back(1.0);
    return spec;
  }
  throw std::invalid_argument("map files need \"kraus\", \"pipeline\", \"mixture\", or \"transpose\"");
}

Mat observable_from_json(const json& j) {
  if (!j.is_object() || !j.contains("matrix"))
    throw std::invalid_argument("observable files need \"dim\" and \"matrix\" fields");
  const int dim = int_field(j, "dim", 1, kMaxDim);
  Mat a = mat_from_json(j["matrix"]);
  if (a.rows() != dim || a.cols() != dim)
    throw std::invalid_argument("observable matrix must be dim x dim");
  return a;
}

namespace {

std::string format_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot serialize a non-finite number");
  if (x == 0.0) x = 0.0;  // collapse negative zero so reparsing is stable
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Arrays whose nesting depth stays at or below two (rows of scalars or of
// [re, im] pairs) print on one line; anything deeper gets one element per
// line. The rule depends only on structure, never on values, so a document
// reparsed from our own output prints identically.
int depth_of(const json& j) {
  if (j.is_object()) return 3;
  if (!j.is_array()) return 0;
  int d = 0;
  for (const json& e : j) d = std::max(d, depth_of(e));
  return 1 + d;
}

void dump_rec(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::null: out += "null"; return;
    case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
    case json::value_t::number_integer: out += std::to_string(j.get<long long>()); return;
    case json::value_t::number_unsigned: out += std::to_string(j.get<unsigned long long>()); return;
    case json::value_t::number_float: out += format_double(j.get<double>()); return;
    case json::value_t::string: out += json(j.get<std::string>()).dump(); return;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (depth_of(j) <= 2) {
        out += "[";
        bool first = true;
        for (const json& e : j) {
          if (!first) out += ", ";
          first = false;
          dump_rec(e, 0, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const json& e : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad + "  ";
        dump_rec(e, indent + 2, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + "  " + json(it.key()).dump() + ": ";
        dump_rec(it.value(), indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    default: throw std::invalid_argument("cannot serialize this JSON value type");
  }
}

}  // namespace

std::string canonical_dump(const json& j) {
  std::string out;
  dump_rec(j, 0, out);
  return out;
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return json::parse(in);
}

void save_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << canonical_dump(j) << "\n";
}

}  // namespace noetherq::io
