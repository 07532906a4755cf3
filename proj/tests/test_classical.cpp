#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"

using namespace noetherq;
using helpers::close;
using helpers::matrix_unit;

namespace {

ClassicalChain three_state() {
  RMat u(3, 3);
  u << 1, 0, 0.5, 0, 1, 0.5, 0, 0, 0;
  return ClassicalChain{3, ChainKind::stochastic, u};
}

RVec three_state_observable() {
  RVec o(3);
  o << 1, -1, 0;
  return o;
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

const Clause* find_clause(const NoetherVerdict& v, const std::string& name) {
  for (const Clause& c : v.clauses)
    if (c.name == name) return &c;
  return nullptr;
}

RMat random_stochastic(int n, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RMat u(n, n);
  for (int j = 0; j < n; ++j) {
    double total = 0;
    for (int i = 0; i < n; ++i) {
      u(i, j) = unif(rng) + 1e-3;
      total += u(i, j);
    }
    u.col(j) /= total;
  }
  return u;
}

}  // namespace

TEST_CASE("chain validation enforces the column convention") {
  CHECK_NOTHROW(validate_chain(three_state()));

  RMat bad(2, 2);
  bad << 0.5, 0.2, 0.4, 0.8;  // first column sums to 0.9
  CHECK_THROWS_AS(validate_chain(ClassicalChain{2, ChainKind::stochastic, bad}),
                  std::invalid_argument);

  RMat rate(2, 2);
  rate << -1, 2, 1, -2;
  CHECK_NOTHROW(validate_chain(ClassicalChain{2, ChainKind::rate, rate}));
  rate(0, 1) = -2;
  CHECK_THROWS_AS(validate_chain(ClassicalChain{2, ChainKind::rate, rate}),
                  std::invalid_argument);
}

TEST_CASE("the three-state chain conserves the observable but not its square") {
  NoetherVerdict v = classical_noether_discrete(three_state(), three_state_observable());
  CHECK(v.consistent);
  CHECK(group_uniform(v, 1, false));

  const Clause* obs = find_clause(v, "observable_conserved");
  REQUIRE(obs != nullptr);
  CHECK(obs->group == 0);
  CHECK(obs->holds);
  const Clause* sq = find_clause(v, "square_conserved");
  REQUIRE(sq != nullptr);
  CHECK_FALSE(sq->holds);
}

TEST_CASE("orbit-constant observables pass every discrete clause") {
  RMat swap(3, 3);
  swap << 0, 1, 0, 1, 0, 0, 0, 0, 1;
  RVec o(3);
  o << 2, 2, 5;
  NoetherVerdict v = classical_noether_discrete(ClassicalChain{3, ChainKind::stochastic, swap}, o);
  CHECK(v.consistent);
  CHECK(group_uniform(v, 1, true));

  CHECK_THROWS_AS(
      classical_noether_discrete(ClassicalChain{2, ChainKind::rate, RMat(RMat::Zero(2, 2))},
                                 RVec(RVec::Zero(2))),
      std::invalid_argument);
}

TEST_CASE("continuous clauses for rate matrices") {
  RMat h(3, 3);
  h << -1, 1, 0, 1, -1, 0, 0, 0, 0;  // exchange between the first two states
  ClassicalChain chain{3, ChainKind::rate, h};

  RVec keep(3);
  keep << 4, 4, -2;
  NoetherVerdict v = classical_noether_continuous(chain, keep);
  CHECK(v.consistent);
  CHECK(group_uniform(v, 1, true));

  RVec lose(3);
  lose << 1, -1, 0;
  NoetherVerdict w = classical_noether_continuous(chain, lose);
  CHECK(w.consistent);
  CHECK(group_uniform(w, 1, false));

  CHECK_THROWS_AS(classical_noether_continuous(three_state(), keep), std::invalid_argument);
}

TEST_CASE("counterexample search falls back below three states") {
  ClassicalCounterexample two = counterexample_search_classical(2, 77);
  CHECK(two.chain.states == 3);
  CHECK(two.note.find("no 2-state") != std::string::npos);

  ClassicalCounterexample four = counterexample_search_classical(4, 77);
  CHECK_NOTHROW(validate_chain(four.chain));
  CHECK(four.conservation_residual <= 1e-9);
  CHECK(four.square_violation > 1e-3);
  RVec o = four.observable;
  RVec o2 = o.array().square();
  CHECK((four.chain.matrix.transpose() * o - o).norm() <= 1e-9 * std::max(1.0, o.norm()));
  CHECK((four.chain.matrix.transpose() * o2 - o2).norm() > 1e-3);

  CHECK_THROWS_AS(counterexample_search_classical(1, 77), std::invalid_argument);
}

TEST_CASE("diagonal embedding of a stochastic matrix") {
  Rng rng(61);
  RMat u = random_stochastic(3, rng);
  auto embedded = embed_diagonal(ClassicalChain{3, ChainKind::stochastic, u});
  REQUIRE(std::holds_alternative<KrausChannel>(embedded));
  const KrausChannel& ch = std::get<KrausChannel>(embedded);
  CHECK(ch.picture == Picture::schrodinger);
  SuperOperator s = channel_super(ch);
  CHECK(s.is_trace_preserving());

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RVec p(3);
  for (int i = 0; i < 3; ++i) p(i) = unif(rng);
  p /= p.sum();
  Mat rho = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i) rho(i, i) = p(i);
  RVec up = u * p;
  Mat expect = Mat::Zero(3, 3);
  for (int i = 0; i < 3; ++i) expect(i, i) = up(i);
  CHECK(close(s.apply(rho), expect, 1e-12));

  // coherences die in one step
  CHECK(s.apply(matrix_unit(3, 0, 1)).norm() <= 1e-13);
}

TEST_CASE("diagonal embedding of a rate matrix") {
  RMat h(2, 2);
  h << -1, 2, 1, -2;
  auto embedded = embed_diagonal(ClassicalChain{2, ChainKind::rate, h});
  REQUIRE(std::holds_alternative<SemigroupSpec>(embedded));
  const SemigroupSpec& sg = std::get<SemigroupSpec>(embedded);
  CHECK(sg.completely_positive());

  RVec p(2);
  p << 0.3, 0.7;
  for (double t : {0.2, 1.0, 3.0}) {
    RVec pt = (t * h).exp() * p;
    Mat rho = Mat::Zero(2, 2);
    rho(0, 0) = p(0);
    rho(1, 1) = p(1);
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = pt(0);
    expect(1, 1) = pt(1);
    CHECK(close(evolve(sg, t).apply(rho), expect, 1e-10));
  }
}

TEST_CASE("embedding preserves the conservation verdict") {
  Rng rng(62);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  auto run_pair = [&](const ClassicalChain& chain, const RVec& o) {
    NoetherVerdict cv = chain.kind == ChainKind::stochastic
                            ? classical_noether_discrete(chain, o)
                            : classical_noether_continuous(chain, o);
    Mat diag_o = Mat::Zero(chain.states, chain.states);
    for (int i = 0; i < chain.states; ++i) diag_o(i, i) = o(i);
    auto embedded = embed_diagonal(chain);
    NoetherVerdict qv =
        std::holds_alternative<KrausChannel>(embedded)
            ? noether_discrete(channel_super(std::get<KrausChannel>(embedded)), diag_o, 62)
            : noether_continuous(std::get<SemigroupSpec>(embedded), diag_o, 62);
    CHECK(cv.consistent);
    CHECK(qv.consistent);
    CHECK(group_uniform(cv, 1, true) == group_uniform(qv, 1, true));
  };

  for (int trial = 0; trial < 6; ++trial) {
    RVec o(3);
    for (int i = 0; i < 3; ++i) o(i) = unif(rng);
    run_pair(ClassicalChain{3, ChainKind::stochastic, random_stochastic(3, rng)}, o);
  }

  // conserving instance: blocks with block-constant observables
  RMat block = RMat::Zero(4, 4);
  block.topLeftCorner(2, 2) = random_stochastic(2, rng);
  block.bottomRightCorner(2, 2) = random_stochastic(2, rng);
  RVec o(4);
  o << 3, 3, -1, -1;
  run_pair(ClassicalChain{4, ChainKind::stochastic, block}, o);

  RMat h(3, 3);
  h << -1, 1, 0, 1, -1, 0, 0, 0, 0;
  RVec oc(3);
  oc << 2, 2, 7;
  run_pair(ClassicalChain{3, ChainKind::rate, h}, oc);
}
