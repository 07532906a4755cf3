// Regenerates the JSON files under fixtures/. Run from the repository root
// (or pass the target directory) after changing any of the recipes here.
#include <cmath>
#include <complex>
#include <iostream>
#include <string>

#include "noetherq/classical.hpp"
#include "noetherq/io.hpp"

using namespace noetherq;
using io::json;

namespace {

json channel_json(int dim, Picture picture, const std::vector<Mat>& kraus) {
  KrausChannel ch{dim, kraus, picture};
  validate_channel(ch);
  return io::channel_to_json(ch);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "fixtures";
  const Complex i(0.0, 1.0);
  const double s2 = std::sqrt(0.5);

  Mat id2 = Mat::Identity(2, 2);
  Mat sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;

  io::save_file(dir + "/identity_d2.json", channel_json(2, Picture::schrodinger, {id2}));

  Mat e11 = Mat::Zero(2, 2), e22 = Mat::Zero(2, 2);
  e11(0, 0) = 1;
  e22(1, 1) = 1;
  io::save_file(dir + "/pinching_d2.json", channel_json(2, Picture::schrodinger, {e11, e22}));

  // Lüders instrument of the two spin-x effects.
  Mat p_plus = (id2 + sx) / 2.0;
  Mat p_minus = (id2 - sx) / 2.0;
  io::save_file(dir + "/luders_plus_d2.json",
                io::channel_to_json(build_luders({p_plus, p_minus})));

  io::save_file(dir + "/unitary_sx_d2.json", channel_json(2, Picture::schrodinger, {sx}));

  Mat u3 = Mat::Zero(3, 3);
  u3(0, 0) = 1;
  u3(1, 1) = std::exp(i * (M_PI / 4.0));
  u3(2, 2) = std::exp(i * (M_PI / 3.0));
  io::save_file(dir + "/unitary_phase_d3.json", channel_json(3, Picture::schrodinger, {u3}));

  io::save_file(dir + "/depolarizing_d2.json",
                channel_json(2, Picture::schrodinger,
                             {id2 / 2.0, sx / 2.0, Mat(sy / 2.0), sz / 2.0}));

  {
    json j;
    j["dim"] = 2;
    j["pipeline"] = json::array({json{{"transpose", true}}});
    io::save_file(dir + "/transpose_d2.json", j);
  }

  {
    // Convex mix of the transpose and the diagonal pinching: positive and
    // trace preserving but not completely positive.
    json j;
    j["dim"] = 2;
    json part1;
    part1["weight"] = 0.5;
    part1["pipeline"] = json::array({json{{"transpose", true}}});
    json part2;
    part2["weight"] = 0.5;
    part2["pipeline"] = json::array({channel_json(2, Picture::schrodinger, {e11, e22})});
    j["mixture"] = json::array({part1, part2});
    io::save_file(dir + "/mixed_transpose_d2.json", j);
  }

  {
    LindbladGenerator g;
    g.dim = 2;
    g.lindblad = {sz};
    io::save_file(dir + "/dephasing_d2.json", io::lindblad_to_json(g));
  }

  // Compression to the top 2x2 corner plus a trace dump into the third
  // state. Unital on the operator side, so the heisenberg form is the
  // normalized one; its trace dual is the trace-preserving state-side form.
  {
    Mat p = Mat::Zero(3, 3);
    p(0, 0) = 1;
    p(1, 1) = 1;
    Mat e31 = Mat::Zero(3, 3), e32 = Mat::Zero(3, 3);
    e31(2, 0) = s2;
    e32(2, 1) = s2;
    KrausChannel heis{3, {p, e31, e32}, Picture::heisenberg};
    validate_channel(heis);
    io::save_file(dir + "/m3_heisenberg.json", io::channel_to_json(heis));
    io::save_file(dir + "/m3_schrodinger.json", io::channel_to_json(channel_dual(heis)));
  }

  {
    RMat u(3, 3);
    u << 1, 0, 0.5, 0, 1, 0.5, 0, 0, 0;
    io::save_file(dir + "/chain_3state.json",
                  io::chain_to_json(ClassicalChain{3, ChainKind::stochastic, u}));
    json o;
    o["states"] = 3;
    o["values"] = json::array({1, -1, 0});
    io::save_file(dir + "/obs_3state.json", o);
  }

  {
    json o;
    o["dim"] = 2;
    o["matrix"] = io::to_json(sz);
    io::save_file(dir + "/sz_d2.json", o);

    json p0;
    p0["dim"] = 2;
    p0["matrix"] = io::to_json(e11);
    io::save_file(dir + "/proj0_d2.json", p0);

    Mat a = Mat::Zero(3, 3);
    a(0, 0) = 1;
    a(2, 2) = 0.5;
    json am;
    am["dim"] = 3;
    am["matrix"] = io::to_json(a);
    io::save_file(dir + "/a_m3.json", am);
  }

  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}
