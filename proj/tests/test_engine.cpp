#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kam/engine.hpp"

using namespace kam;
static const cplx I(0.0, 1.0);

namespace {

TorusFourier mkf(const ivec& idx,
                 std::initializer_list<std::pair<ivec, cplx>> cs) {
  TorusFourier f;
  f.index_set = idx;
  for (auto& [k, c] : cs) f.coeffs[k] = c;
  return f;
}

MonoKey key(ivec k, ivec l, ZPow a, ZPow b) { return MonoKey{k, l, a, b}; }

}  // namespace

TEST_CASE("schedule formulas") {
  ScheduleSeeds sd;
  auto r3 = schedules(3, sd);
  CHECK(r3.s == doctest::Approx(0.125));
  CHECK(r3.sigma == doctest::Approx(0.125 / 20));
  CHECK(r3.K == 8);
  CHECK(r3.tau == 40.0);
  CHECK(r3.Lambda == 40.0);
  CHECK(r3.iota == doctest::Approx(512.0));
  CHECK(r3.gamma == doctest::Approx(std::sqrt(r3.eps)));
  CHECK(r3.rho ==
        doctest::Approx(0.5 * (1 - 0.1 - 1.0 / 40 - 1.0 / 90)));
  CHECK(r3.m == doctest::Approx(0.05 * (9 + 0.125)));
  CHECK(r3.alpha_stage.size() == 4);
  CHECK(r3.alpha_stage[2] ==
        doctest::Approx(0.25 / 10 * (9 + 0.125)));
  CHECK(r3.J == ivec{-4, -3, -2, -1, 1, 2, 3, 4});

  ScheduleSeeds sd2;
  sd2.eps0 = 1e-4;
  CHECK(schedules(1, sd2).eps == doctest::Approx(1e-5));

  auto r0 = schedules(0, sd);
  CHECK(r0.K == 1);
  CHECK(r0.tau == 10.0);
  CHECK(r0.Lambda == 10.0);
  CHECK(r0.beta == 1.0);
}

TEST_CASE("diagonalize: constant frequency is identity") {
  NormalForm N;
  N.omega = {{-1, 1.3247179572447}, {1, 1.0}};
  N.Omega_const = {{2, 4.0}};
  HamiltonianPoly P;
  P.tangent = {-1, 1};
  P.add_term(key({1, 0}, {0, 0}, {{2, 1}}, {{3, 1}}), 0.01,
             AnalyticityWindow{});
  auto P0 = P;
  DiophantineProfile prof;
  prof.alpha = 1e-6;
  AnalyticityWindow w;
  auto rep = diagonalize_normal_frequency(N, P, 2, prof, w, 32);
  CHECK(rep.F.is_zero());
  CHECK(rep.jac_bound == 1.0);
  CHECK(P.terms == P0.terms);
}

TEST_CASE("diagonalize: elimination and substitution oracle") {
  NormalForm N;
  N.omega = {{-1, 1.3247179572447}, {1, 1.0}};
  N.Omega_const = {{2, 4.1}, {3, 9.07}};
  N.Omega_stages[2] = {
      mkf({1}, {{{1}, cplx(0.005)}, {{-1}, cplx(0.005)}})};
  AnalyticityWindow w;
  w.s = 0.4;
  HamiltonianPoly P;
  P.tangent = {-1, 1};
  P.degree_cap = 6;
  P.add_term(key({0, 1}, {0, 0}, {{2, 1}}, {{3, 1}}), 0.02, w);
  P.add_term(key({1, 0}, {0, 1}, {}, {}), cplx(0.3), w);  // y_1 term
  P.add_term(key({0, 0}, {0, 0}, {{2, 2}}, {}), 0.05, w); // z_2^2
  auto P0 = P;
  DiophantineProfile prof;
  prof.alpha = 1e-6;
  prof.gamma_stages = {0.05};
  auto rep = diagonalize_normal_frequency(N, P, 2, prof, w, 48);

  CHECK(rep.nonconst_residual < 1e-10);
  CHECK(N.Omega_stages.count(2) == 0);
  CHECK(N.Omega_const[2] == doctest::Approx(4.1));
  CHECK(rep.jac_sample_max <= rep.jac_bound * (1 + 1e-12));

  // pointwise oracle: P_new(pt) = P_old(Phi(pt))
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    PhasePoint pt;
    pt.x[-1] = cplx(U(rng) * M_PI, 0.0);
    pt.x[1] = cplx(U(rng) * M_PI, 0.0);
    pt.y[-1] = cplx(0.003 * U(rng));
    pt.y[1] = cplx(0.003 * U(rng));
    for (int m : {2, 3}) {
      pt.z[m] = 0.05 * cplx(U(rng), U(rng));
      pt.zbar[m] = 0.05 * cplx(U(rng), U(rng));
    }
    std::vector<cplx> xv{pt.x[-1], pt.x[1]};
    cplx Fv = eval(aligned(rep.F, {-1, 1}), xv);
    PhasePoint mapped = pt;
    cplx zz = pt.z[2] * pt.zbar[2];
    for (int lab : {-1, 1}) {
      TorusFourier g = d_angle(aligned(rep.F, {-1, 1}), lab);
      mapped.y[lab] = pt.y[lab] + eval(g, xv) * zz;
    }
    mapped.z[2] = pt.z[2] * std::exp(2.0 * I * Fv);
    mapped.zbar[2] = pt.zbar[2] * std::exp(-2.0 * I * Fv);
    CHECK(std::abs(eval_poly(P, pt) - eval_poly(P0, mapped)) < 1e-12);
  }
}

TEST_CASE("excite: even powers substitute exactly") {
  AnalyticityWindow w;
  w.r = 0.05;
  NormalForm N;
  N.omega = {{-1, 1.3247179572447}, {1, 1.0}};
  N.Omega_const = {{2, 4.1}, {-2, 4.18}, {4, 16.3}, {-4, 16.4}};

  HamiltonianPoly P;
  P.tangent = {-1, 1};
  P.add_term(key({0, 0}, {0, 0}, {{4, 1}}, {{4, 1}}), 1.0, w);       // z zbar
  P.add_term(key({0, 0}, {0, 0}, {{4, 2}}, {{4, 2}}), 1.0, w);       // |z|^4
  P.add_term(key({0, 0}, {0, 0}, {{2, 1}, {4, 1}}, {{2, 1}, {4, 1}}), 1.0, w);
  CHECK(check_momentum_mass(P).momentum_ok);

  double tail = 0.0;
  excite_oscillators(N, P, 4, 0.01, 0.01, w, 6, &tail);
  CHECK(tail == 0.0);  // all substitutions exact
  CHECK(N.omega.count(4) == 1);
  CHECK(N.omega[4] == doctest::Approx(2 * 16.3));
  CHECK(P.tangent == ivec{-4, -1, 1, 4});

  // z_4 zbar_4 -> 2(I + y_4): constant 2I and linear 2 y_4
  ivec zk(4, 0);
  CHECK(std::abs(P.at(key(zk, {0, 0, 0, 0}, {}, {})) -
                 cplx(2 * 0.01 + 4 * 0.01 * 0.01)) < 1e-15);
  CHECK(std::abs(P.at(key(zk, {0, 0, 0, 1}, {}, {})) -
                 cplx(2.0 + 8 * 0.01)) < 1e-15);
  CHECK(std::abs(P.at(key(zk, {0, 0, 0, 2}, {}, {})) - cplx(4.0)) < 1e-15);
  // z_2 zbar_2 z_4 zbar_4 -> 2(I+y_4) z_2 zbar_2
  CHECK(std::abs(P.at(key(zk, {0, 0, 0, 1}, {{2, 1}}, {{2, 1}})) - cplx(2.0)) <
        1e-15);
  CHECK(check_momentum_mass(P).momentum_ok);
  CHECK(check_momentum_mass(P).mass_ok);
}

TEST_CASE("excite: odd power binomial series vs pointwise oracle") {
  AnalyticityWindow w;
  w.r = 0.05;
  NormalForm N;
  N.omega = {{1, 1.0}, {-1, 1.3247179572447}};
  N.Omega_const = {{2, 4.1}, {-2, 4.18}};
  HamiltonianPoly P;
  P.tangent = {-1, 1};
  P.degree_cap = 24;
  P.add_term(key({0, 0}, {0, 0}, {{2, 1}}, {}), 1.0, w);  // bare z_2
  double I2 = 0.04;
  double tail = 0.0;
  excite_oscillators(N, P, 2, I2, I2, w, 12, &tail);
  PhasePoint pt;
  pt.x[-2] = pt.x[-1] = pt.x[1] = cplx(0.0);
  pt.x[2] = cplx(0.7);
  pt.y[-2] = pt.y[-1] = pt.y[1] = cplx(0.0);
  pt.y[2] = cplx(0.002);
  cplx expect = std::sqrt(2.0 * (I2 + 0.002)) * std::exp(I * 0.7);
  CHECK(std::abs(eval_poly(P, pt) - expect) < 1e-10);

  // refuse when the domain radius reaches the action
  HamiltonianPoly Q;
  Q.tangent = {-2, -1, 1, 2};
  NormalForm N2;
  N2.Omega_const = {{3, 9.0}, {-3, 9.1}};
  AnalyticityWindow wbig;
  wbig.r = 0.2;
  CHECK_THROWS_AS(excite_oscillators(N2, Q, 3, 0.01, 0.01, wbig, 6, nullptr),
                  RadiusViolation);
}

TEST_CASE("lie_flow: trivial and series structure") {
  AnalyticityWindow w;
  HamiltonianPoly G;
  G.tangent = {1};
  G.add_term(key({1}, {0}, {}, {}), 0.3, w);
  G.add_term(key({0}, {0}, {{2, 1}}, {{2, 1}}), 1.0, w);
  HamiltonianPoly F0;
  F0.tangent = {1};
  auto G1 = lie_flow_apply(F0, G, 8, w, 1e-15);
  CHECK(G1.terms == G.terms);

  HamiltonianPoly F;
  F.tangent = {1};
  F.add_term(key({1}, {0}, {{2, 1}}, {{3, 1}}), 0.05, w);
  F.add_term(key({-1}, {0}, {{3, 1}}, {{2, 1}}), 0.05, w);
  auto q1 = lie_flow_apply(F, G, 1, w, 0.0);
  auto q2 = lie_flow_apply(F, G, 2, w, 0.0);
  auto diff = q2;
  diff -= q1;
  auto expect = poisson_bracket(poisson_bracket(G, F, w), F, w);
  expect *= cplx(0.5);
  diff -= expect;
  CHECK(poly_majorant(diff, w) < 1e-15);
}

TEST_CASE("lie_flow: bracket preservation (symplecticity)") {
  AnalyticityWindow w;
  HamiltonianPoly F;
  F.tangent = {1};
  F.jmax = 4;
  F.degree_cap = 10;
  F.add_term(key({1}, {0}, {{2, 1}}, {{3, 1}}), 0.01, w);
  F.add_term(key({-1}, {0}, {{3, 1}}, {{2, 1}}), 0.01, w);
  F.add_term(key({2}, {1}, {}, {}), 0.01, w);

  std::vector<HamiltonianPoly> probes;
  {
    HamiltonianPoly f;
    f.tangent = {1};
    f.degree_cap = 10;
    f.add_term(key({1}, {0}, {}, {}), 1.0, w);  // e^{ix}
    probes.push_back(f);
    HamiltonianPoly g = f;
    g.terms.clear();
    g.add_term(key({0}, {1}, {}, {}), 1.0, w);  // y
    probes.push_back(g);
    HamiltonianPoly h = f;
    h.terms.clear();
    h.add_term(key({0}, {0}, {{2, 1}}, {}), 1.0, w);  // z_2
    probes.push_back(h);
    HamiltonianPoly hb = f;
    hb.terms.clear();
    hb.add_term(key({0}, {0}, {}, {{2, 1}}), 1.0, w);  // zbar_2
    probes.push_back(hb);
  }
  // {f o Phi, g o Phi} = {f, g} o Phi for the flow Phi = X_F^1
  for (size_t i = 0; i < probes.size(); ++i)
    for (size_t j = i + 1; j < probes.size(); ++j) {
      auto fi = lie_flow_apply(F, probes[i], 12, w, 1e-16);
      auto fj = lie_flow_apply(F, probes[j], 12, w, 1e-16);
      auto lhs = poisson_bracket(fi, fj, w);
      auto rhs = lie_flow_apply(F, poisson_bracket(probes[i], probes[j], w),
                                12, w, 1e-16);
      lhs -= rhs;
      CHECK(poly_majorant(lhs, w) < 1e-6);
    }
}

static KamState make_state(double eps_scale) {
  KamState st;
  st.w.s = 1.0;
  st.w.r = 0.05;
  st.N.omega = {{-1, 1.3247179572447}, {1, 1.0}};
  st.N.Omega_const = {{2, 4.1007}, {-2, 4.1803},
                      {3, 9.0702}, {-3, 9.1301},
                      {4, 16.0407}, {-4, 16.1105}};
  st.N.Omega_stages[3] = {
      mkf({-1, 1}, {{{0, 1}, cplx(0.002)}, {{0, -1}, cplx(0.002)}})};
  st.P.tangent = {-1, 1};
  st.P.jmax = 4;
  AnalyticityWindow w = st.w;
  st.P.add_term(key({1, 0}, {0, 0}, {}, {}), eps_scale * cplx(0.5, 0.0), w);
  st.P.add_term(key({-1, 0}, {0, 0}, {}, {}), eps_scale * cplx(0.5, 0.0), w);
  st.P.add_term(key({0, 1}, {0, 0}, {}, {}), eps_scale * cplx(0.0, -0.5), w);
  st.P.add_term(key({0, -1}, {0, 0}, {}, {}), eps_scale * cplx(0.0, 0.5), w);
  st.seeds.eps0 = 1e-3;
  st.seeds.r0 = st.w.r;
  st.I = {{2, 1e-2}, {-2, 1e-2}, {3, 1e-2}, {-3, 1e-2}};
  return st;
}

TEST_CASE("kam_step: zero perturbation stays zero") {
  KamState st = make_state(0.0);
  st.P.terms.clear();
  auto row = schedules(0, st.seeds);
  EngineConfig cfg;
  auto rep = kam_step(st, row, cfg);
  CHECK(rep.eps_next < 1e-14);
  CHECK(st.N.omega.count(2) == 1);   // tangent grew
  CHECK(st.N.omega.count(-2) == 1);
  CHECK(st.N.Omega_const.count(2) == 0);
  CHECK(st.P.is_zero());
}

TEST_CASE("kam_step: angle-only perturbation is annihilated") {
  KamState st = make_state(2.5e-6);  // vf majorant = 2 * 2.5e-6 / r^2 = 2e-3
  auto row = schedules(0, st.seeds);
  EngineConfig cfg;
  auto rep = kam_step(st, row, cfg);
  CHECK(rep.eps_measured > 1e-4);
  CHECK(rep.eps_next < rep.eps_measured / 10.0);
  CHECK(rep.max_block_residual < 1e-9);
}

TEST_CASE("kam_step: tangential drift equals the y-average") {
  KamState st = make_state(1e-6);
  AnalyticityWindow w = st.w;
  double c0 = 1e-4;
  st.P.add_term(key({0, 0}, {0, 1}, {}, {}), c0, w);
  st.P.add_term(key({1, 0}, {0, 1}, {}, {}), 5e-5, w);
  st.P.add_term(key({-1, 0}, {0, 1}, {}, {}), 5e-5, w);
  st.P.add_term(key({0, 1}, {0, 0}, {{2, 1}}, {{2, 1}}), 2e-5, w);
  double om1_old = st.N.omega[1];
  auto row = schedules(0, st.seeds);
  EngineConfig cfg;
  auto rep = kam_step(st, row, cfg);
  CHECK(std::abs((st.N.omega[1] - om1_old) - c0) < 1e-7);
  CHECK(rep.omega_drift >= c0 - 1e-7);
  CHECK(rep.min_divisor < 1e300);
}
