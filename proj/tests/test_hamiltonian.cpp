#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kam/hamiltonian.hpp"

using namespace kam;

static AnalyticityWindow loose_window() {
  AnalyticityWindow w;
  w.s = 0.5;
  w.r = 0.1;
  w.a = 0.0;
  w.p = 2.0;
  return w;
}

static HamiltonianPoly empty_poly(ivec tangent, int jmax = 8, int dcap = 12,
                                  int kcap = 1000) {
  HamiltonianPoly P;
  P.tangent = std::move(tangent);
  P.jmax = jmax;
  P.degree_cap = dcap;
  P.kcap = kcap;
  return P;
}

static MonoKey key(ivec k, ivec l, ZPow a = {}, ZPow b = {}) {
  MonoKey m;
  m.k = std::move(k);
  m.l = std::move(l);
  m.alpha = std::move(a);
  m.beta = std::move(b);
  return m;
}

static HamiltonianPoly random_poly(std::mt19937_64& rng, ivec tangent,
                                   std::vector<int> zmodes, int nterms,
                                   int maxdeg) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> Kd(-2, 2), Ld(0, 1), Zd(0, 1);
  auto P = empty_poly(tangent);
  auto w = loose_window();
  for (int t = 0; t < nterms; ++t) {
    MonoKey m;
    for (size_t i = 0; i < tangent.size(); ++i) {
      m.k.push_back(Kd(rng));
      m.l.push_back(Ld(rng));
    }
    ZPow a, b;
    for (int j : zmodes) {
      if (Zd(rng)) a = zpow_set(a, j, 1);
      if (Zd(rng)) b = zpow_set(b, j, 1);
    }
    m.alpha = a;
    m.beta = b;
    int ltot = 0;
    for (int li : m.l) ltot += li;
    if (2 * ltot + zpow_total(a) + zpow_total(b) > maxdeg) continue;
    P.add_term(m, cplx(U(rng), U(rng)), w);
  }
  return P;
}

static double poly_dist(const HamiltonianPoly& A, const HamiltonianPoly& B) {
  HamiltonianPoly D = A;
  D -= B;
  double m = 0.0;
  for (auto& [k, c] : D.terms) m = std::max(m, std::abs(c));
  return m;
}

TEST_CASE("coordinate brackets") {
  auto w = loose_window();
  auto F = empty_poly({1});
  F.add_term(key({1}, {0}), 1.0, w);  // e^{i x_1}
  auto G = empty_poly({1});
  G.add_term(key({0}, {1}), 1.0, w);  // y_1
  auto B = poisson_bracket(F, G, w);
  CHECK(B.terms.size() == 1);
  CHECK(std::abs(B.at(key({1}, {0})) - cplx(0.0, 1.0)) < 1e-15);

  // {z_j zbar_j, F} with F independent of z_j, zbar_j, x -> 0
  auto ZZ = empty_poly({1});
  ZZ.add_term(key({0}, {0}, {{3, 1}}, {{3, 1}}), 1.0, w);
  auto H = empty_poly({1});
  H.add_term(key({0}, {1}, {{4, 1}}, {{4, 1}}), 2.0, w);
  CHECK(poisson_bracket(ZZ, H, w).is_zero());

  // {N, z_j zbar_j} with N = sum omega y -> 0
  auto N = empty_poly({1});
  N.add_term(key({0}, {1}), 1.7, w);
  CHECK(poisson_bracket(N, ZZ, w).is_zero());
}

TEST_CASE("bracket with variable Omega against hand expansion") {
  // N = omega_1 y_1 + Omega(x_1) z_2 zbar_2, Omega = e^{i x_1} + e^{-i x_1};
  // F = f(x) y_1 with f = e^{i x_1}.  Hand expansion of {N, F}:
  //   sum_i N_{x_i} F_{y_i} - N_{y_i} F_{x_i}
  // = dOmega/dx_1 z zbar f(x)  -  omega_1 * i f(x) y_1
  auto w = loose_window();
  double omega1 = 1.3;
  auto N = empty_poly({1});
  N.add_term(key({0}, {1}), omega1, w);
  N.add_term(key({1}, {0}, {{2, 1}}, {{2, 1}}), 1.0, w);
  N.add_term(key({-1}, {0}, {{2, 1}}, {{2, 1}}), 1.0, w);
  auto F = empty_poly({1});
  F.add_term(key({1}, {1}), 1.0, w);
  auto B = poisson_bracket(N, F, w);
  // dOmega/dx_1 * f: i(e^{ix}-e^{-ix}) e^{ix} = i e^{2ix} - i
  CHECK(std::abs(B.at(key({2}, {0}, {{2, 1}}, {{2, 1}})) - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(B.at(key({0}, {0}, {{2, 1}}, {{2, 1}})) - cplx(0.0, -1.0)) < 1e-15);
  // -omega_1 i f y_1
  CHECK(std::abs(B.at(key({1}, {1})) - cplx(0.0, -omega1)) < 1e-15);
  CHECK(B.terms.size() == 3);
}

TEST_CASE("bracket antisymmetry and Jacobi") {
  std::mt19937_64 rng(5);
  auto w = loose_window();
  for (int trial = 0; trial < 5; ++trial) {
    auto F = random_poly(rng, {1, 2}, {3, 4}, 8, 3);
    auto G = random_poly(rng, {1, 2}, {3, 4}, 8, 3);
    auto H = random_poly(rng, {1, 2}, {3, 4}, 8, 3);
    auto FG = poisson_bracket(F, G, w);
    auto GF = poisson_bracket(G, F, w);
    GF *= cplx(-1.0);
    CHECK(poly_dist(FG, GF) < 1e-12);

    auto J1 = poisson_bracket(F, poisson_bracket(G, H, w), w);
    auto J2 = poisson_bracket(G, poisson_bracket(H, F, w), w);
    auto J3 = poisson_bracket(H, poisson_bracket(F, G, w), w);
    J1 += J2;
    J1 += J3;
    double m = 0.0;
    for (auto& [k, c] : J1.terms) m = std::max(m, std::abs(c));
    CHECK(m < 1e-12);
  }
}

TEST_CASE("parallel bracket kernel is identical to serial") {
  std::mt19937_64 rng(23);
  auto w = loose_window();
  auto F = random_poly(rng, {1, 2}, {3, 4}, 30, 4);
  auto G = random_poly(rng, {1, 2}, {3, 4}, 30, 4);
  auto A = poisson_bracket(F, G, w, false);
  auto B = poisson_bracket(F, G, w, true);
  REQUIRE(A.terms.size() == B.terms.size());
  for (auto& [k, c] : A.terms) CHECK(B.at(k) == c);  // bit-identical
}

TEST_CASE("momentum and mass conservation") {
  auto w = loose_window();
  auto P = empty_poly({1});
  P.add_term(key({0}, {0}, {{2, 1}}, {{2, 1}}), 1.0, w);
  auto rep = check_momentum_mass(P);
  CHECK(rep.momentum_ok);
  CHECK(rep.mass_ok);

  auto Q = empty_poly({1});
  Q.add_term(key({0}, {0}, {{1, 1}}, {{2, 1}}), 1.0, w);
  auto rq = check_momentum_mass(Q);
  CHECK_FALSE(rq.momentum_ok);
  CHECK(rq.mass_ok);
  CHECK(rq.violations.size() == 1);

  // closure under bracket: conserving x conserving -> conserving
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  // tangent {-1,1}; k vector is (k_{-1}, k_1)
  auto A = empty_poly({-1, 1});
  // e^{i(-x_{-1}+x_1)} z_2 zbar_4: momentum 1+1+2-4 = 0, mass -1+1+1-1 = 0
  A.add_term(key({-1, 1}, {0, 0}, {{2, 1}}, {{4, 1}}), cplx(U(rng), U(rng)), w);
  A.add_term(key({0, 0}, {1, 0}), cplx(U(rng), 0.0), w);  // y_{-1}
  REQUIRE(check_momentum_mass(A).momentum_ok);
  REQUIRE(check_momentum_mass(A).mass_ok);
  auto C = empty_poly({-1, 1});
  // mirror image: momentum -1-1+4-2 = 0, mass 0
  C.add_term(key({1, -1}, {0, 0}, {{4, 1}}, {{2, 1}}), cplx(U(rng), U(rng)), w);
  C.add_term(key({0, 0}, {0, 1}), cplx(U(rng), 0.0), w);  // y_1
  REQUIRE(check_momentum_mass(C).momentum_ok);
  REQUIRE(check_momentum_mass(C).mass_ok);
  auto BC = poisson_bracket(A, C, w);
  REQUIRE_FALSE(BC.is_zero());
  CHECK(check_momentum_mass(BC).momentum_ok);
  CHECK(check_momentum_mass(BC).mass_ok);
}

TEST_CASE("taylor truncation") {
  auto w = loose_window();
  auto P = empty_poly({1});
  P.add_term(key({0}, {1}), 1.0, w);                        // y_1
  P.add_term(key({0}, {2}), 1.0, w);                        // y_1^2 (excluded)
  P.add_term(key({1}, {0}, {{2, 1}}, {}), 0.5, w);          // z_2 e^{ix}
  P.add_term(key({0}, {0}, {{2, 1}, {3, 1}}, {}), 0.25, w); // z_2 z_3
  P.add_term(key({0}, {0}, {{2, 2}}, {{2, 2}}), 2.0, w);    // degree 4
  auto [R, rest] = taylor_truncate_R(P);
  CHECK(R.terms.size() == 3);
  CHECK(rest.terms.size() == 2);
  auto back = R;
  back += rest;
  CHECK(poly_dist(back, P) == 0.0);

  // quadratic P is its own truncation
  auto Q = empty_poly({1});
  Q.add_term(key({0}, {0}, {{2, 1}}, {{2, 1}}), 1.0, w);
  auto [RQ, restQ] = taylor_truncate_R(Q);
  CHECK(restQ.is_zero());
  CHECK(poly_dist(RQ, Q) == 0.0);
}

TEST_CASE("block split and reassembly") {
  std::mt19937_64 rng(13);
  auto P = random_poly(rng, {1, 2}, {3, 4, -3}, 25, 2);
  auto [R, rest] = taylor_truncate_R(P);
  auto blocks = split_blocks(R);
  auto back = assemble_blocks(blocks, R.tangent, R.jmax, R.degree_cap, R.kcap);
  CHECK(poly_dist(back, R) < 1e-15);
}

TEST_CASE("vf_norm basics") {
  auto w = loose_window();
  auto Z = empty_poly({1});
  CHECK(vf_norm(Z, w).majorant == 0.0);

  auto P = empty_poly({1});
  P.add_term(key({0}, {1}), 1.0, w);  // y_1: X-component = 1
  auto n = vf_norm(P, w, 10);
  CHECK(n.majorant == doctest::Approx(1.0));
  CHECK(n.sampled == doctest::Approx(1.0).epsilon(1e-10));

  // homogeneity
  auto Q = empty_poly({1});
  Q.add_term(key({0}, {0}, {{2, 1}}, {{2, 1}}), 1.0, w);
  double v1 = vf_norm(Q, w).majorant;
  auto Qc = Q;
  Qc *= cplx(3.0);
  CHECK(vf_norm(Qc, w).majorant == doctest::Approx(3.0 * v1));

  // majorant dominates sampled
  std::mt19937_64 rng(31);
  auto Rr = random_poly(rng, {1}, {2, 3}, 12, 3);
  auto nr = vf_norm(Rr, w, 50);
  CHECK(nr.majorant >= nr.sampled);
}

TEST_CASE("lipschitz seminorm") {
  auto w = loose_window();
  // P independent of sigma -> 0
  auto fam0 = [&](const std::map<int, double>&) {
    auto P = empty_poly({1});
    P.add_term(key({0}, {1}), 1.0, w);
    return P;
  };
  std::vector<std::pair<std::map<int, double>, std::map<int, double>>> pairs = {
      {{{1, 0.1}}, {{1, 0.3}}}};
  CHECK(lipschitz_seminorm(fam0, pairs, w) == 0.0);

  // P = sigma_1 y_1: slope 1 exactly
  auto fam1 = [&](const std::map<int, double>& s) {
    auto P = empty_poly({1});
    P.add_term(key({0}, {1}), s.at(1), w);
    return P;
  };
  CHECK(lipschitz_seminorm(fam1, pairs, w) == doctest::Approx(1.0).epsilon(1e-12));

  // random linear family matches the analytic slope
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double c2 = U(rng);
  auto fam2 = [&](const std::map<int, double>& s) {
    auto P = empty_poly({1});
    P.add_term(key({0}, {1}), c2 * s.at(1), w);
    return P;
  };
  CHECK(lipschitz_seminorm(fam2, pairs, w) ==
        doctest::Approx(std::abs(c2)).epsilon(1e-12));

  std::vector<std::pair<std::map<int, double>, std::map<int, double>>> bad = {
      {{{1, 0.1}}, {{1, 0.1}}}};
  CHECK_THROWS_AS(lipschitz_seminorm(fam1, bad, w), DegeneratePair);
}

TEST_CASE("reality preservation") {
  auto w = loose_window();
  auto P = empty_poly({1});
  P.add_term(key({1}, {0}, {{2, 1}}, {}), cplx(0.5, 0.25), w);
  P.add_term(key({-1}, {0}, {}, {{2, 1}}), cplx(0.5, -0.25), w);
  REQUIRE(poly_real_symmetric(P, 0.0));
  auto Q = empty_poly({1});
  Q.add_term(key({0}, {1}), 2.0, w);
  REQUIRE(poly_real_symmetric(Q, 0.0));
  CHECK(poly_real_symmetric(poisson_bracket(P, Q, w), 1e-15));
  auto [R, rest] = taylor_truncate_R(P);
  CHECK(poly_real_symmetric(R, 1e-15));
  auto Pc = P;
  Pc *= cplx(2.5);
  CHECK(poly_real_symmetric(Pc, 1e-15));
}

TEST_CASE("normal form to poly") {
  NormalForm N;
  N.omega = {{-1, 0.9}, {1, 1.1}};
  N.Omega_const = {{2, 4.2}, {-2, 4.1}};
  TorusFourier st;
  st.index_set = {-1, 1};
  st.set({0, 1}, cplx(0.0, 0.5));
  st.set({0, -1}, cplx(0.0, -0.5));
  N.Omega_stages[2] = {st};
  auto P = N.to_poly({-1, 1}, 4, 4, 100);
  CHECK(std::abs(P.at(key({0, 0}, {0, 1})) - cplx(1.1)) < 1e-15);
  CHECK(std::abs(P.at(key({0, 0}, {0, 0}, {{2, 1}}, {{2, 1}})) - cplx(4.2)) < 1e-15);
  CHECK(std::abs(P.at(key({0, 1}, {0, 0}, {{2, 1}}, {{2, 1}})) - cplx(0.0, 0.5)) < 1e-15);
  CHECK(std::abs(eval(N.Omega_total(2), std::vector<cplx>{cplx(0), cplx(0)}) -
                 cplx(4.2)) < 1e-15);
}
