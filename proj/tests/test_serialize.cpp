#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kam/dnls.hpp"
#include "kam/serialize.hpp"

using namespace kam;

TEST_CASE("torus fourier json round trip") {
  TorusFourier f;
  f.index_set = {-2, 1};
  f.cutoff = 16;
  f.coeffs[{0, 0}] = cplx(1.5, 0.0);
  f.coeffs[{1, -3}] = cplx(-0.25, 0.75);
  f.coeffs[{-2, 2}] = cplx(0.0, 1e-14);

  json j = to_json(f);
  CHECK(j["index_set"] == json::array({-2, 1}));
  CHECK(j["cutoff"] == 16);
  CHECK(j["coeffs"].size() == 3);

  TorusFourier g = fourier_from_json(j);
  CHECK(g.index_set == f.index_set);
  CHECK(g.cutoff == f.cutoff);
  CHECK(g.coeffs == f.coeffs);
  CHECK(to_json(g).dump() == j.dump());  // byte-identical re-dump
}

TEST_CASE("hamiltonian polynomial round trip on the dnls instance") {
  DnlsConfig cfg;
  cfg.jmax = 4;
  cfg.sigma = {{1, 0.1}, {-1, 0.2}, {2, 0.3}};
  HamiltonianPoly H = build_hamiltonian(cfg);
  CHECK(!H.is_zero());

  json j = to_json(H);
  HamiltonianPoly H2 = poly_from_json(j);
  CHECK(H2.tangent == H.tangent);
  CHECK(H2.jmax == H.jmax);
  CHECK(H2.degree_cap == H.degree_cap);
  CHECK(H2.kcap == H.kcap);
  CHECK(H2.terms == H.terms);
  CHECK(H2.tail == H.tail);
  CHECK(to_json(H2).dump() == j.dump());

  // terms appear in container (lexicographic key) order
  auto it = H.terms.begin();
  for (auto& e : j["terms"]) {
    CHECK(e["k"].get<ivec>() == it->first.k);
    ++it;
  }
}

TEST_CASE("normal form round trip") {
  NormalForm N;
  N.omega = {{-1, 1.1}, {1, 1.2}};
  N.Omega_const = {{2, 2.15}, {-2, 2.05}};
  N.Omega_stages[2].push_back(
      TorusFourier::mode({-1, 1}, {1, -1}, cplx(0.0, 0.5)));

  NormalForm M = normal_form_from_json(to_json(N));
  CHECK(M.omega == N.omega);
  CHECK(M.Omega_const == N.Omega_const);
  REQUIRE(M.Omega_stages.count(2) == 1);
  CHECK(M.Omega_stages[2].size() == 1);
  CHECK(M.Omega_stages[2][0].coeffs == N.Omega_stages[2][0].coeffs);
  CHECK(M.Omega_total(2).at({1, -1}) == cplx(0.0, 0.5));
}

TEST_CASE("config hash: deterministic, order- and value-sensitive") {
  json a = {{"seed", 7}, {"eps0", 1e-3}};
  json b = {{"seed", 7}, {"eps0", 1e-3}};
  json c = {{"seed", 8}, {"eps0", 1e-3}};
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(!config_hash(a).empty());
}

TEST_CASE("solver report carries residuals and divisor minima") {
  BlockSolveResult sol;
  sol.min_divisor = 3.2e-4;
  sol.max_residual_rel = 1.7e-11;
  sol.residual_rel = {{"zz", 1.7e-11}, {"y", 0.0}};
  sol.Ry_avg[1] = cplx(0.25, 0.0);
  sol.diag[2] = TorusFourier::constant(cplx(4.15, 0.0));
  sol.leftover[{-9, 9}] =
      TorusFourier::mode({-1, 1}, {2, 0}, cplx(1e-6, 0.0));

  json rep = solver_report_json(sol, {{"K", 8}});
  CHECK(rep["min_divisor"] == 3.2e-4);
  CHECK(rep["residual_rel"]["zz"] == 1.7e-11);
  CHECK(rep["inputs_hash"] == config_hash({{"K", 8}}));
  CHECK(rep["normal_drift"][0][0] == 2);
  CHECK(rep["normal_drift"][0][1] == doctest::Approx(4.15));
  CHECK(rep["leftover_majorants"][0][2] == doctest::Approx(1e-6));
  CHECK(rep["tangential_drift"][0][1] == doctest::Approx(0.25));
}
