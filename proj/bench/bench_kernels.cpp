// Compares the OpenMP kernels against their serial reference paths:
// Poisson-bracket term products and Monte-Carlo zone measure.  Both paths
// use the same fixed shard decomposition, so outputs must be bit-identical;
// the benchmark verifies that and reports timings.

#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kam/measure.hpp"

using namespace kam;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

HamiltonianPoly random_poly(int terms, int jmax, unsigned seed,
                            const AnalyticityWindow& w) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  HamiltonianPoly P;
  P.tangent = {-2, -1, 1, 2};
  P.jmax = jmax;
  P.degree_cap = 4;
  while (int(P.terms.size()) < terms) {
    MonoKey m;
    m.k = {int(rng() % 5) - 2, int(rng() % 5) - 2, int(rng() % 5) - 2,
           int(rng() % 5) - 2};
    m.l = {0, 0, 0, 0};
    m.l[rng() % 4] = int(rng() % 2);
    int j = 3 + int(rng() % (jmax - 2));
    switch (rng() % 4) {
      case 0: m.alpha = {{j, 1}}; m.beta = {{j, 1}}; break;
      case 1: m.alpha = {{j, 2}}; break;
      case 2: m.beta = {{-j, 1}, {j, 1}}; break;
      default: break;
    }
    P.add_term(m, cplx(U(rng), U(rng)), w);
  }
  return P;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
  std::printf("openmp: not compiled in (serial path only)\n");
#endif

  AnalyticityWindow w;
  w.s = 0.5;
  w.r = 0.05;

  // ---- poisson bracket -----------------------------------------------------
  HamiltonianPoly F = random_poly(400, 8, 11, w);
  HamiltonianPoly G = random_poly(400, 8, 23, w);

  HamiltonianPoly serial = poisson_bracket(F, G, w, false);
  HamiltonianPoly par = poisson_bracket(F, G, w, true);
  bool same = serial.terms == par.terms;
  double ts = seconds([&] { poisson_bracket(F, G, w, false); }, 3);
  double tp = seconds([&] { poisson_bracket(F, G, w, true); }, 3);
  std::printf("poisson_bracket  %4zu x %4zu -> %6zu terms  serial %8.4fs  "
              "omp %8.4fs  speedup %5.2fx  identical %s\n",
              F.terms.size(), G.terms.size(), serial.terms.size(), ts, tp,
              ts / tp, same ? "yes" : "NO");

  // ---- monte-carlo zone measure -------------------------------------------
  int D = 8;
  auto builder = [D](const ParameterPoint& sigma) {
    NormalForm N;
    N.omega[1] = 1.0 + sigma.at(1);
    N.omega[-1] = 1.0 + sigma.at(-1);
    for (int j = 2; j <= D; ++j) {
      N.Omega_const[j] = (j * j + sigma.at(j)) / 2.0;
      N.Omega_const[-j] = (j * j + sigma.at(-j)) / 2.0;
    }
    return N;
  };
  ResonanceZone zone;
  zone.k = {{1, 3}};
  zone.l = {{4, 1}, {-5, -1}};
  zone.alpha = 0.3;
  zone.tau = 2.0;
  zone.v = 1;
  ScheduleRow row;
  row.alpha_stage = {0.3};
  row.beta = 1e-3;
  row.tau = 2.0;
  row.m = 0.4;
  row.E = 10.0;

  long long n = 200000;
  McResult rs = zone_measure_mc(zone, builder, n, 7, D, row, false);
  McResult rp = zone_measure_mc(zone, builder, n, 7, D, row, true);
  bool mc_same = rs.hits == rp.hits && rs.estimate == rp.estimate;
  double ms = seconds([&] { zone_measure_mc(zone, builder, n, 7, D, row,
                                            false); }, 3);
  double mp = seconds([&] { zone_measure_mc(zone, builder, n, 7, D, row,
                                            true); }, 3);
  std::printf("zone_measure_mc  %lld samples -> estimate %.3e  serial %8.4fs"
              "  omp %8.4fs  speedup %5.2fx  identical %s\n",
              n, rs.estimate, ms, mp, ms / mp, mc_same ? "yes" : "NO");

  bool ok = same && mc_same;
  if (!ok) std::printf("PARITY FAILURE\n");
  return ok ? 0 : 1;
}
