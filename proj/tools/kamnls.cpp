// Command-line driver: reproducible runs with JSON/CSV reports.
// Subcommands: build, kam-run, solve, verify-fae, measure, oracle.
// Exit codes: 0 all budgets pass, 1 budget failure, 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "kam/dnls.hpp"
#include "kam/measure.hpp"
#include "kam/serialize.hpp"
#include "kam/structure.hpp"

using namespace kam;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out);
  f << text << "\n";
}

std::map<int, double> sigma_map(unsigned long long seed, int jmax) {
  ParameterPoint p = sample_sigma(seed, jmax);
  return p.entries;
}

TorusFourier random_p(std::mt19937_64& rng, const ivec& idx, int kmax) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  TorusFourier p;
  p.index_set = idx;
  for (auto& k : l1_ball(int(idx.size()), kmax))
    p.coeffs[k] = cplx(U(rng), U(rng));
  return p;
}

TorusFourier random_real_symmetric(std::mt19937_64& rng, const ivec& idx,
                                   int kmax, double amp) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  TorusFourier f;
  f.index_set = idx;
  for (auto& k : l1_ball(int(idx.size()), kmax)) {
    if (l1_norm(k) == 0 || f.coeffs.count(k)) continue;
    cplx c = amp * cplx(U(rng), U(rng));
    ivec mk(k.size());
    for (size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
    f.coeffs[k] = c;
    f.coeffs[mk] = std::conj(c);
  }
  return f;
}

double rel_l2_error(const TorusFourier& u, const TorusFourier& ref) {
  double num = 0.0, den = 0.0;
  std::map<ivec, cplx> all;
  for (auto& [k, c] : u.coeffs) all[k] += c;
  for (auto& [k, c] : ref.coeffs) {
    all[k] -= c;
    den += std::norm(c);
  }
  for (auto& [k, d] : all) num += std::norm(d);
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// one random well-separated instance of (-i d_omega + lambda + mu) u = p
// solved both ways; returns (coefficient deviation, equation residual)
std::pair<double, double> oracle_case(int n, int K, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  FreqMap omega;
  ivec idx;
  const double base[2] = {1.0, 1.3247179572447};  // plastic-number pair
  for (int i = 0; i < n; ++i) {
    idx.push_back(i + 1);
    omega[i + 1] = base[i] * (1.0 + 0.01 * (rng() % 7));
  }
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  cplx lambda(40.0 + 5.0 * U(rng), 0.0);
  auto mu = random_real_symmetric(rng, idx, 2, 0.1);
  auto p = random_p(rng, idx, K / 2);

  DiophantineProfile prof;
  prof.alpha = 0.33;
  prof.beta = 1e-3;
  prof.tau = 2.0;
  prof.alpha_stages = {0.33};
  prof.tau_stages = {2.0};
  prof.gamma_stages = {1.0};
  AnalyticityWindow w;
  w.s = 0.3;
  TorusFourier u =
      solve_liu_yuan(omega, lambda, {mu}, p, prof, w, K, 0.0, nullptr);
  TorusFourier uref = dense_oracle_solve(omega, lambda, mu, p, idx, K);
  double res = sup_norm_bound(residual_liu_yuan(omega, lambda, {mu}, p, u, K),
                              0.0) /
               sup_norm_bound(p, 0.0);
  return {rel_l2_error(u, uref), res};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nearly integrable lattice Hamiltonian toolbox"};
  app.require_subcommand(1);

  int jmax = 8, degree_cap = 4, steps = 3, kcheck = 8;
  unsigned long long seed_sigma = 1, seed = 1;
  double eps0 = 1e-3, s0 = 1.0, rho0 = 0.5, r0 = 0.0;  // r0 <= 0: calibrate
  std::string out = "-";

  auto* build = app.add_subcommand("build", "emit the initial Hamiltonian");
  build->add_option("--jmax", jmax);
  build->add_option("--degree-cap", degree_cap);
  build->add_option("--seed-sigma", seed_sigma);
  build->add_option("--out", out);

  auto* run = app.add_subcommand("kam-run", "iterate KAM steps");
  run->add_option("--steps", steps);
  run->add_option("--eps0", eps0);
  run->add_option("--s0", s0);
  run->add_option("--rho0", rho0);
  run->add_option("--jmax", jmax);
  run->add_option("--kcheck", kcheck);
  run->add_option("--degree-cap", degree_cap);
  run->add_option("--seed-sigma", seed_sigma);
  run->add_option("--r0", r0);
  double m0 = 0.4;  // normal-gap seed; Omega_j ~ j^2/2 here, so < 0.45
  run->add_option("--m0", m0);
  run->add_option("--out", out);

  int sv_n = 1, sv_K = 8, cases = 100;
  auto* solve = app.add_subcommand("solve", "one solver instance vs oracle");
  solve->add_option("--n", sv_n);
  solve->add_option("--K", sv_K);
  solve->add_option("--seed", seed);
  solve->add_option("--out", out);

  auto* orac = app.add_subcommand("oracle", "batch solver-vs-oracle summary");
  orac->add_option("--n", sv_n);
  orac->add_option("--K", sv_K);
  orac->add_option("--cases", cases);
  orac->add_option("--seed", seed);
  orac->add_option("--out", out);

  double fae_eps = 0.05, fae_rho = 0.4, fae_Lambda = 10.0;
  auto* fae = app.add_subcommand("verify-fae", "asymptotic estimate sweep");
  fae->add_option("--jmax", jmax);
  fae->add_option("--seed-sigma", seed_sigma);
  fae->add_option("--eps", fae_eps);
  fae->add_option("--rho", fae_rho);
  fae->add_option("--lambda", fae_Lambda);
  fae->add_option("--out", out);

  std::vector<int> zone_spec{1, 5, -5};
  double mz_tau = 2.0, mz_beta = 1e-3, mz_alpha = 1e-3;
  long long mz_samples = 100000;
  auto* meas = app.add_subcommand("measure", "resonance zone measure");
  meas->add_option("--zone", zone_spec, "k,i,j")->delimiter(',');
  meas->add_option("--tau", mz_tau);
  meas->add_option("--beta", mz_beta);
  meas->add_option("--alpha", mz_alpha);
  meas->add_option("--samples", mz_samples);
  meas->add_option("--seed", seed);
  meas->add_option("--jmax", jmax);
  meas->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*build) {
      DnlsConfig cfg;
      cfg.jmax = jmax;
      cfg.degree_cap = degree_cap;
      cfg.sigma = sigma_map(seed_sigma, jmax);
      json config = {{"cmd", "build"}, {"jmax", jmax},
                     {"degree_cap", degree_cap},
                     {"seed_sigma", seed_sigma}};
      json rep;
      rep["config"] = config;
      rep["config_hash"] = config_hash(config);
      rep["hamiltonian"] = to_json(build_hamiltonian(cfg));
      emit(out, rep.dump(2));
      return 0;
    }

    if (*run) {
      DnlsConfig cfg;
      cfg.jmax = jmax;
      cfg.degree_cap = degree_cap;
      cfg.sigma = sigma_map(seed_sigma, jmax);
      cfg.window.s = s0;
      if (r0 <= 0.0) {
        // vf majorant scales exactly as r^2 with I = 4 r^2: probe, rescale
        const double rp = 0.01;
        cfg.window.r = rp;
        cfg.I1 = cfg.Im1 = 4.0 * rp * rp;
        InitialSystem probe =
            initial_action_angle(build_hamiltonian(cfg), cfg);
        double mp = vf_norm(probe.P, cfg.window).majorant;
        r0 = rp * std::sqrt(eps0 / mp);
        std::cerr << "calibrated r0 = " << r0 << "\n";
      }
      cfg.window.r = r0;
      cfg.I1 = cfg.Im1 = 4.0 * r0 * r0;

      json config = {{"cmd", "kam-run"}, {"steps", steps},
                     {"eps0", eps0},     {"s0", s0},
                     {"rho0", rho0},     {"jmax", jmax},
                     {"kcheck", kcheck}, {"degree_cap", degree_cap},
                     {"seed_sigma", seed_sigma}, {"r0", r0}, {"m0", m0}};
      json rep;
      rep["config"] = config;
      rep["config_hash"] = config_hash(config);

      HamiltonianPoly H = build_hamiltonian(cfg);
      InitialSystem sys = initial_action_angle(H, cfg);

      KamState st;
      st.N = sys.N;
      st.P = sys.P;
      st.w = cfg.window;
      st.sigma = cfg.sigma;
      st.seeds.eps0 = eps0;
      st.seeds.s0 = s0;
      st.seeds.rho0 = rho0;
      st.seeds.r0 = r0;
      st.seeds.m0 = m0;
      // step v excites modes +-(v+2) at the radius of its schedule row
      for (int v = 0; v < steps; ++v) {
        ScheduleRow rw = schedules(v, st.seeds);
        st.I[v + 2] = st.I[-(v + 2)] = 4.0 * rw.r * rw.r;
      }

      VfNorm vf0 = vf_norm(st.P, st.w);
      auto cons = check_momentum_mass(st.P);
      rep["initial"] = {{"vf_majorant", vf0.majorant},
                        {"terms", st.P.terms.size()},
                        {"tail", sys.tail},
                        {"momentum_ok", cons.momentum_ok},
                        {"mass_ok", cons.mass_ok}};

      bool budgets_ok = cons.momentum_ok && cons.mass_ok;
      EngineConfig ecfg;
      ecfg.prune_floor = 1e-12;
      json steps_json = json::array();
      for (int v = 0; v < steps; ++v) {
        ScheduleRow row = schedules(v, st.seeds);
        // the initial excitation already used up the first harmonic cap
        row.K = 2 << v;
        StepReport sr = kam_step(st, row, ecfg);
        bool contracted =
            sr.eps_next <= 10.0 * std::pow(sr.eps_measured, 1.25) + 1e-300;
        auto c = check_momentum_mass(st.P);
        budgets_ok = budgets_ok && contracted && c.momentum_ok && c.mass_ok &&
                     sr.max_block_residual < 1e-9;
        steps_json.push_back({{"v", v},
                              {"eps_measured", sr.eps_measured},
                              {"eps_next", sr.eps_next},
                              {"contracted", contracted},
                              {"min_divisor", sr.min_divisor},
                              {"max_block_residual", sr.max_block_residual},
                              {"omega_drift", sr.omega_drift},
                              {"leftover_majorant", sr.leftover_majorant},
                              {"tail", sr.tail},
                              {"momentum_ok", c.momentum_ok},
                              {"mass_ok", c.mass_ok}});
        std::cerr << "step " << v << ": eps " << sr.eps_measured << " -> "
                  << sr.eps_next << "\n";
      }
      rep["steps"] = std::move(steps_json);
      rep["pass"] = budgets_ok;
      emit(out, rep.dump(2));
      return budgets_ok ? 0 : 1;
    }

    if (*solve || *orac) {
      int total = *solve ? 1 : cases;
      double worst_dev = 0.0, worst_res = 0.0;
      for (int c = 0; c < total; ++c) {
        auto [dev, res] = oracle_case(sv_n, sv_K, seed + c);
        worst_dev = std::max(worst_dev, dev);
        worst_res = std::max(worst_res, res);
      }
      bool ok = worst_dev < 1e-8 && worst_res < 1e-9;
      json config = {{"cmd", *solve ? "solve" : "oracle"}, {"n", sv_n},
                     {"K", sv_K}, {"cases", total}, {"seed", seed}};
      json rep = {{"config", config},
                  {"config_hash", config_hash(config)},
                  {"max_deviation", worst_dev},
                  {"max_residual_rel", worst_res},
                  {"pass", ok}};
      emit(out, rep.dump(2));
      return ok ? 0 : 1;
    }

    if (*fae) {
      DnlsConfig cfg;
      cfg.jmax = jmax;
      cfg.sigma = sigma_map(seed_sigma, jmax);
      HamiltonianPoly H = build_hamiltonian(cfg);
      InitialSystem sys = initial_action_angle(H, cfg);

      SweepConfig sweep;
      for (int m = -1; m <= 1; ++m)
        for (int n = -1; n <= 1; ++n) sweep.pairs.emplace_back(m, n);
      int tmax = jmax - 2;
      for (int t = std::max(2, tmax - 5); t <= tmax; ++t)
        sweep.t_values.push_back(t);
      sweep.profile = default_u_profile(cfg);

      StructureReport r = verify_fae(sys.P, fae_Lambda, fae_eps, fae_rho,
                                     sweep, cfg.window);
      std::string csv = "m,n,kind,bound,measured,margin\n";
      const char* kind_name[] = {"zzbar", "zz", "zbzb"};
      for (auto& e : r.entries) {
        double bound = e.coef_bound[0];
        csv += std::to_string(e.m) + "," + std::to_string(e.n) + "," +
               kind_name[int(e.kind)] + "," + std::to_string(bound) + "," +
               std::to_string(bound - e.raw_margin) + "," +
               std::to_string(e.raw_margin) + "\n";
      }
      emit(out, csv);
      std::cerr << (r.pass ? "pass" : "fail") << ", min margin "
                << r.min_margin << ", max fit residual " << r.max_fit_residual
                << "\n";
      return r.pass ? 0 : 1;
    }

    if (*meas) {
      if (zone_spec.size() != 3) {
        std::cerr << "--zone wants k,i,j\n";
        return 2;
      }
      ResonanceZone zone;
      zone.k = {{1, zone_spec[0]}};
      zone.l = {{zone_spec[1], 1}};
      if (zone_spec[2] != 0) zone.l.emplace_back(zone_spec[2], -1);
      zone.alpha = mz_alpha;
      zone.tau = mz_tau;

      auto builder = [&](const ParameterPoint& s) {
        NormalForm N;
        N.omega = {{-1, 1.0 + s.at(-1)}, {1, 1.0 + s.at(1)}};
        for (int j = 2; j <= jmax; ++j) {
          N.Omega_const[j] = 0.5 * (double(j) * j + s.at(j));
          N.Omega_const[-j] = 0.5 * (double(j) * j + s.at(-j));
        }
        return N;
      };
      ScheduleRow row;
      row.beta = mz_beta;
      row.tau = mz_tau;
      row.m = 0.45;
      row.E = 10.0;

      McResult mc =
          zone_measure_mc(zone, builder, mz_samples, seed, jmax, row);
      json config = {{"cmd", "measure"}, {"zone", zone_spec},
                     {"tau", mz_tau},    {"beta", mz_beta},
                     {"alpha", mz_alpha}, {"samples", mz_samples},
                     {"seed", seed},     {"jmax", jmax}};
      json rep = {{"config", config},
                  {"config_hash", config_hash(config)},
                  {"estimate", mc.estimate},
                  {"ci", {mc.lo, mc.hi}},
                  {"envelope", mc.envelope},
                  {"measured_C", mc.measured_C},
                  {"case", zone_case(zone, row)},
                  {"verdict", mc.below_envelope ? "below" : "above"}};
      emit(out, rep.dump(2));
      return mc.below_envelope ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
