#include "kam/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace kam {

static const cplx I(0.0, 1.0);

// ---- schedules -------------------------------------------------------------

ScheduleRow schedules(int v, const ScheduleSeeds& sd) {
  ScheduleRow row;
  row.v = v;
  for (int i = 1; i <= v + 1; ++i) {
    row.J.push_back(-i);
    row.J.push_back(i);
  }
  std::sort(row.J.begin(), row.J.end());
  double shrink = 9.0 + std::pow(2.0, -double(v));
  for (int i = 0; i <= v; ++i) {
    double alpha_i = i == 0 ? 1.0 : std::pow(double(i), -double(i) * sd.exp_);
    row.alpha_stage.push_back(alpha_i / 10.0 * shrink);
  }
  row.beta = v == 0 ? 1.0 : std::pow(double(v), -double(v) * sd.exp_);
  row.tau = 10.0 * v + 10.0;
  row.m = sd.m0 / 10.0 * shrink;
  row.E = sd.E0 * std::pow(double(v + 1), 2.5);
  row.M1 = sd.M10 / 9.0 * (10.0 - std::pow(2.0, -double(v)));
  row.M2 = sd.M20 / 9.0 * (10.0 - std::pow(2.0, -double(v)));
  row.M = row.M1 + row.M2;
  row.L = sd.L0;
  row.s = sd.s0 / std::pow(2.0, double(v));
  row.sigma = row.s / 20.0;
  row.logB = sd.exp_ * row.tau * std::log(row.tau) +
             9.0 * (4.0 * v + row.tau + 1.0) * std::log(1.0 / row.sigma);
  row.eps = std::pow(sd.eps0, std::pow(1.25, double(v)));
  row.gamma = std::sqrt(row.eps);
  row.iota = std::pow(2.0, double(v) * double(v));
  row.Lambda = 10.0 * v + 10.0;
  double drop = 0.0;
  for (int i = 1; i <= v; ++i) drop += 1.0 / (10.0 * i * i);
  row.rho = sd.rho0 * (1.0 - drop);
  row.K = 1 << v;
  row.r = sd.r0;
  for (int i = 0; i < v; ++i)
    row.r *= std::pow(std::pow(sd.eps0, std::pow(1.25, double(i))), sd.r_exp);
  row.lambda = row.beta / row.M;
  return row;
}

DiophantineProfile profile_of(const ScheduleRow& row,
                              const ScheduleSeeds& sd) {
  DiophantineProfile prof;
  prof.alpha_stages = row.alpha_stage;
  prof.alpha = row.alpha_stage.back();
  prof.beta = row.beta;
  prof.tau = row.tau;
  prof.m_lower = row.m;
  for (int i = 0; i <= row.v; ++i) {
    prof.tau_stages.push_back(10.0 * i + 10.0);
    prof.gamma_stages.push_back(
        std::sqrt(std::pow(sd.eps0, std::pow(1.25, double(i)))));
  }
  prof.guard_C = 1.0;
  return prof;
}

// ---- shared helpers --------------------------------------------------------

static void add_with_factor(HamiltonianPoly& out, const MonoKey& key, cplx coef,
                            const TorusFourier& f, const AnalyticityWindow& w) {
  TorusFourier fa = aligned(f, out.tangent);
  for (const auto& [kh, fc] : fa.coeffs) {
    MonoKey nk = key;
    for (size_t i = 0; i < nk.k.size(); ++i) nk.k[i] += kh[i];
    out.add_term(nk, coef * fc, w);
  }
}

static double gbinom(double s, int q) {
  double b = 1.0;
  for (int i = 0; i < q; ++i) b *= (s - i) / (i + 1);
  return b;
}

// ---- diagonalization -------------------------------------------------------

DiagReport diagonalize_normal_frequency(NormalForm& N, HamiltonianPoly& P,
                                        int t, const DiophantineProfile& prof,
                                        const AnalyticityWindow& w, int K,
                                        double tail_budget) {
  DiagReport rep;
  rep.jac_bound = 1.0;
  auto it = N.Omega_stages.find(t);
  std::vector<TorusFourier> tildes;
  double sum_gamma = 0.0;
  if (it != N.Omega_stages.end()) {
    for (size_t l = 0; l < it->second.size(); ++l) {
      auto [avg, tilde] = average_and_tilde(it->second[l]);
      N.Omega_const[t] += avg.real();
      if (tilde.is_zero()) continue;
      DiophantineProfile sp = prof;
      sp.alpha = prof.alpha_at(l);
      sp.tau = prof.tau_at(l);
      if (rep.F.index_set.empty()) rep.F.index_set = tilde.index_set;
      rep.F += solve_dw(N.omega, tilde, sp) * cplx(-1.0);
      tildes.push_back(std::move(tilde));
      sum_gamma += prof.gamma_at(l);
    }
  }
  N.Omega_stages.erase(t);
  if (rep.F.is_zero()) return rep;  // Omega_t already constant: identity map

  const TorusFourier& F = rep.F;
  rep.phi_dist = sup_norm_bound(F, w.s);
  size_t n = N.omega.size();
  rep.jac_bound = std::exp(w.s * sum_gamma * double(n));

  // residual of the elimination: d_omega F + Omega~_t should vanish
  TorusFourier res = d_omega(F, N.omega);
  for (auto& td : tildes) res += td;
  rep.nonconst_residual = sup_norm_bound(res, w.s);

  // sampled |e^{2iF}| on the strip
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<cplx> x(F.index_set.size());
    for (auto& xi : x) xi = cplx(U(rng) * M_PI, U(rng) * w.s);
    double mag = std::exp(-2.0 * eval(F, x).imag());
    rep.jac_sample_max = std::max(rep.jac_sample_max, mag);
  }

  // substitute the Poincare map into P
  std::map<int, TorusFourier> expc;  // d -> e^{2 i d F}
  auto efac = [&](int d) -> const TorusFourier& {
    auto e = expc.find(d);
    if (e == expc.end())
      e = expc.emplace(d, exp_series(F, cplx(0.0, 2.0 * d), K, w.s, 1e-17,
                                     &rep.tail))
              .first;
    return e->second;
  };
  std::map<int, TorusFourier> grad;  // tangent label -> dF/dx_j
  for (int j : P.tangent)
    if (std::binary_search(F.index_set.begin(), F.index_set.end(), j))
      grad[j] = d_angle(aligned(F, P.tangent), j);

  HamiltonianPoly out;
  out.tangent = P.tangent;
  out.jmax = P.jmax;
  out.degree_cap = P.degree_cap;
  out.kcap = P.kcap;
  out.tail = P.tail;
  TorusFourier one = aligned(TorusFourier::constant(1.0), P.tangent);

  struct Branch {
    ivec l;
    int zz;  // extra z_t zbar_t power from the y-shift
    TorusFourier f;
    double coef;
  };
  for (const auto& [mk, c] : P.terms) {
    int d = zpow_get(mk.alpha, t) - zpow_get(mk.beta, t);
    std::vector<Branch> branches{{mk.l, 0, d == 0 ? one : efac(d), 1.0}};
    for (size_t ji = 0; ji < P.tangent.size(); ++ji) {
      int lab = P.tangent[ji];
      auto g = grad.find(lab);
      if (g == grad.end() || mk.l[ji] == 0) continue;
      std::vector<Branch> next;
      for (auto& br : branches) {
        int lj = br.l[ji];
        TorusFourier gp = one;
        for (int q = 0; q <= lj; ++q) {
          Branch nb = br;
          nb.l[ji] = lj - q;
          nb.zz += q;
          nb.coef *= gbinom(double(lj), q);
          if (q > 0) nb.f = mul(br.f, gp, K, w.s, &rep.tail);
          next.push_back(std::move(nb));
          if (q < lj) gp = mul(gp, g->second, K, w.s, &rep.tail);
        }
      }
      branches = std::move(next);
    }
    for (auto& br : branches) {
      MonoKey nk = mk;
      nk.l = br.l;
      if (br.zz > 0) {
        nk.alpha = zpow_set(nk.alpha, t, zpow_get(nk.alpha, t) + br.zz);
        nk.beta = zpow_set(nk.beta, t, zpow_get(nk.beta, t) + br.zz);
      }
      add_with_factor(out, nk, c * br.coef, br.f, w);
    }
  }
  rep.tail += out.tail - P.tail;
  if (rep.tail > tail_budget)
    throw BudgetExceeded("diagonalize: substitution tail over budget");
  P = std::move(out);
  return rep;
}

// ---- oscillator excitation -------------------------------------------------

void excite_oscillators(NormalForm& N, HamiltonianPoly& P, int j, double Ij,
                        double Imj, const AnalyticityWindow& w,
                        int series_order, double* tail) {
  for (int m : {j, -j}) {
    if (N.omega.count(m))
      throw ModeOutOfRange("excite: mode already tangential");
    auto st = N.Omega_stages.find(m);
    if (st != N.Omega_stages.end())
      for (auto& f : st->second)
        if (!average_and_tilde(f).second.is_zero())
          throw ModeOutOfRange("excite: mode frequency not yet constant");
  }
  double Imin = std::min(Ij, Imj);
  if (w.r * w.r >= Imin)
    throw RadiusViolation("excite: r^2 >= excitation action");

  ivec newt = P.tangent;
  newt.push_back(j);
  newt.push_back(-j);
  std::sort(newt.begin(), newt.end());
  newt.erase(std::unique(newt.begin(), newt.end()), newt.end());
  HamiltonianPoly base = align_poly(P, newt);

  HamiltonianPoly out;
  out.tangent = newt;
  out.jmax = base.jmax;
  out.degree_cap = base.degree_cap;
  out.kcap = base.kcap;
  out.tail = base.tail;

  struct Part {
    MonoKey key;
    double coef;
  };
  double x_ratio = w.r * w.r / Imin;
  for (const auto& [mk, c] : base.terms) {
    std::vector<Part> parts{{mk, 1.0}};
    for (int m : {j, -j}) {
      double Im = (m == j) ? Ij : Imj;
      size_t pos = std::lower_bound(newt.begin(), newt.end(), m) - newt.begin();
      std::vector<Part> next;
      for (auto& pt : parts) {
        int a = zpow_get(pt.key.alpha, m), b = zpow_get(pt.key.beta, m);
        if (a + b == 0) {
          next.push_back(pt);
          continue;
        }
        int h = a + b;
        double half = h / 2.0;
        MonoKey stripped = pt.key;
        stripped.alpha = zpow_set(stripped.alpha, m, 0);
        stripped.beta = zpow_set(stripped.beta, m, 0);
        stripped.k[pos] += a - b;
        int qmax = (h % 2 == 0) ? h / 2 : series_order;
        for (int q = 0; q <= qmax; ++q) {
          Part np;
          np.key = stripped;
          np.key.l[pos] += q;
          np.coef = pt.coef * std::pow(2.0, half) * gbinom(half, q) *
                    std::pow(Im, half - q);
          next.push_back(std::move(np));
        }
        if (h % 2 == 1 && tail) {
          // analytic remainder of the binomial series in y/I
          double rem = std::abs(gbinom(half, qmax + 1)) *
                       std::pow(x_ratio, qmax + 1) / (1.0 - x_ratio) *
                       std::pow(2.0 * Im, half);
          *tail += rem * mono_majorant(stripped, c * pt.coef, w);
        }
      }
      parts = std::move(next);
    }
    for (auto& pt : parts) out.add_term(pt.key, c * pt.coef, w);
  }
  if (tail) *tail += out.tail - base.tail;
  P = std::move(out);

  for (int m : {j, -j}) {
    double Om = N.Omega_bar(m);
    N.omega[m] = 2.0 * Om;
    N.Omega_const.erase(m);
    N.Omega_stages.erase(m);
  }
}

// Drop terms whose vector-field contribution, evaluated at eval_w, is below
// the floor; the dropped majorant mass accumulates in P.tail.
static void prune_by_contribution(HamiltonianPoly& P,
                                  const AnalyticityWindow& eval_w,
                                  double floor_) {
  if (floor_ <= 0.0) return;
  auto zw1 = [&](int j) {
    double aj = std::abs(double(j));
    return std::pow(aj, eval_w.p - 1.0) * std::exp(eval_w.a * aj);
  };
  HamiltonianPoly pruned;
  pruned.tangent = P.tangent;
  pruned.jmax = P.jmax;
  pruned.degree_cap = P.degree_cap;
  pruned.kcap = P.kcap;
  pruned.tail = P.tail;
  const double r2 = eval_w.r * eval_w.r;
  for (const auto& [mk, c] : P.terms) {
    double base = mono_majorant(mk, c, eval_w);
    double infl = 0.0;
    for (size_t i = 0; i < P.tangent.size(); ++i)
      infl += (mk.l[i] + std::abs(mk.k[i])) / r2;
    for (auto& [j, pw] : mk.alpha)
      infl += pw * zw1(j) / r2 * std::pow(std::abs(double(j)), eval_w.p) *
              std::exp(eval_w.a * std::abs(double(j)));
    for (auto& [j, pw] : mk.beta)
      infl += pw * zw1(j) / r2 * std::pow(std::abs(double(j)), eval_w.p) *
              std::exp(eval_w.a * std::abs(double(j)));
    if (base * infl <= floor_)
      pruned.tail += base;
    else
      pruned.add_term(mk, c, eval_w);
  }
  P = std::move(pruned);
}

// ---- Lie series ------------------------------------------------------------

HamiltonianPoly lie_flow_apply(const HamiltonianPoly& F,
                               const HamiltonianPoly& G, int order,
                               const AnalyticityWindow& w, double tol,
                               double* tail, bool parallel, double prune_floor) {
  HamiltonianPoly acc = G;
  if (F.is_zero()) return acc;
  HamiltonianPoly term = G;
  double base = poly_majorant(G, w);
  double prev = 1e300;
  for (int k = 1; k <= order; ++k) {
    term = poisson_bracket(term, F, w, parallel);
    term *= cplx(1.0 / k);
    double before = term.tail;
    prune_by_contribution(term, w, prune_floor);
    if (tail) *tail += term.tail - before;
    term.tail = before;  // pruned mass reported once, via *tail
    double maj = poly_majorant(term, w);
    acc += term;
    if (maj < tol * std::max(base, 1.0)) {
      if (tail) *tail += maj;
      return acc;
    }
    if (maj > prev)
      throw SeriesStagnation("lie_flow_apply: increments stopped decaying");
    prev = maj;
  }
  if (tail) *tail += prev;
  return acc;
}

// ---- one KAM step ----------------------------------------------------------

StepReport kam_step(KamState& st, const ScheduleRow& row,
                    const EngineConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  StepReport rep;
  rep.v = row.v;
  AnalyticityWindow w = st.w;
  DiophantineProfile prof = profile_of(row, st.seeds);

  rep.eps_measured = vf_norm(st.P, w).majorant;
  rep.smallness_ratio = row.eps > 0 ? rep.eps_measured / row.eps : 0.0;

  // substitution debris from the diagonalization/excitation is dropped
  // before it multiplies through the next stage and the Lie series
  auto prune_here = [&] {
    double before = st.P.tail;
    prune_by_contribution(st.P, w, cfg.prune_floor);
    rep.tail += st.P.tail - before;
  };
  int t = row.v + 2;
  for (int tt : {t, -t}) {
    auto dr = diagonalize_normal_frequency(st.N, st.P, tt, prof, w, row.K,
                                           cfg.tail_budget);
    rep.tail += dr.tail;
    prune_here();
  }
  double Ij = st.I.count(t) ? st.I.at(t) : 1e-2;
  double Imj = st.I.count(-t) ? st.I.at(-t) : Ij;
  excite_oscillators(st.N, st.P, t, Ij, Imj, w, cfg.excite_series_order,
                     &rep.tail);
  prune_here();

  auto [R, Phigh] = taylor_truncate_R(st.P);
  (void)Phigh;
  RBlocks blocks = split_blocks(R);
  BlockSolveResult sol = solve_block_F(st.N, blocks, prof, w, row.K);
  rep.min_divisor = sol.min_divisor;
  rep.tail += sol.tail;
  rep.Rx_avg = sol.Rx_avg;
  rep.max_block_residual = sol.max_residual_rel;
  if (!sol.leftover.empty()) {
    HamiltonianPoly lp = assemble_blocks(
        RBlocks{{}, {}, {}, {}, {}, {}, sol.leftover}, st.P.tangent, st.P.jmax,
        st.P.degree_cap, st.P.kcap);
    rep.leftover_majorant = poly_majorant(lp, w);
  }

  HamiltonianPoly F = assemble_blocks(sol.F, st.P.tangent, st.P.jmax,
                                      st.P.degree_cap, st.P.kcap);
  {
    // tiny generator terms move negligible mass; dropping them picks a
    // slightly different (still symplectic) transformation
    double before = F.tail;
    prune_by_contribution(F, w, cfg.prune_floor);
    rep.tail += F.tail - before;
  }
  HamiltonianPoly H =
      st.N.to_poly(st.P.tangent, st.P.jmax, st.P.degree_cap, st.P.kcap);
  H += st.P;
  HamiltonianPoly total =
      lie_flow_apply(F, H, cfg.lie_order, w, cfg.lie_tol, &rep.tail,
                     cfg.parallel, cfg.prune_floor);

  // extract the new normal form: y-linear averages and the z_j zbar_j diagonal
  std::map<int, TorusFourier> yfun, diagf;
  HamiltonianPoly Pn;
  Pn.tangent = st.P.tangent;
  Pn.jmax = st.P.jmax;
  Pn.degree_cap = st.P.degree_cap;
  Pn.kcap = st.P.kcap;
  Pn.tail = total.tail;
  for (const auto& [mk, c] : total.terms) {
    int ltot = 0, lpos = -1;
    for (size_t i = 0; i < mk.l.size(); ++i)
      if (mk.l[i] > 0) {
        ltot += mk.l[i];
        lpos = int(i);
      }
    bool zfree = mk.alpha.empty() && mk.beta.empty();
    if (zfree && ltot == 0) {
      if (l1_norm(mk.k) > 0) Pn.add_term(mk, c, w);  // drop the constant
      continue;
    }
    if (zfree && ltot == 1) {
      int lab = Pn.tangent[lpos];
      if (yfun[lab].index_set.empty()) yfun[lab].index_set = Pn.tangent;
      yfun[lab].set(mk.k, yfun[lab].at(mk.k) + c);
      continue;
    }
    if (ltot == 0 && mk.alpha.size() == 1 && mk.beta.size() == 1 &&
        mk.alpha[0] == mk.beta[0] && mk.alpha[0].second == 1) {
      int lab = mk.alpha[0].first;
      if (diagf[lab].index_set.empty()) diagf[lab].index_set = Pn.tangent;
      diagf[lab].set(mk.k, diagf[lab].at(mk.k) + c);
      continue;
    }
    Pn.add_term(mk, c, w);
  }

  NormalForm Nn;
  for (auto& [lab, f] : yfun) {
    auto [avg, tilde] = average_and_tilde(f);
    Nn.omega[lab] = avg.real();
    // variable y-linear remainder stays in the perturbation
    for (const auto& [k, c] : tilde.coeffs) {
      MonoKey mk;
      mk.k = k;
      mk.l = ivec(Pn.tangent.size(), 0);
      size_t pos = std::lower_bound(Pn.tangent.begin(), Pn.tangent.end(), lab) -
                   Pn.tangent.begin();
      mk.l[pos] = 1;
      Pn.add_term(mk, c, w);
    }
    double old = st.N.omega.count(lab) ? st.N.omega.at(lab) : Nn.omega[lab];
    rep.omega_drift = std::max(rep.omega_drift, std::abs(Nn.omega[lab] - old));
  }
  for (auto& [lab, f] : diagf) {
    auto [avg, tilde] = average_and_tilde(f);
    Nn.Omega_const[lab] = avg.real();
    std::vector<TorusFourier> stages;
    auto old_it = st.N.Omega_stages.find(lab);
    TorusFourier covered;
    covered.index_set = Pn.tangent;
    if (old_it != st.N.Omega_stages.end()) {
      for (auto& s : old_it->second) {
        stages.push_back(s);
        covered += aligned(s, Pn.tangent);
      }
    }
    TorusFourier delta = tilde - covered;
    delta = prune(delta, 1e-16, w.s, &rep.tail);
    if (!delta.is_zero()) stages.push_back(delta);
    if (!stages.empty()) Nn.Omega_stages[lab] = std::move(stages);
    double dbar = std::abs(Nn.Omega_const[lab] - st.N.Omega_bar(lab));
    double dvar = delta.is_zero() ? 0.0 : sup_norm_bound(delta, w.s);
    rep.Omega_drift_m1 =
        std::max(rep.Omega_drift_m1, std::abs(lab) * (dbar + dvar));
  }

  AnalyticityWindow wn = w;
  wn.s = row.s / 2.0;
  wn.r = row.r * std::pow(row.eps, st.seeds.r_exp);
  // drop terms whose vector-field contribution at the *next* window is
  // below the floor (the loss is booked into the tail budget)
  prune_by_contribution(Pn, wn, cfg.prune_floor);
  rep.tail += Pn.tail - total.tail;

  st.N = std::move(Nn);
  st.P = std::move(Pn);
  // next window
  st.w.s = row.s / 2.0;
  st.w.r = row.r * std::pow(row.eps, st.seeds.r_exp);
  rep.eps_next = vf_norm(st.P, st.w).majorant;
  if (rep.tail > cfg.tail_budget)
    throw BudgetExceeded("kam_step: truncation budget exceeded");
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace kam
