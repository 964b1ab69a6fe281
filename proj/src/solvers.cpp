#include "kam/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace kam {

static const cplx I(0.0, 1.0);

// ---- basic solvers ---------------------------------------------------------

TorusFourier solve_dw(const FreqMap& omega, const TorusFourier& p,
                      const DiophantineProfile& prof, double* min_divisor) {
  ivec zero(p.index_set.size(), 0);
  if (std::abs(p.at(zero)) > 0.0)
    throw NonzeroAverage("solve_dw: [p] != 0");
  TorusFourier u;
  u.index_set = p.index_set;
  u.cutoff = p.cutoff;
  for (const auto& [k, c] : p.coeffs) {
    double d = dot_k_omega(k, p.index_set, omega);
    double bound = prof.alpha / std::pow(double(k_bracket(k)), prof.tau);
    if (std::abs(d) < bound)
      throw SmallDivisor("solve_dw: |<k,omega>| below profile bound", k,
                         std::abs(d), bound);
    if (min_divisor) *min_divisor = std::min(*min_divisor, std::abs(d));
    u.coeffs[k] = c / (I * d);
  }
  return u;
}

TorusFourier solve_shifted(const FreqMap& omega, cplx lambda,
                           const TorusFourier& p,
                           const DiophantineProfile& prof,
                           double* min_divisor) {
  TorusFourier v;
  v.index_set = p.index_set;
  v.cutoff = p.cutoff;
  for (const auto& [k, c] : p.coeffs) {
    cplx den = lambda - dot_k_omega(k, p.index_set, omega);
    double bound = prof.beta / std::pow(double(k_bracket(k)), prof.tau);
    if (std::abs(den) < bound)
      throw SmallDivisor("solve_shifted: |lambda - <k,omega>| below bound", k,
                         std::abs(den), bound);
    if (min_divisor) *min_divisor = std::min(*min_divisor, std::abs(den));
    v.coeffs[k] = c / den;
  }
  return v;
}

// ---- transform -------------------------------------------------------------

std::vector<cplx> Transform::forward_point(std::vector<cplx> x) const {
  for (const auto& st : stages) {
    if (st.b.is_zero()) continue;
    TorusFourier ba = aligned(st.b, index_set);
    cplx shift = eval(ba, x);
    for (size_t i = 0; i < x.size(); ++i) {
      auto it = omega.find(index_set[i]);
      x[i] += shift * it->second;
    }
  }
  return x;
}

std::vector<cplx> Transform::inverse_point(std::vector<cplx> phi) const {
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) {
    if (it->btilde.is_zero()) continue;
    TorusFourier ba = aligned(it->btilde, index_set);
    cplx shift = eval(ba, phi);
    for (size_t i = 0; i < phi.size(); ++i)
      phi[i] += shift * omega.find(index_set[i])->second;
  }
  return phi;
}

TorusFourier Transform::pushforward(const TorusFourier& f, double* tail) const {
  TorusFourier g = f;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it)
    g = compose_shift(g, it->b, omega, K, s, comp_tol, tail);
  return g;
}

TorusFourier Transform::pullback(const TorusFourier& f, double* tail) const {
  TorusFourier g = f;
  for (const auto& st : stages)
    g = compose_shift(g, st.btilde, omega, K, s, comp_tol, tail);
  return g;
}

Transform build_transform(const FreqMap& omega,
                          const std::vector<TorusFourier>& a_stages,
                          const DiophantineProfile& prof,
                          const AnalyticityWindow& w, int K) {
  Transform T;
  T.omega = omega;
  T.K = K;
  T.s = w.s;
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (size_t l = 0; l < a_stages.size(); ++l) {
    const TorusFourier& a = a_stages[l];
    T.index_set = union_index_set(T.index_set, a.index_set);
    TransformStage st;
    st.gamma = prof.gamma_at(l);
    st.picard_residual = 0.0;
    st.picard_iters = 0;
    if (a.is_zero()) {
      st.b.index_set = a.index_set;
      st.btilde.index_set = a.index_set;
      st.b_norm = 0.0;
      T.stages.push_back(std::move(st));
      continue;
    }
    ivec zero(a.index_set.size(), 0);
    if (std::abs(a.at(zero)) > 0.0)
      throw NonzeroAverage("build_transform: stage has nonzero average");
    DiophantineProfile sp = prof;
    sp.alpha = prof.alpha_at(l);
    sp.tau = prof.tau_at(l);
    st.b = solve_dw(omega, a, sp);
    st.b_norm = sup_norm_bound(st.b, w.s);

    // strip claim |Im b(x)| < gamma^{1/10} |Im x| at sampled points
    // (meaningful only for real-valued stage functions)
    double gpow = std::pow(std::max(st.gamma, 1e-300), 0.1);
    for (int trial = 0; is_real_symmetric(st.b, 1e-13) && trial < 20; ++trial) {
      std::vector<cplx> x(st.b.index_set.size());
      double im_max = 0.0;
      for (auto& xi : x) {
        double eta = U(rng) * 0.5 * w.s;
        xi = cplx(U(rng) * M_PI, eta);
        im_max = std::max(im_max, std::abs(eta));
      }
      cplx bval = eval(st.b, x);
      if (std::abs(bval.imag()) >= gpow * im_max + 1e-15)
        throw StripViolation("build_transform: imaginary-part claim failed");
    }

    // Picard iteration for the inverse shift
    TorusFourier h = st.b;
    h *= cplx(-1.0);
    double prev_inc = 1e300;
    int grow_streak = 0;
    for (int it = 1; it <= 50; ++it) {
      TorusFourier hn = compose_shift(st.b, h, omega, K, w.s, 1e-17);
      hn *= cplx(-1.0);
      double inc = sup_norm_bound(hn - h, w.s);
      h = std::move(hn);
      st.picard_iters = it;
      if (inc < 1e-14) break;
      grow_streak = (inc > prev_inc) ? grow_streak + 1 : 0;
      if (grow_streak >= 2)
        throw PicardDivergence("build_transform: Picard increments growing");
      prev_inc = inc;
    }
    TorusFourier res = compose_shift(st.b, h, omega, K, w.s, 1e-17);
    res += h;
    st.picard_residual = sup_norm_bound(res, w.s);
    st.btilde = std::move(h);
    T.stages.push_back(std::move(st));
  }
  // bridge bookkeeping: each stage narrows the strip by s/100
  T.s_out = w.s * (1.0 - double(T.stages.size()) / 100.0);
  return T;
}

// ---- large variable coefficient -------------------------------------------

TorusFourier residual_large_variable(const FreqMap& omega, cplx lambda,
                                     const std::vector<TorusFourier>& a_stages,
                                     const TorusFourier& p,
                                     const TorusFourier& u, int K) {
  TorusFourier res = d_omega(u, omega);
  res *= I;
  res += u * lambda;
  for (const auto& a : a_stages)
    if (!a.is_zero()) res += mul(a, u, K) * lambda;
  res -= p;
  return gamma_truncate(res, K);
}

TorusFourier solve_large_variable(const FreqMap& omega, cplx lambda,
                                  const std::vector<TorusFourier>& a_stages,
                                  const TorusFourier& p,
                                  const DiophantineProfile& prof,
                                  const AnalyticityWindow& w, int K,
                                  VarSolveReport* rep) {
  bool trivial = true;
  for (const auto& a : a_stages) trivial &= a.is_zero();
  TorusFourier u;
  if (trivial) {
    double mind = 1e300;
    u = solve_shifted(omega, lambda, p, prof, &mind);
    if (rep) {
      rep->min_divisor = mind;
      TorusFourier res = residual_large_variable(omega, lambda, a_stages, p, u, K);
      rep->residual_abs = sup_norm_bound(res, 0.0);
      double pn = sup_norm_bound(p, 0.0);
      rep->residual_rel = pn > 0 ? rep->residual_abs / pn : rep->residual_abs;
    }
    return u;
  }

  // stagewise elimination: maintain (i d_omega + lam + sum_l q_l(x)) v = rhs
  cplx lam = lambda;
  std::vector<TorusFourier> q;
  ivec idx;
  for (const auto& a : a_stages) idx = union_index_set(idx, a.index_set);
  idx = union_index_set(idx, p.index_set);
  for (const auto& a : a_stages) q.push_back(aligned(a, idx) * lambda);
  TorusFourier rhs = aligned(p, idx);
  double tail = 0.0;

  Transform T;
  T.omega = omega;
  T.index_set = idx;
  T.K = K;
  T.s = w.s;
  T.comp_tol = 1e-17;

  for (size_t l = 0; l < q.size(); ++l) {
    auto [avg_l, ql] = average_and_tilde(q[l]);
    lam += avg_l;
    if (ql.is_zero()) {
      TransformStage st;
      st.b.index_set = idx;
      st.btilde.index_set = idx;
      st.gamma = prof.gamma_at(l);
      st.b_norm = 0.0;
      st.picard_residual = 0.0;
      st.picard_iters = 0;
      T.stages.push_back(std::move(st));
      continue;
    }
    // multiplicative stage coefficient a = q_l / lam
    TorusFourier a_mult = ql * (cplx(1.0) / lam);
    DiophantineProfile sp = prof;
    sp.alpha = prof.alpha_at(l);
    sp.tau = prof.tau_at(l);
    sp.gamma_stages = {prof.gamma_at(l)};
    Transform stage_T = build_transform(omega, {a_mult}, sp, w, K);
    TransformStage st = std::move(stage_T.stages[0]);
    // (1 + a)^{-1} factor and composition with T_l^{-1}
    TorusFourier recip = reciprocal_one_plus(a_mult, K, 1e-17, 0.0);
    rhs = compose_shift(mul(recip, rhs, K, 0.0, &tail), st.btilde, omega, K,
                        w.s, 1e-17, &tail);
    for (size_t l2 = l + 1; l2 < q.size(); ++l2) {
      if (q[l2].is_zero()) continue;
      q[l2] = compose_shift(mul(recip, q[l2], K, 0.0, &tail), st.btilde, omega,
                            K, w.s, 1e-17, &tail);
    }
    T.stages.push_back(std::move(st));
  }

  double mind = 1e300;
  TorusFourier v = solve_shifted(omega, lam, rhs, prof, &mind);
  u = T.pushforward(v, &tail);
  u = gamma_truncate(u, K);

  if (rep) {
    rep->min_divisor = mind;
    rep->tail = tail;
    TorusFourier res = residual_large_variable(omega, lambda, a_stages, p, u, K);
    rep->residual_abs = sup_norm_bound(res, 0.0);
    double pn = sup_norm_bound(p, 0.0);
    rep->residual_rel = pn > 0 ? rep->residual_abs / pn : rep->residual_abs;
  }
  return u;
}

// ---- Liu-Yuan --------------------------------------------------------------

TorusFourier residual_liu_yuan(const FreqMap& omega, cplx lambda,
                               const std::vector<TorusFourier>& mu_stages,
                               const TorusFourier& p, const TorusFourier& u,
                               int K) {
  TorusFourier res = d_omega(u, omega);
  res *= -I;
  res += u * lambda;
  for (const auto& m : mu_stages)
    if (!m.is_zero()) res += mul(m, u, K);
  res -= p;
  return gamma_truncate(res, K);
}

TorusFourier solve_liu_yuan(const FreqMap& omega, cplx lambda,
                            const std::vector<TorusFourier>& mu_stages,
                            const TorusFourier& p,
                            const DiophantineProfile& prof,
                            const AnalyticityWindow& w, int K,
                            double sigma_out, VarSolveReport* rep) {
  ivec idx = p.index_set;
  double gamma_tilde = 1.0;
  for (size_t l = 0; l < mu_stages.size(); ++l) {
    const auto& m = mu_stages[l];
    if (m.is_zero()) continue;
    idx = union_index_set(idx, m.index_set);
    ivec zero(m.index_set.size(), 0);
    if (std::abs(m.at(zero)) > 0.0)
      throw NonzeroAverage("solve_liu_yuan: [mu_l] != 0");
    double denom = prof.alpha_at(l) * prof.gamma_at(l);
    gamma_tilde = std::max(
        gamma_tilde, weighted_norm(m, w.s, prof.tau_at(l) + 1.0) / denom);
  }

  // integrating factor: u = e^{-i g} v with g = d_omega^{-1} mu
  TorusFourier g;
  g.index_set = idx;
  double tail = 0.0;
  for (size_t l = 0; l < mu_stages.size(); ++l) {
    if (mu_stages[l].is_zero()) continue;
    DiophantineProfile sp = prof;
    sp.alpha = prof.alpha_at(l);
    sp.tau = prof.tau_at(l);
    g += solve_dw(omega, mu_stages[l], sp);
  }

  TorusFourier Eplus = exp_series(g, I, K, w.s, 1e-17, &tail);
  TorusFourier Eminus = exp_series(g, -I, K, w.s, 1e-17, &tail);

  auto solve_const = [&](const TorusFourier& q) {
    TorusFourier out;
    out.index_set = q.index_set;
    for (const auto& [k, c] : q.coeffs) {
      cplx den = dot_k_omega(k, q.index_set, omega) + lambda;
      double bound = prof.beta * gamma_tilde /
                     (1.0 + std::pow(double(l1_norm(k)), prof.tau));
      if (std::abs(den) < bound)
        throw SmallDivisor("solve_liu_yuan: |<k,omega> + lambda| below bound",
                           k, std::abs(den), bound);
      if (rep) rep->min_divisor = std::min(rep->min_divisor, std::abs(den));
      out.coeffs[k] = c / den;
    }
    return out;
  };

  TorusFourier u;
  u.index_set = idx;
  TorusFourier r = aligned(p, idx);
  double pn = sup_norm_bound(p, 0.0);
  if (pn == 0.0) return u;
  double prev = 1e300;
  for (int sweep = 1; sweep <= 30; ++sweep) {
    TorusFourier wvar = solve_const(mul(Eplus, r, K, 0.0, &tail));
    TorusFourier du = mul(Eminus, wvar, K, 0.0, &tail);
    u += du;
    r = residual_liu_yuan(omega, lambda, mu_stages, aligned(p, idx), u, K);
    r *= cplx(-1.0);
    double rn = sup_norm_bound(r, 0.0);
    if (rep) rep->sweeps = sweep;
    if (rn < 1e-12 * pn) break;
    if (rn > 0.5 * prev) {
      if (rn < 1e-9 * pn) break;  // truncation floor reached
      throw NonContraction("solve_liu_yuan: residual stopped contracting");
    }
    prev = rn;
  }
  (void)sigma_out;  // strip narrowing is bookkeeping only at desk scale
  if (rep) {
    rep->tail = tail;
    TorusFourier res = residual_liu_yuan(omega, lambda, mu_stages,
                                         aligned(p, idx), u, K);
    rep->residual_abs = sup_norm_bound(res, 0.0);
    rep->residual_rel = rep->residual_abs / pn;
  }
  return u;
}

// ---- homological block solve ----------------------------------------------

static std::vector<TorusFourier> shift_stages(const NormalForm& N,
                                              const std::vector<std::pair<int, double>>& combo) {
  // variable part of sum_m sign_m * Omega_m, stage by stage
  size_t nstages = 0;
  for (auto& [m, sgn] : combo) {
    auto it = N.Omega_stages.find(m);
    if (it != N.Omega_stages.end()) nstages = std::max(nstages, it->second.size());
  }
  std::vector<TorusFourier> out(nstages);
  for (auto& [m, sgn] : combo) {
    auto it = N.Omega_stages.find(m);
    if (it == N.Omega_stages.end()) continue;
    for (size_t l = 0; l < it->second.size(); ++l) {
      TorusFourier t = it->second[l];
      t *= cplx(sgn);
      if (out[l].index_set.empty())
        out[l] = std::move(t);
      else
        out[l] += t;
    }
  }
  return out;
}

static double shift_const(const NormalForm& N,
                          const std::vector<std::pair<int, double>>& combo) {
  double s = 0.0;
  for (auto& [m, sgn] : combo) s += sgn * N.Omega_bar(m);
  return s;
}

BlockSolveResult solve_block_F(const NormalForm& N, const RBlocks& R,
                               const DiophantineProfile& prof,
                               const AnalyticityWindow& w, int K) {
  BlockSolveResult res;
  ivec tangent;
  for (auto& [j, wj] : N.omega) tangent.push_back(j);
  std::sort(tangent.begin(), tangent.end());
  size_t n = tangent.size();

  auto note_residual = [&](const std::string& cls, const TorusFourier& f,
                           double lam_const,
                           const std::vector<TorusFourier>& stages,
                           const TorusFourier& rsrc) {
    // residual of d_omega f + i (lam + stages) f = rsrc
    TorusFourier rr = d_omega(f, N.omega);
    rr += f * (I * lam_const);
    for (auto& st : stages)
      if (!st.is_zero()) rr += mul(st, f, K) * I;
    rr -= rsrc;
    rr = gamma_truncate(rr, K);
    double pn = sup_norm_bound(rsrc, 0.0);
    double rel = pn > 0 ? sup_norm_bound(rr, 0.0) / pn : 0.0;
    auto& slot = res.residual_rel[cls];
    slot = std::max(slot, rel);
    res.max_residual_rel = std::max(res.max_residual_rel, rel);
  };

  // ---- x block: d_omega F^x = R^x - [R^x]
  if (!R.x.is_zero()) {
    auto [avg, tilde] = average_and_tilde(R.x);
    res.Rx_avg = avg.real();
    if (!tilde.is_zero()) {
      double mind = 1e300;
      res.F.x = solve_dw(N.omega, tilde, prof, &mind);
      res.min_divisor = std::min(res.min_divisor, mind);
      note_residual("x", res.F.x, 0.0, {}, tilde);
    }
  }
  // ---- y blocks
  for (auto& [j, f] : R.y) {
    auto [avg, tilde] = average_and_tilde(f);
    res.Ry_avg[j] = avg;
    if (tilde.is_zero()) continue;
    double mind = 1e300;
    res.F.y[j] = solve_dw(N.omega, tilde, prof, &mind);
    res.min_divisor = std::min(res.min_divisor, mind);
    note_residual("y", res.F.y[j], 0.0, {}, tilde);
  }

  // generic variable-coefficient block: d_omega f + i(Sbar + Stilde) f = r
  auto solve_generic = [&](const std::string& cls, const TorusFourier& r,
                           const std::vector<std::pair<int, double>>& combo)
      -> TorusFourier {
    double sbar = shift_const(N, combo);
    // divisor bounds scale with <l>_2 = |sum sign * m^2|
    double l2w = 0.0;
    for (auto& [m, sgn] : combo) l2w += sgn * double(m) * double(m);
    l2w = std::abs(l2w);
    if (std::abs(sbar) < prof.m_lower * l2w)
      throw SmallDivisor("solve_block_F (" + cls +
                             "): |<l,Omega>| below m <l>_2",
                         {}, std::abs(sbar), prof.m_lower * l2w);
    DiophantineProfile bp = prof;
    bp.beta = prof.beta * std::max(l2w, 1e-300);
    auto stages = shift_stages(N, combo);
    std::vector<TorusFourier> a_stages;
    for (auto& st : stages) {
      TorusFourier a = st;
      if (!a.is_zero()) a *= cplx(1.0 / sbar);
      a_stages.push_back(std::move(a));
    }
    VarSolveReport vrep;
    TorusFourier f = solve_large_variable(N.omega, cplx(-sbar), a_stages,
                                          aligned(r, r.index_set) * I, bp, w,
                                          K, &vrep);
    res.min_divisor = std::min(res.min_divisor, vrep.min_divisor);
    res.tail += vrep.tail;
    note_residual(cls, f, sbar, stages, r);
    return f;
  };

  for (auto& [j, r] : R.z)
    if (!r.is_zero()) res.F.z[j] = solve_generic("z", r, {{j, 1.0}});
  for (auto& [j, r] : R.zbar)
    if (!r.is_zero()) res.F.zbar[j] = solve_generic("zbar", r, {{j, -1.0}});
  for (auto& [ij, r] : R.zz)
    if (!r.is_zero())
      res.F.zz[ij] = solve_generic(
          "zz", r, {{ij.first, 1.0}, {ij.second, 1.0}});
  for (auto& [ij, r] : R.zbzb)
    if (!r.is_zero())
      res.F.zbzb[ij] = solve_generic(
          "zbzb", r, {{ij.first, -1.0}, {ij.second, -1.0}});

  for (auto& [ij, r] : R.zzbar) {
    if (r.is_zero()) continue;
    auto [i, j] = ij;
    if (i == j) {  // normal-frequency drift
      res.diag[j] = r;
      continue;
    }
    if (i == -j) {  // anti-diagonal: Liu-Yuan with guard
      if (std::abs(j) > K) {
        res.leftover[ij] = r;
        continue;
      }
      double sum_gamma = 0.0;
      for (size_t l = 0; l < std::max<size_t>(prof.gamma_stages.size(), 1); ++l)
        sum_gamma += prof.gamma_at(l);
      double sigma = w.s / 20.0;
      double lhs = std::exp(prof.guard_C * K * w.s * sum_gamma);
      double rhs = std::pow(sigma, -prof.guard_C * (double(n) + prof.tau));
      if (!(lhs <= rhs))
        throw GuardViolation("solve_block_F: anti-diagonal guard failed");
      double sbar = shift_const(N, {{i, 1.0}, {j, -1.0}});
      auto stages = shift_stages(N, {{i, 1.0}, {j, -1.0}});
      std::vector<TorusFourier> mu;
      for (auto& st : stages) mu.push_back(st);
      VarSolveReport vrep;
      TorusFourier f =
          solve_liu_yuan(N.omega, cplx(sbar), mu, aligned(r, r.index_set) * (-I),
                         prof, w, K, 0.0, &vrep);
      res.min_divisor = std::min(res.min_divisor, vrep.min_divisor);
      res.tail += vrep.tail;
      note_residual("zzbar_anti", f, sbar, stages, r);
      res.F.zzbar[ij] = std::move(f);
      continue;
    }
    res.F.zzbar[ij] = solve_generic("zzbar", r, {{i, 1.0}, {j, -1.0}});
  }
  return res;
}

// ---- dense oracle and operator norm ---------------------------------------

static void fill_ball(std::vector<ivec>& out, ivec& cur, int dim, int K) {
  if (int(cur.size()) == dim) {
    out.push_back(cur);
    return;
  }
  int used = l1_norm(cur);
  for (int v = -(K - used); v <= K - used; ++v) {
    cur.push_back(v);
    fill_ball(out, cur, dim, K);
    cur.pop_back();
  }
}

std::vector<ivec> l1_ball(int dim, int K) {
  std::vector<ivec> out;
  ivec cur;
  fill_ball(out, cur, dim, K);
  return out;
}

TorusFourier dense_oracle_solve(const FreqMap& omega, cplx lambda,
                                const TorusFourier& mu, const TorusFourier& p,
                                const ivec& index_set, int K,
                                double* condition_number) {
  auto modes = l1_ball(int(index_set.size()), K);
  std::map<ivec, int> pos;
  for (size_t i = 0; i < modes.size(); ++i) pos[modes[i]] = int(i);
  const int N = int(modes.size());
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N, N);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
  TorusFourier mua = mu.is_zero() ? mu : aligned(mu, index_set);
  TorusFourier pa = aligned(p, index_set);
  for (int row = 0; row < N; ++row) {
    const ivec& k = modes[row];
    M(row, row) += dot_k_omega(k, index_set, omega) + lambda;
    if (!mua.is_zero())
      for (int col = 0; col < N; ++col) {
        ivec d(k.size());
        for (size_t q = 0; q < k.size(); ++q) d[q] = k[q] - modes[col][q];
        cplx mc = mua.at(d);
        if (mc != cplx(0.0)) M(row, col) += mc;
      }
    rhs(row) = pa.at(k);
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
  if (!lu.isInvertible())
    throw SingularSystem("dense_oracle_solve: operator not invertible");
  Eigen::VectorXcd sol = lu.solve(rhs);
  if (condition_number) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    auto sv = svd.singularValues();
    *condition_number = sv(0) / sv(sv.size() - 1);
  }
  TorusFourier u;
  u.index_set = index_set;
  u.cutoff = K;
  for (int i = 0; i < N; ++i)
    if (sol(i) != cplx(0.0)) u.coeffs[modes[i]] = sol(i);
  return u;
}

double matrix_norm_bound(
    const std::map<std::pair<int, int>, double>& R_elements, int n,
    double sigma) {
  if (R_elements.empty()) return 0.0;
  std::vector<int> idx;
  for (auto& [ij, v] : R_elements) {
    idx.push_back(ij.first);
    idx.push_back(ij.second);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  std::map<int, int> pos;
  for (size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = int(i);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(int(idx.size()), int(idx.size()));
  for (auto& [ij, v] : R_elements)
    M(pos[ij.first], pos[ij.second]) = std::abs(v);
  double opnorm = M.jacobiSvd().singularValues()(0);
  return std::pow(4.0, n + 2) / std::pow(sigma, n) * opnorm;
}

}  // namespace kam
