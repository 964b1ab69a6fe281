#include "kam/structure.hpp"

#include <algorithm>
#include <cmath>

namespace kam {

namespace {

// differentiate a z/zbar exponent list in one variable; false if absent
bool deriv_step(ZPow& e, int mode, cplx& coef) {
  int p = zpow_get(e, mode);
  if (p == 0) return false;
  coef *= double(p);
  e = zpow_set(e, mode, p - 1);
  return true;
}

struct VarSel {
  bool bar;
  int mode;
};

std::pair<VarSel, VarSel> select_vars(int m, int n, int t, BlockKind kind) {
  switch (kind) {
    case BlockKind::zzbar:
      return {{false, m + t}, {true, n + t}};
    case BlockKind::zz:
      return {{false, m + t}, {false, n - t}};
    default:
      return {{true, m + t}, {true, n - t}};
  }
}

int decay_dist(int m, int n, BlockKind kind) {
  return kind == BlockKind::zzbar ? std::abs(n - m) : std::abs(n + m);
}

double mn_weight(int m, int n) {
  return std::max(1, std::abs(m) + std::abs(n));
}

}  // namespace

TorusFourier second_derivative_block(const HamiltonianPoly& P, int m, int n,
                                     int t, BlockKind kind,
                                     const std::map<int, cplx>& profile) {
  auto [v1, v2] = select_vars(m, n, t, kind);
  if (v1.mode == 0 || v2.mode == 0)
    throw ModeOutOfRange("second_derivative_block: mode 0 selected");
  auto value = [&](int j) {
    auto it = profile.find(j);
    return it == profile.end() ? cplx(0.0) : it->second;
  };
  TorusFourier out;
  out.index_set = P.tangent;
  for (const auto& [mk, c] : P.terms) {
    if (l1_norm(mk.l) != 0) continue;  // torus section y = 0
    ZPow a = mk.alpha, b = mk.beta;
    cplx coef = c;
    if (!deriv_step(v1.bar ? b : a, v1.mode, coef)) continue;
    if (!deriv_step(v2.bar ? b : a, v2.mode, coef)) continue;
    for (auto [j, p] : a) coef *= std::pow(value(j), p);
    for (auto [j, p] : b) coef *= std::pow(std::conj(value(j)), p);
    if (coef != cplx(0.0)) out.set(mk.k, out.at(mk.k) + coef);
  }
  return out;
}

ExpansionFit fit_t_expansion(const std::map<int, TorusFourier>& samples,
                             const std::array<int, 3>& degrees, double s) {
  if (samples.size() < 3)
    throw IllConditionedFit("fit_t_expansion: fewer than 3 t-samples");
  ExpansionFit fit;
  fit.degrees = degrees;

  double M[3][3] = {};
  for (const auto& [t, f] : samples) {
    fit.t_samples.push_back(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        M[i][j] += std::pow(double(t), degrees[i] + degrees[j]);
  }

  std::map<ivec, std::array<cplx, 3>> rhs;
  ivec index_set = samples.begin()->second.index_set;
  for (const auto& [t, f] : samples)
    for (const auto& [k, c] : f.coeffs)
      for (int i = 0; i < 3; ++i)
        rhs[k][i] += std::pow(double(t), degrees[i]) * c;

  // normal-equation solve per harmonic: 3x3 elimination with partial pivoting
  auto solve3 = [&](const std::array<cplx, 3>& b) {
    double U[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) U[i][j] = M[i][j];
    std::array<cplx, 3> bb = b, x;
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::abs(U[r][col]) > std::abs(U[piv][col])) piv = r;
      std::swap(U[col], U[piv]);
      std::swap(bb[col], bb[piv]);
      if (std::abs(U[col][col]) < 1e-300)
        throw IllConditionedFit("fit_t_expansion: degenerate t-window");
      for (int r = col + 1; r < 3; ++r) {
        double f = U[r][col] / U[col][col];
        for (int j = col; j < 3; ++j) U[r][j] -= f * U[col][j];
        bb[r] -= f * bb[col];
      }
    }
    for (int i = 2; i >= 0; --i) {
      cplx acc = bb[i];
      for (int j = i + 1; j < 3; ++j) acc -= U[i][j] * x[j];
      x[i] = acc / U[i][i];
    }
    return x;
  };

  for (auto& f : fit.coef) f.index_set = index_set;
  for (const auto& [k, b] : rhs) {
    auto x = solve3(b);
    for (int i = 0; i < 3; ++i)
      if (x[i] != cplx(0.0)) fit.coef[i].set(k, x[i]);
  }

  double scale = 0.0;
  for (const auto& [t, f] : samples)
    scale = std::max(scale, sup_norm_bound(f, s));
  for (const auto& [t, f] : samples) {
    TorusFourier model;
    model.index_set = index_set;
    for (int i = 0; i < 3; ++i)
      model += fit.coef[i] * cplx(std::pow(double(t), degrees[i]));
    double miss = sup_norm_bound(f - model, s);
    fit.fit_residual = std::max(fit.fit_residual, miss / std::max(1.0, scale));
  }
  return fit;
}

namespace {

StructureReport run_sweep(const HamiltonianPoly& P, double Lambda, double eps,
                          double rho, const SweepConfig& sweep,
                          const AnalyticityWindow& w, bool fae) {
  const std::array<int, 3> degrees =
      fae ? std::array<int, 3>{1, 0, -1} : std::array<int, 3>{0, -1, -2};
  StructureReport rep;

  // parameter-family samples for the sigma-derivative checks
  std::map<int, std::pair<HamiltonianPoly, HamiltonianPoly>> fam;
  if (sweep.family) {
    for (int d : sweep.sigma_probes) {
      double h = 1e-6 / std::abs(d);
      auto sp = sweep.sigma0, sm = sweep.sigma0;
      sp[d] += h;
      sm[d] -= h;
      fam.emplace(d, std::pair{sweep.family(sp), sweep.family(sm)});
    }
  }

  for (auto [m, n] : sweep.pairs) {
    for (BlockKind kind :
         {BlockKind::zzbar, BlockKind::zz, BlockKind::zbzb}) {
      PairReport pr;
      pr.m = m;
      pr.n = n;
      pr.kind = kind;
      const int d0 = decay_dist(m, n, kind);
      const double E = eps * std::exp(-d0 * rho);
      const double mn = mn_weight(m, n);

      std::map<int, TorusFourier> samples;
      for (int t : sweep.t_values) {
        if (t == 0 || std::abs(t) < Lambda * std::max(std::abs(m), std::abs(n)))
          continue;
        auto [v1, v2] = select_vars(m, n, t, kind);
        if (v1.mode == 0 || v2.mode == 0) continue;
        TorusFourier D = second_derivative_block(P, m, n, t, kind,
                                                 sweep.profile);
        double raw = sup_norm_bound(D, w.s);
        double weight =
            fae ? std::max(std::abs(v1.mode), std::abs(v2.mode)) : 1.0;
        pr.raw_margin = std::min(pr.raw_margin, weight * E - raw);
        samples.emplace(t, std::move(D));
      }

      if (samples.size() >= 3) {
        auto fit = fit_t_expansion(samples, degrees, w.s);
        pr.fit_residual = fit.fit_residual;
        pr.coef_bound = {E, (1.0 + mn) * E, (1.0 + mn + mn * mn) * E};
        for (int i = 0; i < 3; ++i)
          pr.coef_norm[i] = sup_norm_bound(fit.coef[i], w.s);

        // t-independence of the leading coefficient: refit disjoint halves
        if (samples.size() >= 6) {
          std::map<int, TorusFourier> lo, hi;
          size_t idx = 0, half = samples.size() / 2;
          for (auto& [t, f] : samples)
            (idx++ < half ? lo : hi).emplace(t, f);
          auto flo = fit_t_expansion(lo, degrees, w.s);
          auto fhi = fit_t_expansion(hi, degrees, w.s);
          pr.refit_gap = sup_norm_bound(flo.coef[0] - fhi.coef[0], w.s);
          if (pr.refit_gap >
              sweep.refit_tol * std::max(1.0, pr.coef_norm[0]))
            pr.pass = false;
        }

        for (int i = 0; i < 3; ++i)
          if (pr.coef_norm[i] > pr.coef_bound[i] * (1.0 + 1e-9))
            pr.pass = false;

        // sigma-derivative of the 1/t-slot coefficient by central differences
        for (auto& [d, pp] : fam) {
          double h = 1e-6 / std::abs(d);
          std::map<int, TorusFourier> sp, sm;
          for (auto& [t, unused] : samples) {
            sp.emplace(t, second_derivative_block(pp.first, m, n, t, kind,
                                                  sweep.profile));
            sm.emplace(t, second_derivative_block(pp.second, m, n, t, kind,
                                                  sweep.profile));
          }
          auto fp = fit_t_expansion(sp, degrees, w.s);
          auto fm = fit_t_expansion(sm, degrees, w.s);
          double meas =
              sup_norm_bound((fp.coef[2] - fm.coef[2]) * cplx(0.5 / h), w.s);
          double env = 0.0;
          for (auto& [t, unused] : samples) {
            double t1, t2;
            if (kind == BlockKind::zzbar) {
              t1 = std::exp(-std::abs(m + t - d) * rho) *
                   std::exp(-std::abs(n + t - d) * rho);
              t2 = std::exp(-std::abs(m + t + d) * rho) *
                   std::exp(-std::abs(n + t + d) * rho);
            } else {
              t1 = std::exp(-std::abs(m + t - d) * rho) *
                   std::exp(-std::abs(n - t + d) * rho);
              t2 = std::exp(-std::abs(m + t + d) * rho) *
                   std::exp(-std::abs(n - t - d) * rho);
            }
            env = std::max(env, eps * (mn * mn * std::exp(-d0 * rho) /
                                           std::abs(d) +
                                       std::abs(t) * (t1 + t2)));
          }
          pr.sigma_margin = std::min(pr.sigma_margin, env - meas);
          if (meas > env * (1.0 + 1e-9)) pr.pass = false;
        }
      }

      if (pr.raw_margin < -1e-12 * std::max(1.0, E)) pr.pass = false;
      rep.pass = rep.pass && pr.pass;
      rep.max_fit_residual = std::max(rep.max_fit_residual, pr.fit_residual);
      rep.min_margin = std::min(rep.min_margin, pr.raw_margin);
      rep.entries.push_back(std::move(pr));
    }
  }
  return rep;
}

}  // namespace

StructureReport verify_fae(const HamiltonianPoly& P, double Lambda, double eps,
                           double rho, const SweepConfig& sweep,
                           const AnalyticityWindow& w) {
  return run_sweep(P, Lambda, eps, rho, sweep, w, true);
}

StructureReport verify_sae(const HamiltonianPoly& F, double Lambda, double eps,
                           double rho, const SweepConfig& sweep,
                           const AnalyticityWindow& w) {
  return run_sweep(F, Lambda, eps, rho, sweep, w, false);
}

FrequencyDecomposition frequency_expansion(const std::map<int, double>& lambda,
                                           const std::map<int, double>& sigma,
                                           const std::vector<int>& n_window) {
  if (n_window.size() < 4)
    throw IllConditionedFit("frequency_expansion: window below 4 points");
  bool pos = false, neg = false;
  for (int n : n_window) (n > 0 ? pos : neg) = true;
  if (!pos || !neg)
    throw IllConditionedFit("frequency_expansion: window must span both signs");

  auto sig = [&](int n) {
    auto it = sigma.find(n);
    return it == sigma.end() ? 0.0 : it->second;
  };
  auto resid = [&](int n) {
    auto it = lambda.find(n);
    if (it == lambda.end())
      throw ModeOutOfRange("frequency_expansion: missing frequency");
    return it->second - double(n) * n - sig(n);
  };

  double s1 = 0, sn = 0, snn = 0, sr = 0, snr = 0;
  for (int n : n_window) {
    double r = resid(n);
    s1 += 1.0;
    sn += n;
    snn += double(n) * n;
    sr += r;
    snr += n * r;
  }
  double det = snn * s1 - sn * sn;
  if (std::abs(det) < 1e-300)
    throw IllConditionedFit("frequency_expansion: degenerate window");
  FrequencyDecomposition out;
  out.lambda_bar = (snr * s1 - sn * sr) / det;
  out.lambda_tilde = (snn * sr - sn * snr) / det;
  for (const auto& [n, lam] : lambda) {
    double hat = lam - double(n) * n - sig(n) - n * out.lambda_bar -
                 out.lambda_tilde;
    out.lambda_hat[n] = hat;
    out.decay = std::max(out.decay, std::abs(n) * std::abs(hat));
  }
  return out;
}

TailReport check_error_tail(const std::map<int, TorusFourier>& R_antidiag,
                            int K, double rho, double r, double eps,
                            double s, double safety) {
  TailReport rep;
  double coef_sum = 0.0;
  for (const auto& [j, f] : R_antidiag)
    if (std::abs(j) > K) coef_sum += sup_norm_bound(f, s);
  rep.tail = r * r * coef_sum;
  rep.envelope = safety * r * r * eps * std::exp(-rho * K);
  rep.measured_C = coef_sum / (eps * std::exp(-rho * K));
  rep.pass = rep.tail <= rep.envelope;
  return rep;
}

}  // namespace kam
