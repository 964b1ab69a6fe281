#include "kam/dnls.hpp"

#include <cmath>
#include <numbers>

namespace kam {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

ZPow pair_pow(int i, int j) {
  ZPow z;
  z = zpow_set(z, i, zpow_get(z, i) + 1);
  z = zpow_set(z, j, zpow_get(z, j) + 1);
  return z;
}
}  // namespace

HamiltonianPoly build_hamiltonian(const DnlsConfig& cfg) {
  HamiltonianPoly H;
  H.tangent = {};
  H.jmax = cfg.jmax;
  H.degree_cap = cfg.degree_cap;
  H.kcap = std::numeric_limits<int>::max();

  auto sigma_of = [&](int j) {
    auto it = cfg.sigma.find(j);
    return it == cfg.sigma.end() ? 0.0 : it->second;
  };

  for (int j = -cfg.jmax; j <= cfg.jmax; ++j) {
    if (j == 0) continue;
    MonoKey m;
    m.alpha = zpow_set({}, j, 1);
    m.beta = zpow_set({}, j, 1);
    H.add_term(m, 0.5 * (double(j) * j + sigma_of(j)), cfg.window);
  }

  // -(i/4) int ubar^2 u u_x dx over ordered quadruples qbar_a qbar_b q_c q_d
  // with a+b = c+d; each 1/sqrt(2 pi) mode factor and the 2 pi from the
  // integral leave 1/(2 pi) overall.
  const double quart = 0.25 / two_pi;
  for (int a = -cfg.jmax; a <= cfg.jmax; ++a) {
    if (a == 0) continue;
    for (int b = -cfg.jmax; b <= cfg.jmax; ++b) {
      if (b == 0) continue;
      for (int c = -cfg.jmax; c <= cfg.jmax; ++c) {
        if (c == 0) continue;
        int d = a + b - c;
        if (d == 0 || d < -cfg.jmax || d > cfg.jmax) continue;
        MonoKey m;
        m.alpha = pair_pow(c, d);
        m.beta = pair_pow(a, b);
        H.add_term(m, quart * d, cfg.window);
      }
    }
  }
  return H;
}

InitialSystem initial_action_angle(const HamiltonianPoly& H,
                                   const DnlsConfig& cfg) {
  InitialSystem sys;
  sys.P.tangent = {};
  sys.P.jmax = H.jmax;
  sys.P.degree_cap = H.degree_cap;
  sys.P.kcap = H.kcap;
  sys.P.tail = H.tail;

  for (const auto& [m, c] : H.terms) {
    bool diag_quad = m.k.empty() && m.l.empty() && m.alpha.size() == 1 &&
                     m.alpha == m.beta && m.alpha[0].second == 1;
    if (diag_quad)
      sys.N.Omega_const[m.alpha[0].first] += c.real();
    else
      sys.P.add_term(m, c, cfg.window);
  }
  excite_oscillators(sys.N, sys.P, 1, cfg.I1, cfg.Im1, cfg.window,
                     cfg.series_order, &sys.tail);
  // the excited constant 2 Omega_{+-1} I_{+-1} is dropped with the rest of
  // the constant terms
  for (auto it = sys.P.terms.begin(); it != sys.P.terms.end();) {
    const MonoKey& m = it->first;
    bool constant = m.alpha.empty() && m.beta.empty() &&
                    l1_norm(m.k) == 0 && l1_norm(m.l) == 0;
    it = constant ? sys.P.terms.erase(it) : std::next(it);
  }
  return sys;
}

P0Derivatives p0_second_derivatives(const std::map<int, cplx>& u, int m,
                                    int n, int t) {
  auto at = [&](int j) {
    auto it = u.find(j);
    return it == u.end() ? cplx(0.0) : it->second;
  };
  P0Derivatives out{};
  // all three integrals collapse by orthogonality; the two phi-normalization
  // factors of the surviving quadratic leave 1/(2 pi)
  for (const auto& [b, ub] : u) {
    out.zzbar += 0.5 * double(b + m + t) * std::conj(at(b + m - n)) * ub;
    cplx ua = at(n + m - b);
    out.zz += 0.25 * double(n + m) * std::conj(ua) * std::conj(ub);
    out.zbzb += 0.5 * double(b) * ua * ub;
  }
  out.zzbar /= two_pi;
  out.zz /= two_pi;
  out.zbzb /= two_pi;
  return out;
}

std::map<int, cplx> default_u_profile(const DnlsConfig& cfg) {
  return {{1, std::sqrt(2.0 * cfg.I1)}, {-1, std::sqrt(2.0 * cfg.Im1)}};
}

}  // namespace kam
