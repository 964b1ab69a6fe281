#include "kam/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kam {

int zpow_total(const ZPow& z) {
  int s = 0;
  for (auto& [m, p] : z) s += p;
  return s;
}

int zpow_get(const ZPow& z, int mode) {
  for (auto& [m, p] : z)
    if (m == mode) return p;
  return 0;
}

ZPow zpow_set(ZPow z, int mode, int power) {
  auto it = std::find_if(z.begin(), z.end(),
                         [&](auto& e) { return e.first == mode; });
  if (it != z.end()) {
    if (power == 0)
      z.erase(it);
    else
      it->second = power;
    return z;
  }
  if (power == 0) return z;
  z.push_back({mode, power});
  std::sort(z.begin(), z.end());
  return z;
}

static ZPow zpow_merge(const ZPow& a, const ZPow& b) {
  ZPow out;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
      out.push_back(a[i++]);
    else if (i == a.size() || b[j].first < a[i].first)
      out.push_back(b[j++]);
    else {
      out.push_back({a[i].first, a[i].second + b[j].second});
      ++i, ++j;
    }
  }
  return out;
}

cplx HamiltonianPoly::at(const MonoKey& m) const {
  auto it = terms.find(m);
  return it == terms.end() ? cplx(0.0) : it->second;
}

double z_weight(int j, const AnalyticityWindow& w) {
  double aj = std::abs(double(j));
  return 1.0 / (std::pow(aj, w.p) * std::exp(w.a * aj));
}

double mono_majorant(const MonoKey& m, cplx c, const AnalyticityWindow& w) {
  double v = std::abs(c) * std::exp(l1_norm(m.k) * w.s);
  int ltot = 0;
  for (int li : m.l) ltot += li;
  v *= std::pow(w.r * w.r, ltot);
  for (auto& [j, p] : m.alpha) v *= std::pow(w.r * z_weight(j, w), p);
  for (auto& [j, p] : m.beta) v *= std::pow(w.r * z_weight(j, w), p);
  return v;
}

double poly_majorant(const HamiltonianPoly& P, const AnalyticityWindow& w) {
  double v = 0.0;
  for (auto& [m, c] : P.terms) v += mono_majorant(m, c, w);
  return v;
}

void HamiltonianPoly::add_term(const MonoKey& m, cplx c,
                               const AnalyticityWindow& w) {
  if (c == cplx(0.0)) return;
  int ltot = 0;
  for (int li : m.l) ltot += li;
  int deg = 2 * ltot + zpow_total(m.alpha) + zpow_total(m.beta);
  bool over_jmax = false;
  for (auto& [j, p] : m.alpha) over_jmax |= std::abs(j) > jmax;
  for (auto& [j, p] : m.beta) over_jmax |= std::abs(j) > jmax;
  if (deg > degree_cap || l1_norm(m.k) > kcap || over_jmax) {
    tail += mono_majorant(m, c, w);
    return;
  }
  auto [it, fresh] = terms.try_emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == cplx(0.0)) terms.erase(it);
  }
}

HamiltonianPoly& HamiltonianPoly::operator+=(const HamiltonianPoly& g) {
  if (tangent != g.tangent) {
    HamiltonianPoly ga = align_poly(g, tangent);
    return *this += ga;
  }
  for (auto& [m, c] : g.terms) {
    auto [it, fresh] = terms.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == cplx(0.0)) terms.erase(it);
    }
  }
  tail += g.tail;
  return *this;
}

HamiltonianPoly& HamiltonianPoly::operator-=(const HamiltonianPoly& g) {
  HamiltonianPoly neg = g;
  neg *= cplx(-1.0);
  return *this += neg;
}

HamiltonianPoly& HamiltonianPoly::operator*=(cplx c) {
  if (c == cplx(0.0)) {
    terms.clear();
    return *this;
  }
  for (auto& [m, v] : terms) v *= c;
  tail *= std::abs(c);
  return *this;
}

HamiltonianPoly align_poly(const HamiltonianPoly& P, const ivec& new_tangent) {
  if (P.tangent == new_tangent) return P;
  std::vector<size_t> pos(P.tangent.size());
  for (size_t i = 0; i < P.tangent.size(); ++i) {
    auto it = std::lower_bound(new_tangent.begin(), new_tangent.end(),
                               P.tangent[i]);
    if (it == new_tangent.end() || *it != P.tangent[i])
      throw DimensionMismatch("align_poly: target not a superset");
    pos[i] = size_t(it - new_tangent.begin());
  }
  HamiltonianPoly Q;
  Q.tangent = new_tangent;
  Q.jmax = P.jmax;
  Q.degree_cap = P.degree_cap;
  Q.kcap = P.kcap;
  Q.tail = P.tail;
  for (auto& [m, c] : P.terms) {
    MonoKey mm;
    mm.k.assign(new_tangent.size(), 0);
    mm.l.assign(new_tangent.size(), 0);
    for (size_t i = 0; i < pos.size(); ++i) {
      mm.k[pos[i]] = m.k[i];
      mm.l[pos[i]] = m.l[i];
    }
    mm.alpha = m.alpha;
    mm.beta = m.beta;
    Q.terms[std::move(mm)] = c;
  }
  return Q;
}

HamiltonianPoly poly_mul(const HamiltonianPoly& A, const HamiltonianPoly& B,
                         const AnalyticityWindow& w) {
  ivec t = union_index_set(A.tangent, B.tangent);
  HamiltonianPoly Aa = align_poly(A, t), Ba = align_poly(B, t);
  HamiltonianPoly C;
  C.tangent = t;
  C.jmax = std::max(A.jmax, B.jmax);
  C.degree_cap = std::min(A.degree_cap, B.degree_cap);
  C.kcap = std::min(A.kcap, B.kcap);
  size_t n = t.size();
  for (auto& [ma, ca] : Aa.terms)
    for (auto& [mb, cb] : Ba.terms) {
      MonoKey m;
      m.k.resize(n);
      m.l.resize(n);
      for (size_t i = 0; i < n; ++i) {
        m.k[i] = ma.k[i] + mb.k[i];
        m.l[i] = ma.l[i] + mb.l[i];
      }
      m.alpha = zpow_merge(ma.alpha, mb.alpha);
      m.beta = zpow_merge(ma.beta, mb.beta);
      C.add_term(m, ca * cb, w);
    }
  return C;
}

// ---- Poisson bracket -------------------------------------------------------

// contribution of one term pair to {F,G}, accumulated into out
static void bracket_pair(HamiltonianPoly& out, const AnalyticityWindow& w,
                         const MonoKey& m1, cplx c1, const MonoKey& m2,
                         cplx c2, size_t n) {
  const cplx I(0.0, 1.0);
  // tangential: sum_i F_{x_i} G_{y_i} - F_{y_i} G_{x_i}
  for (size_t i = 0; i < n; ++i) {
    cplx coef = I * double(m1.k[i]) * double(m2.l[i]) * c1 * c2 -
                double(m1.l[i]) * I * double(m2.k[i]) * c1 * c2;
    if (coef == cplx(0.0)) continue;
    MonoKey m;
    m.k.resize(n);
    m.l.resize(n);
    for (size_t q = 0; q < n; ++q) {
      m.k[q] = m1.k[q] + m2.k[q];
      m.l[q] = m1.l[q] + m2.l[q];
    }
    m.l[i] -= 1;
    m.alpha = zpow_merge(m1.alpha, m2.alpha);
    m.beta = zpow_merge(m1.beta, m2.beta);
    out.add_term(m, coef, w);
  }
  // normal: i sum_j F_{z_j} G_{zbar_j} - F_{zbar_j} G_{z_j}
  auto normal_part = [&](const ZPow& a1, const ZPow& b2, cplx sign) {
    // derivative wrt z_j from m1 (power a1) and wrt zbar_j from m2 (power b2)
    for (auto& [j, p1] : a1) {
      int p2 = zpow_get(b2, j);
      if (p2 == 0) continue;
      cplx coef = sign * I * double(p1) * double(p2) * c1 * c2;
      MonoKey m;
      m.k.resize(n);
      m.l.resize(n);
      for (size_t q = 0; q < n; ++q) {
        m.k[q] = m1.k[q] + m2.k[q];
        m.l[q] = m1.l[q] + m2.l[q];
      }
      // in both orientations the product loses one z_j and one zbar_j
      ZPow am = zpow_merge(m1.alpha, m2.alpha);
      ZPow bm = zpow_merge(m1.beta, m2.beta);
      m.alpha = zpow_set(am, j, zpow_get(am, j) - 1);
      m.beta = zpow_set(bm, j, zpow_get(bm, j) - 1);
      out.add_term(m, coef, w);
    }
  };
  normal_part(m1.alpha, m2.beta, cplx(1.0));
  normal_part(m1.beta, m2.alpha, cplx(-1.0));
}

HamiltonianPoly poisson_bracket(const HamiltonianPoly& F,
                                const HamiltonianPoly& G,
                                const AnalyticityWindow& w, bool parallel) {
  ivec t = union_index_set(F.tangent, G.tangent);
  HamiltonianPoly Fa = align_poly(F, t), Ga = align_poly(G, t);
  size_t n = t.size();

  auto make_empty = [&]() {
    HamiltonianPoly H;
    H.tangent = t;
    H.jmax = std::max(F.jmax, G.jmax);
    H.degree_cap = std::min(F.degree_cap, G.degree_cap);
    H.kcap = std::min(F.kcap, G.kcap);
    return H;
  };

  // fixed shard decomposition of F's terms; merge order is shard order, so
  // the result is identical for the serial path and any thread count
  const int shards = 64;
  std::vector<const std::pair<const MonoKey, cplx>*> fterms;
  fterms.reserve(Fa.terms.size());
  for (auto& e : Fa.terms) fterms.push_back(&e);
  std::vector<HamiltonianPoly> partial(shards);
  for (auto& p : partial) p = make_empty();

  auto work = [&](int sh) {
    for (size_t idx = sh; idx < fterms.size(); idx += shards)
      for (auto& [m2, c2] : Ga.terms)
        bracket_pair(partial[sh], w, fterms[idx]->first, fterms[idx]->second,
                     m2, c2, n);
  };
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int sh = 0; sh < shards; ++sh) work(sh);
  } else {
    for (int sh = 0; sh < shards; ++sh) work(sh);
  }
  HamiltonianPoly H = make_empty();
  for (int sh = 0; sh < shards; ++sh) H += partial[sh];
  return H;
}

// ---- truncation and blocks -------------------------------------------------

std::pair<HamiltonianPoly, HamiltonianPoly> taylor_truncate_R(
    const HamiltonianPoly& P) {
  HamiltonianPoly R = P, rest = P;
  R.terms.clear();
  rest.terms.clear();
  R.tail = rest.tail = 0.0;
  for (auto& [m, c] : P.terms) {
    int ltot = 0;
    for (int li : m.l) ltot += li;
    int deg = 2 * ltot + zpow_total(m.alpha) + zpow_total(m.beta);
    if (deg <= 2 && ltot <= 1)
      R.terms[m] = c;
    else
      rest.terms[m] = c;
  }
  rest.tail = P.tail;  // cap losses stay with the remainder budget
  return {R, rest};
}

RBlocks split_blocks(const HamiltonianPoly& R) {
  RBlocks b;
  b.x.index_set = R.tangent;
  auto put = [&](TorusFourier& f, const ivec& k, cplx c) {
    if (f.index_set.empty() && !R.tangent.empty()) f.index_set = R.tangent;
    f.set(k, f.at(k) + c);
  };
  for (auto& [m, c] : R.terms) {
    int ltot = 0, lpos = -1;
    for (size_t i = 0; i < m.l.size(); ++i)
      if (m.l[i] > 0) {
        ltot += m.l[i];
        lpos = int(i);
      }
    int na = zpow_total(m.alpha), nb = zpow_total(m.beta);
    if (ltot == 1 && na == 0 && nb == 0) {
      put(b.y[R.tangent[lpos]], m.k, c);
    } else if (ltot == 0 && na == 0 && nb == 0) {
      put(b.x, m.k, c);
    } else if (ltot == 0 && na == 1 && nb == 0) {
      put(b.z[m.alpha[0].first], m.k, c);
    } else if (ltot == 0 && na == 0 && nb == 1) {
      put(b.zbar[m.beta[0].first], m.k, c);
    } else if (ltot == 0 && na == 2 && nb == 0) {
      int i = m.alpha[0].first;
      int j = m.alpha.size() == 2 ? m.alpha[1].first : i;
      put(b.zz[{std::min(i, j), std::max(i, j)}], m.k, c);
    } else if (ltot == 0 && na == 0 && nb == 2) {
      int i = m.beta[0].first;
      int j = m.beta.size() == 2 ? m.beta[1].first : i;
      put(b.zbzb[{std::min(i, j), std::max(i, j)}], m.k, c);
    } else if (ltot == 0 && na == 1 && nb == 1) {
      put(b.zzbar[{m.alpha[0].first, m.beta[0].first}], m.k, c);
    } else {
      throw Error("split_blocks: R contains a term above quadratic order");
    }
  }
  return b;
}

HamiltonianPoly assemble_blocks(const RBlocks& b, const ivec& tangent,
                                int jmax, int degree_cap, int kcap) {
  HamiltonianPoly P;
  P.tangent = tangent;
  P.jmax = jmax;
  P.degree_cap = degree_cap;
  P.kcap = kcap;
  AnalyticityWindow w;  // caps chosen by caller; tails should not trigger
  size_t n = tangent.size();
  auto base = [&]() {
    MonoKey m;
    m.k.assign(n, 0);
    m.l.assign(n, 0);
    return m;
  };
  auto add_tf = [&](const TorusFourier& f, MonoKey proto) {
    TorusFourier fa = aligned(f, tangent);
    for (auto& [k, c] : fa.coeffs) {
      MonoKey m = proto;
      m.k = k;
      P.add_term(m, c, w);
    }
  };
  add_tf(b.x, base());
  for (auto& [j, f] : b.y) {
    MonoKey m = base();
    auto it = std::lower_bound(tangent.begin(), tangent.end(), j);
    m.l[size_t(it - tangent.begin())] = 1;
    add_tf(f, m);
  }
  for (auto& [j, f] : b.z) {
    MonoKey m = base();
    m.alpha = {{j, 1}};
    add_tf(f, m);
  }
  for (auto& [j, f] : b.zbar) {
    MonoKey m = base();
    m.beta = {{j, 1}};
    add_tf(f, m);
  }
  for (auto& [ij, f] : b.zz) {
    MonoKey m = base();
    m.alpha = ij.first == ij.second ? ZPow{{ij.first, 2}}
                                    : ZPow{{ij.first, 1}, {ij.second, 1}};
    add_tf(f, m);
  }
  for (auto& [ij, f] : b.zbzb) {
    MonoKey m = base();
    m.beta = ij.first == ij.second ? ZPow{{ij.first, 2}}
                                   : ZPow{{ij.first, 1}, {ij.second, 1}};
    add_tf(f, m);
  }
  for (auto& [ij, f] : b.zzbar) {
    MonoKey m = base();
    m.alpha = {{ij.first, 1}};
    m.beta = {{ij.second, 1}};
    add_tf(f, m);
  }
  return P;
}

// ---- evaluation and norms --------------------------------------------------

cplx eval_poly(const HamiltonianPoly& P, const PhasePoint& pt) {
  const cplx I(0.0, 1.0);
  cplx total = 0.0;
  for (auto& [m, c] : P.terms) {
    cplx v = c;
    cplx phase = 0.0;
    for (size_t i = 0; i < P.tangent.size(); ++i) {
      int lbl = P.tangent[i];
      if (m.k[i] != 0) phase += double(m.k[i]) * pt.x.at(lbl);
      for (int q = 0; q < m.l[i]; ++q) v *= pt.y.at(lbl);
    }
    v *= std::exp(I * phase);
    for (auto& [j, p] : m.alpha)
      for (int q = 0; q < p; ++q) v *= pt.z.at(j);
    for (auto& [j, p] : m.beta)
      for (int q = 0; q < p; ++q) v *= pt.zbar.at(j);
    total += v;
  }
  return total;
}

// derivative of P wrt one variable, as a polynomial (used by vf_norm sampling)
enum class Var { x, y, z, zbar };
static HamiltonianPoly derivative(const HamiltonianPoly& P, Var var, int j) {
  HamiltonianPoly D = P;
  D.terms.clear();
  D.tail = 0.0;
  const cplx I(0.0, 1.0);
  size_t pos = 0;
  if (var == Var::x || var == Var::y) {
    auto it = std::lower_bound(P.tangent.begin(), P.tangent.end(), j);
    if (it == P.tangent.end() || *it != j) return D;
    pos = size_t(it - P.tangent.begin());
  }
  for (auto& [m, c] : P.terms) {
    MonoKey d = m;
    cplx coef = c;
    switch (var) {
      case Var::x:
        if (m.k[pos] == 0) continue;
        coef *= I * double(m.k[pos]);
        break;
      case Var::y:
        if (m.l[pos] == 0) continue;
        coef *= double(m.l[pos]);
        d.l[pos] -= 1;
        break;
      case Var::z: {
        int p = zpow_get(m.alpha, j);
        if (p == 0) continue;
        coef *= double(p);
        d.alpha = zpow_set(d.alpha, j, p - 1);
        break;
      }
      case Var::zbar: {
        int p = zpow_get(m.beta, j);
        if (p == 0) continue;
        coef *= double(p);
        d.beta = zpow_set(d.beta, j, p - 1);
        break;
      }
    }
    D.terms[d] += coef;
  }
  return D;
}

VfNorm vf_norm(const HamiltonianPoly& P, const AnalyticityWindow& w,
               int sample_count, unsigned seed) {
  VfNorm out;
  // ---- majorant: per-component coefficient bounds
  std::map<int, double> X, Y, Zb, Za;  // X=|P_y|, Y=|P_x|, Zb=|P_zbar|, Za=|P_z|
  for (auto& [m, c] : P.terms) {
    double base = mono_majorant(m, c, w);
    for (size_t i = 0; i < P.tangent.size(); ++i) {
      if (m.l[i] > 0) X[P.tangent[i]] += base * m.l[i] / (w.r * w.r);
      if (m.k[i] != 0) Y[P.tangent[i]] += base * std::abs(m.k[i]);
    }
    for (auto& [j, p] : m.beta) Zb[j] += base * p / (w.r * z_weight(j, w));
    for (auto& [j, p] : m.alpha) Za[j] += base * p / (w.r * z_weight(j, w));
  }
  double Xm = 0.0, Ym = 0.0, Z2 = 0.0, Zb2 = 0.0;
  for (auto& [j, v] : X) Xm = std::max(Xm, v);
  for (auto& [j, v] : Y) Ym = std::max(Ym, v);
  auto zw1 = [&](int j) {  // l^{a,p-1} component weight
    double aj = std::abs(double(j));
    return std::pow(aj, w.p - 1.0) * std::exp(w.a * aj);
  };
  for (auto& [j, v] : Zb) Z2 += std::pow(v * zw1(j), 2);   // zdot = i P_zbar
  for (auto& [j, v] : Za) Zb2 += std::pow(v * zw1(j), 2);  // zbardot = -i P_z
  out.majorant =
      Xm + Ym / (w.r * w.r) + std::sqrt(Z2) / w.r + std::sqrt(Zb2) / w.r;

  // ---- sampled lower bound
  if (sample_count > 0 && !P.terms.empty()) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    // collect z support
    std::vector<int> zmodes;
    for (auto& [m, c] : P.terms) {
      for (auto& [j, p] : m.alpha) zmodes.push_back(j);
      for (auto& [j, p] : m.beta) zmodes.push_back(j);
    }
    std::sort(zmodes.begin(), zmodes.end());
    zmodes.erase(std::unique(zmodes.begin(), zmodes.end()), zmodes.end());

    for (int it = 0; it < sample_count; ++it) {
      PhasePoint pt;
      for (int lbl : P.tangent) {
        pt.x[lbl] = cplx(U(rng) * M_PI, U(rng) * w.s);
        pt.y[lbl] = w.r * w.r * cplx(U(rng), U(rng)) / std::sqrt(2.0);
      }
      // random z on the boundary of the ||.||_{a,p} <= r ball
      std::map<int, cplx> dir, dirb;
      for (int j : zmodes) {
        dir[j] = cplx(U(rng), U(rng));
        dirb[j] = cplx(U(rng), U(rng));
      }
      double n1 = 0.0, n2 = 0.0;
      for (int j : zmodes) {
        double ww = 1.0 / z_weight(j, w);
        n1 += std::norm(dir[j]) * ww * ww;
        n2 += std::norm(dirb[j]) * ww * ww;
      }
      for (int j : zmodes) {
        pt.z[j] = n1 > 0 ? dir[j] * (w.r / std::sqrt(n1)) : 0.0;
        pt.zbar[j] = n2 > 0 ? dirb[j] * (w.r / std::sqrt(n2)) : 0.0;
      }
      double Xs = 0.0, Ys = 0.0, Zs2 = 0.0, Zbs2 = 0.0;
      for (int lbl : P.tangent) {
        Xs = std::max(Xs, std::abs(eval_poly(derivative(P, Var::y, lbl), pt)));
        Ys = std::max(Ys, std::abs(eval_poly(derivative(P, Var::x, lbl), pt)));
      }
      for (int j : zmodes) {
        Zs2 += std::pow(std::abs(eval_poly(derivative(P, Var::zbar, j), pt)) *
                            zw1(j),
                        2);
        Zbs2 += std::pow(
            std::abs(eval_poly(derivative(P, Var::z, j), pt)) * zw1(j), 2);
      }
      out.sampled = std::max(out.sampled, Xs + Ys / (w.r * w.r) +
                                              std::sqrt(Zs2) / w.r +
                                              std::sqrt(Zbs2) / w.r);
    }
  }
  return out;
}

double lipschitz_seminorm(
    const std::function<HamiltonianPoly(const std::map<int, double>&)>& family,
    const std::vector<std::pair<std::map<int, double>, std::map<int, double>>>&
        pairs,
    const AnalyticityWindow& w) {
  if (pairs.empty()) throw DegeneratePair("lipschitz_seminorm: no pairs");
  double best = 0.0;
  for (auto& [s1, s2] : pairs) {
    double d2 = 0.0;
    for (auto& [j, v] : s1) {
      auto it = s2.find(j);
      double v2 = it == s2.end() ? 0.0 : it->second;
      d2 += (v - v2) * (v - v2);
    }
    for (auto& [j, v] : s2)
      if (!s1.count(j)) d2 += v * v;
    if (d2 == 0.0) throw DegeneratePair("lipschitz_seminorm: sigma == sigma'");
    HamiltonianPoly D = family(s1);
    D -= family(s2);
    best = std::max(best, vf_norm(D, w).majorant / std::sqrt(d2));
  }
  return best;
}

ConservationReport check_momentum_mass(const HamiltonianPoly& P) {
  ConservationReport rep;
  for (auto& [m, c] : P.terms) {
    long momentum = 0, mass = 0;
    for (size_t i = 0; i < P.tangent.size(); ++i) {
      momentum += long(P.tangent[i]) * m.k[i];
      mass += m.k[i];
    }
    for (auto& [j, p] : m.alpha) {
      momentum += long(j) * p;
      mass += p;
    }
    for (auto& [j, p] : m.beta) {
      momentum -= long(j) * p;
      mass -= p;
    }
    bool bad_mom = momentum != 0, bad_mass = mass != 0;
    if (bad_mom) rep.momentum_ok = false;
    if (bad_mass) rep.mass_ok = false;
    if (bad_mom || bad_mass) rep.violations.push_back(m);
  }
  return rep;
}

bool poly_real_symmetric(const HamiltonianPoly& P, double tol) {
  for (auto& [m, c] : P.terms) {
    MonoKey flip = m;
    for (auto& v : flip.k) v = -v;
    std::swap(flip.alpha, flip.beta);
    if (std::abs(P.at(flip) - std::conj(c)) > tol) return false;
  }
  return true;
}

TorusFourier NormalForm::Omega_total(int j) const {
  TorusFourier f = TorusFourier::constant(Omega_bar(j));
  auto it = Omega_stages.find(j);
  if (it != Omega_stages.end())
    for (auto& st : it->second) f += st;
  return f;
}

double NormalForm::Omega_bar(int j) const {
  auto it = Omega_const.find(j);
  return it == Omega_const.end() ? 0.0 : it->second;
}

HamiltonianPoly NormalForm::to_poly(const ivec& tangent, int jmax,
                                    int degree_cap, int kcap) const {
  HamiltonianPoly N;
  N.tangent = tangent;
  N.jmax = jmax;
  N.degree_cap = degree_cap;
  N.kcap = kcap;
  AnalyticityWindow w;
  size_t n = tangent.size();
  for (auto& [j, wj] : omega) {
    MonoKey m;
    m.k.assign(n, 0);
    m.l.assign(n, 0);
    auto it = std::lower_bound(tangent.begin(), tangent.end(), j);
    m.l[size_t(it - tangent.begin())] = 1;
    N.add_term(m, wj, w);
  }
  for (auto& [j, ob] : Omega_const) {
    TorusFourier f = aligned(Omega_total(j), tangent);
    for (auto& [k, c] : f.coeffs) {
      MonoKey m;
      m.k = k;
      m.l.assign(n, 0);
      m.alpha = {{j, 1}};
      m.beta = {{j, 1}};
      N.add_term(m, c, w);
    }
  }
  return N;
}

}  // namespace kam
