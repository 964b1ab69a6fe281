#include "kam/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace kam {

int l1_norm(const ivec& k) {
  int s = 0;
  for (int v : k) s += std::abs(v);
  return s;
}

int k_bracket(const ivec& k) { return std::max(1, l1_norm(k)); }

TorusFourier TorusFourier::constant(cplx c) {
  TorusFourier f;
  if (c != cplx(0.0)) f.coeffs[{}] = c;
  return f;
}

TorusFourier TorusFourier::mode(ivec index_set, ivec k, cplx c) {
  TorusFourier f;
  f.index_set = std::move(index_set);
  if (k.size() != f.index_set.size())
    throw DimensionMismatch("mode: k size != index_set size");
  if (c != cplx(0.0)) f.coeffs[std::move(k)] = c;
  return f;
}

cplx TorusFourier::at(const ivec& k) const {
  auto it = coeffs.find(k);
  return it == coeffs.end() ? cplx(0.0) : it->second;
}

void TorusFourier::set(const ivec& k, cplx c, double drop_tol) {
  if (std::abs(c) <= drop_tol)
    coeffs.erase(k);
  else
    coeffs[k] = c;
}

ivec union_index_set(const ivec& a, const ivec& b) {
  ivec u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

TorusFourier aligned(const TorusFourier& f, const ivec& superset) {
  if (f.index_set == superset) return f;
  // positions of f's labels inside superset
  std::vector<size_t> pos(f.index_set.size());
  for (size_t i = 0; i < f.index_set.size(); ++i) {
    auto it = std::lower_bound(superset.begin(), superset.end(), f.index_set[i]);
    if (it == superset.end() || *it != f.index_set[i])
      throw DimensionMismatch("aligned: target is not a superset");
    pos[i] = static_cast<size_t>(it - superset.begin());
  }
  TorusFourier g;
  g.index_set = superset;
  g.cutoff = f.cutoff;
  for (const auto& [k, c] : f.coeffs) {
    ivec kk(superset.size(), 0);
    for (size_t i = 0; i < k.size(); ++i) kk[pos[i]] = k[i];
    g.coeffs[std::move(kk)] = c;
  }
  return g;
}

static void add_into(TorusFourier& f, const TorusFourier& g, cplx scale) {
  if (f.index_set == g.index_set) {
    for (const auto& [k, c] : g.coeffs) {
      cplx v = f.at(k) + scale * c;
      f.set(k, v);
    }
    return;
  }
  ivec u = union_index_set(f.index_set, g.index_set);
  TorusFourier fa = aligned(f, u), ga = aligned(g, u);
  for (const auto& [k, c] : ga.coeffs) fa.set(k, fa.at(k) + scale * c);
  fa.cutoff = std::min(f.cutoff, g.cutoff);
  f = std::move(fa);
}

TorusFourier& TorusFourier::operator+=(const TorusFourier& g) {
  add_into(*this, g, 1.0);
  return *this;
}
TorusFourier& TorusFourier::operator-=(const TorusFourier& g) {
  add_into(*this, g, -1.0);
  return *this;
}
TorusFourier& TorusFourier::operator*=(cplx c) {
  if (c == cplx(0.0)) {
    coeffs.clear();
    return *this;
  }
  for (auto& [k, v] : coeffs) v *= c;
  return *this;
}

TorusFourier operator+(TorusFourier f, const TorusFourier& g) { return f += g; }
TorusFourier operator-(TorusFourier f, const TorusFourier& g) { return f -= g; }
TorusFourier operator*(TorusFourier f, cplx c) { return f *= c; }

cplx eval(const TorusFourier& f, const std::vector<cplx>& x) {
  if (x.size() != f.index_set.size())
    throw DimensionMismatch("eval: x size != index_set size");
  cplx s = 0.0;
  const cplx I(0.0, 1.0);
  for (const auto& [k, c] : f.coeffs) {
    cplx phase = 0.0;
    for (size_t i = 0; i < k.size(); ++i)
      phase += static_cast<double>(k[i]) * x[i];
    s += c * std::exp(I * phase);
  }
  return s;
}

cplx eval(const TorusFourier& f, const std::map<int, cplx>& x) {
  std::vector<cplx> xv;
  xv.reserve(f.index_set.size());
  for (int j : f.index_set) {
    auto it = x.find(j);
    if (it == x.end()) throw DimensionMismatch("eval: missing angle entry");
    xv.push_back(it->second);
  }
  return eval(f, xv);
}

double weighted_norm(const TorusFourier& f, double s, double tau) {
  double acc = 0.0;
  for (const auto& [k, c] : f.coeffs) {
    int a = l1_norm(k);
    double w = (a == 0) ? (tau > 0.0 ? 0.0 : 1.0) : std::pow(double(a), tau);
    acc += std::abs(c) * w * std::exp(a * s);
  }
  return acc;
}

double sup_norm_bound(const TorusFourier& f, double s) {
  double acc = 0.0;
  for (const auto& [k, c] : f.coeffs) acc += std::abs(c) * std::exp(l1_norm(k) * s);
  return acc;
}

TorusFourier mul(const TorusFourier& f, const TorusFourier& g, int K,
                 double s_tail, double* tail) {
  ivec u = union_index_set(f.index_set, g.index_set);
  TorusFourier fa = aligned(f, u), ga = aligned(g, u);
  TorusFourier h;
  h.index_set = u;
  h.cutoff = K;
  for (const auto& [kf, cf] : fa.coeffs) {
    for (const auto& [kg, cg] : ga.coeffs) {
      ivec k(u.size());
      for (size_t i = 0; i < u.size(); ++i) k[i] = kf[i] + kg[i];
      cplx c = cf * cg;
      if (l1_norm(k) > K) {
        if (tail) *tail += std::abs(c) * std::exp(l1_norm(k) * s_tail);
        continue;
      }
      auto [it, fresh] = h.coeffs.try_emplace(std::move(k), c);
      if (!fresh) it->second += c;
    }
  }
  // clean exact cancellations
  for (auto it = h.coeffs.begin(); it != h.coeffs.end();)
    it = (it->second == cplx(0.0)) ? h.coeffs.erase(it) : std::next(it);
  return h;
}

TorusFourier reciprocal_one_plus(const TorusFourier& a, int K, double tol,
                                 double s) {
  double na = sup_norm_bound(a, s);
  if (na >= 1.0)
    throw DivergentSeries("reciprocal_one_plus: sup majorant >= 1");
  TorusFourier result = aligned(TorusFourier::constant(1.0), a.index_set);
  TorusFourier term = result;
  for (int m = 1; m <= 400; ++m) {
    term = mul(term, a, K);
    term *= cplx(-1.0);
    result += term;
    if (sup_norm_bound(term, s) < tol) break;
  }
  return result;
}

double dot_k_omega(const ivec& k, const ivec& index_set, const FreqMap& omega) {
  double s = 0.0;
  for (size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 0) continue;
    auto it = omega.find(index_set[i]);
    if (it == omega.end())
      throw DimensionMismatch("dot_k_omega: missing frequency entry");
    s += k[i] * it->second;
  }
  return s;
}

TorusFourier d_omega(const TorusFourier& f, const FreqMap& omega) {
  TorusFourier g;
  g.index_set = f.index_set;
  g.cutoff = f.cutoff;
  const cplx I(0.0, 1.0);
  for (const auto& [k, c] : f.coeffs) {
    cplx v = I * dot_k_omega(k, f.index_set, omega) * c;
    if (v != cplx(0.0)) g.coeffs[k] = v;
  }
  return g;
}

TorusFourier d_angle(const TorusFourier& f, int j) {
  auto it = std::lower_bound(f.index_set.begin(), f.index_set.end(), j);
  TorusFourier g;
  g.index_set = f.index_set;
  g.cutoff = f.cutoff;
  if (it == f.index_set.end() || *it != j) return g;  // no dependence
  size_t pos = static_cast<size_t>(it - f.index_set.begin());
  const cplx I(0.0, 1.0);
  for (const auto& [k, c] : f.coeffs)
    if (k[pos] != 0) g.coeffs[k] = I * double(k[pos]) * c;
  return g;
}

std::pair<cplx, TorusFourier> average_and_tilde(const TorusFourier& f) {
  TorusFourier t = f;
  ivec zero(f.index_set.size(), 0);
  cplx avg = 0.0;
  auto it = t.coeffs.find(zero);
  if (it != t.coeffs.end()) {
    avg = it->second;
    t.coeffs.erase(it);
  }
  return {avg, t};
}

TorusFourier gamma_truncate(const TorusFourier& f, int K, double s,
                            double* tail_bound) {
  TorusFourier g;
  g.index_set = f.index_set;
  g.cutoff = K;
  for (const auto& [k, c] : f.coeffs) {
    if (l1_norm(k) <= K)
      g.coeffs[k] = c;
    else if (tail_bound)
      *tail_bound += std::abs(c) * std::exp(l1_norm(k) * s);
  }
  return g;
}

TorusFourier prune(const TorusFourier& f, double floor_abs, double s,
                   double* tail) {
  TorusFourier g;
  g.index_set = f.index_set;
  g.cutoff = f.cutoff;
  for (const auto& [k, c] : f.coeffs) {
    if (std::abs(c) > floor_abs)
      g.coeffs[k] = c;
    else if (tail)
      *tail += std::abs(c) * std::exp(l1_norm(k) * s);
  }
  return g;
}

bool is_real_symmetric(const TorusFourier& f, double tol) {
  for (const auto& [k, c] : f.coeffs) {
    ivec mk(k.size());
    for (size_t i = 0; i < k.size(); ++i) mk[i] = -k[i];
    if (std::abs(f.at(mk) - std::conj(c)) > tol) return false;
  }
  return true;
}

TorusFourier compose_shift(const TorusFourier& f, const TorusFourier& h,
                           const FreqMap& omega, int K, double s, double tol,
                           double* tail) {
  if (h.is_zero()) return gamma_truncate(f, K, s, tail);
  ivec u = union_index_set(f.index_set, h.index_set);
  TorusFourier fa = aligned(f, u), ha = aligned(h, u);
  // f_m(k) = <k,omega>^m f(k);  result = sum_m (i^m/m!) f_m * h^m
  TorusFourier result = gamma_truncate(fa, K, s, tail);
  TorusFourier hpow = TorusFourier::constant(1.0);
  hpow = aligned(hpow, u);
  const cplx I(0.0, 1.0);
  cplx fact = 1.0;
  for (int m = 1; m <= 80; ++m) {
    hpow = mul(hpow, ha, K, s, tail);
    fact *= I / double(m);
    TorusFourier fm;
    fm.index_set = u;
    for (const auto& [k, c] : fa.coeffs) {
      double d = dot_k_omega(k, u, omega);
      cplx v = c * std::pow(d, m);
      if (v != cplx(0.0)) fm.coeffs[k] = v;
    }
    TorusFourier term = mul(fm, hpow, K, s, tail);
    term *= fact;
    result += term;
    if (sup_norm_bound(term, s) < tol) return result;
  }
  // the series is entire; reaching here means the shift is far too large
  throw SeriesStagnation("compose_shift: series did not reach tolerance");
}

TorusFourier exp_series(const TorusFourier& f, cplx c, int K, double s,
                        double tol, double* tail) {
  TorusFourier result = TorusFourier::constant(1.0);
  result = aligned(result, f.index_set);
  TorusFourier term = result;
  for (int m = 1; m <= 200; ++m) {
    term = mul(term, f, K, s, tail);
    term *= c / double(m);
    result += term;
    if (sup_norm_bound(term, s) < tol) return result;
  }
  throw SeriesStagnation("exp_series: series did not reach tolerance");
}

}  // namespace kam
