#include "kam/measure.hpp"

#include "kam/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kam {

double ParameterPoint::at(int j) const {
  auto it = entries.find(j);
  return it == entries.end() ? default_value : it->second;
}

namespace {

void fill_point(std::mt19937_64& rng, int D, ParameterPoint& p) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int j = 1; j <= D; ++j) {
    p.entries[j] = U(rng) / j;
    p.entries[-j] = U(rng) / j;
  }
  p.dim_cutoff = D;
}

}  // namespace

ParameterPoint sample_sigma(unsigned long long seed, int D) {
  std::mt19937_64 rng(seed);
  ParameterPoint p;
  fill_point(rng, D, p);
  return p;
}

ParameterPoint truncate_sigma(const ParameterPoint& sigma,
                              const std::map<int, int>& k, double alpha,
                              double tau) {
  int kb = k_bracket_of(k);
  double cutoff = std::pow(double(kb), 2.0 * tau + 2.0) / (alpha * alpha);
  ParameterPoint out = sigma;
  for (auto& [j, v] : out.entries)
    if (std::abs(j) >= cutoff) v = 0.0;
  if (out.dim_cutoff >= cutoff) out.default_value = 0.0;
  return out;
}

double measure_of_cylinder(const CylinderSet& c) {
  if (c.boxes.empty() && c.has_predicate)
    throw NonBoxBase("measure_of_cylinder: predicate base needs Monte Carlo");
  double total = 0.0;
  for (const auto& box : c.boxes) {
    double prod = 1.0;
    for (int j : c.index_set) {
      auto it = box.sides.find(j);
      if (it == box.sides.end()) continue;  // full factor
      double cap = 1.0 / std::abs(j);
      double lo = std::clamp(it->second.first, 0.0, cap);
      double hi = std::clamp(it->second.second, 0.0, cap);
      prod *= std::abs(j) * std::max(0.0, hi - lo);
    }
    total += prod;
  }
  return std::min(total, 1.0);
}

double l2_weight(const std::vector<std::pair<int, int>>& l) {
  double s = 0.0;
  for (auto [j, c] : l) s += double(j) * j * c;
  return std::max(1.0, std::abs(s));
}

int k_bracket_of(const std::map<int, int>& k) {
  int s = 0;
  for (auto& [b, kb] : k) s += std::abs(kb);
  return std::max(1, s);
}

int zone_case(const ResonanceZone& z, const ScheduleRow& row) {
  if (z.l.size() == 2) {
    auto [m1, c1] = z.l[0];
    auto [m2, c2] = z.l[1];
    if (m1 == -m2 && c1 == -c2 && std::abs(c1) == 1) return 3;
  }
  double l2 = 0.0;
  for (auto [j, c] : z.l) l2 += double(j) * j * c;
  l2 = std::abs(l2);
  int knorm = 0;
  for (auto& [b, kb] : z.k) knorm += std::abs(kb);
  if (l2 > 0.0 && knorm < (9.0 * row.m / (10.0 * row.E)) * l2) return 1;
  return 2;
}

std::optional<int> antidiagonal_mode(const std::map<int, int>& k,
                                     const ivec& tangent) {
  long long s = 0;
  for (auto& [b, kb] : k) s += (long long)b * kb;
  if (s % 2 != 0) return std::nullopt;
  int j = (int)(-s / 2);
  if (j == 0) return std::nullopt;
  if (std::binary_search(tangent.begin(), tangent.end(), j))
    return std::nullopt;
  return j;
}

namespace {

void note(DiophantineReport& rep, const std::string& cls, double value,
          double bound, const std::vector<int>& k, int i, int j) {
  double ratio = value / bound;
  auto it = rep.min_ratio.find(cls);
  if (it == rep.min_ratio.end() || ratio < it->second) {
    rep.min_ratio[cls] = ratio;
    rep.worst[cls] = {k, i, j, value, bound};
  }
  if (ratio < 1.0) rep.pass = false;
}

}  // namespace

DiophantineReport diophantine_check(const NormalForm& N,
                                    const ScheduleRow& row, int K_check) {
  DiophantineReport rep;
  ivec labels;
  std::vector<double> om;
  for (auto& [j, w] : N.omega) {
    labels.push_back(j);
    om.push_back(w);
  }
  const int n = (int)labels.size();
  std::vector<int> modes;
  for (auto& [j, unused] : N.Omega_const) modes.push_back(j);

  auto kball = l1_ball(n, K_check);
  for (const auto& k : kball) {
    double kw = 0.0;
    int knorm = 0;
    for (int i = 0; i < n; ++i) {
      kw += k[i] * om[i];
      knorm += std::abs(k[i]);
    }
    double kb = std::max(1, knorm);

    if (knorm > 0)
      for (size_t st = 0; st < row.alpha_stage.size(); ++st) {
        double tau_i = 10.0 * st + 10.0;
        note(rep, "tangential", std::abs(kw),
             row.alpha_stage[st] / std::pow(kb, tau_i), k, 0, 0);
      }

    for (int j : modes) {
      double Oj = N.Omega_bar(j);
      double b1 = row.beta * std::max(1.0, double(j) * j) /
                  std::pow(kb, row.tau);
      note(rep, "normal1", std::abs(kw + Oj), b1, k, j, 0);
      note(rep, "normal1", std::abs(kw - Oj), b1, k, j, 0);
    }
    for (size_t a = 0; a < modes.size(); ++a)
      for (size_t b = a; b < modes.size(); ++b) {
        int i = modes[a], j = modes[b];
        double Oi = N.Omega_bar(i), Oj = N.Omega_bar(j);
        double l2sum = std::max(1.0, double(i) * i + double(j) * j);
        note(rep, "normal2_sum", std::abs(kw + Oi + Oj),
             row.beta * l2sum / std::pow(kb, row.tau), k, i, j);
        if (i != j && i != -j) {
          double l2diff =
              std::max(1.0, std::abs(double(i) * i - double(j) * j));
          note(rep, "normal2_diff", std::abs(kw + Oi - Oj),
               row.beta * l2diff / std::pow(kb, row.tau), k, i, j);
        }
        if (i == -j && i < j)
          note(rep, "antidiag", std::abs(kw + Oi - Oj),
               row.beta * std::abs(j) / std::pow(kb, row.tau), k, i, j);
      }
  }

  // twist condition, k-independent
  for (size_t a = 0; a < modes.size(); ++a)
    for (size_t b = a + 1; b < modes.size(); ++b) {
      int i = modes[a], j = modes[b];
      if (i == -j) continue;
      double l2diff = std::abs(double(i) * i - double(j) * j);
      if (l2diff == 0.0) continue;
      note(rep, "twist", std::abs(N.Omega_bar(i) - N.Omega_bar(j)),
           row.m * l2diff, {}, i, j);
    }
  return rep;
}

McResult zone_measure_mc(
    const ResonanceZone& zone,
    const std::function<NormalForm(const ParameterPoint&)>& builder,
    long long samples, unsigned long long seed, int D,
    const ScheduleRow& row, bool parallel) {
  const int shards = 64;
  const double l2w = l2_weight(zone.l);
  const double kb = k_bracket_of(zone.k);
  const double thr = 2.0 * zone.alpha * l2w / std::pow(kb, zone.tau);

  auto member = [&](const ParameterPoint& sigma) {
    ParameterPoint st = truncate_sigma(sigma, zone.k, zone.alpha, zone.tau);
    NormalForm N = builder(st);
    double d = 0.0;
    for (auto& [b, kv] : zone.k) d += kv * N.omega.at(b);
    for (auto [j, c] : zone.l) d += c * N.Omega_bar(j);
    return std::abs(d) < thr;
  };

  std::vector<long long> shard_hits(shards, 0);
  std::vector<long long> shard_n(shards, 0);
  for (int s = 0; s < shards; ++s)
    shard_n[s] = samples / shards + (s < samples % shards ? 1 : 0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int s = 0; s < shards; ++s) {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * (s + 1)));
    ParameterPoint p;
    long long h = 0;
    for (long long it = 0; it < shard_n[s]; ++it) {
      fill_point(rng, D, p);
      if (member(p)) ++h;
    }
    shard_hits[s] = h;
  }

  McResult res;
  for (int s = 0; s < shards; ++s) {
    res.hits += shard_hits[s];
    res.samples += shard_n[s];
  }
  double nn = (double)res.samples;
  double ph = res.hits / nn;
  res.estimate = ph;
  const double z = 1.959963984540054;
  double denom = 1.0 + z * z / nn;
  double center = (ph + z * z / (2.0 * nn)) / denom;
  double half =
      z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
  res.lo = std::max(0.0, center - half);
  res.hi = std::min(1.0, center + half);

  int cs = zone_case(zone, row);
  double C = std::max(1.0, std::pow(double(zone.v), double(zone.v)));
  double base = (cs == 3) ? row.beta / std::pow(kb, zone.tau)
                          : row.beta * l2w / std::pow(kb, zone.tau - 1.0);
  res.envelope = (cs == 1) ? 0.0 : C * base;
  res.measured_C = (base > 0.0) ? res.estimate / base : 0.0;
  res.below_envelope =
      (cs == 1) ? (res.hits == 0) : (res.hi <= res.envelope || res.hits == 0);
  return res;
}

}  // namespace kam
