#pragma once
// The product probability measure on the parameter space sigma_j in
// [0, 1/|j|] (each factor normalized, P_j = |j| x Lebesgue), cylinder sets,
// resonance zones evaluated at the sigma-truncated point, Diophantine
// margin reports, and Monte-Carlo zone measure estimation with Wilson
// confidence intervals (fixed shard decomposition, thread-count independent).

#include <functional>
#include <optional>

#include "kam/engine.hpp"

namespace kam {

struct ParameterPoint {
  std::map<int, double> entries;  // j -> sigma_j in [0, 1/|j|]
  int dim_cutoff = 0;             // |j| <= D stored
  double default_value = 0.0;     // beyond the cutoff
  double at(int j) const;
};

ParameterPoint sample_sigma(unsigned long long seed, int D);

// keep sigma_j iff |j| < <k>^{2 tau + 2} / alpha^2, else 0
ParameterPoint truncate_sigma(const ParameterPoint& sigma,
                              const std::map<int, int>& k, double alpha,
                              double tau);

struct CylinderBox {
  std::map<int, std::pair<double, double>> sides;  // j -> [lo, hi]
};
struct CylinderSet {
  ivec index_set;
  std::vector<CylinderBox> boxes;  // finite disjoint union
  bool has_predicate = false;      // unsupported bases fall back to MC
};
double measure_of_cylinder(const CylinderSet& c);

struct DiophantineWorst {
  std::vector<int> k;
  int i = 0, j = 0;
  double value = 0.0, bound = 0.0;
};
struct DiophantineReport {
  bool pass = true;
  std::map<std::string, double> min_ratio;  // |divisor| / required, per class
  std::map<std::string, DiophantineWorst> worst;
};
// margin classes: tangential (per-stage alpha_i, tau_i = 10i+10), single
// normal shift, double sums/differences (beta <l>_2 / <k>^tau), the
// anti-diagonal pair (beta |j| / <k>^tau), and the twist condition
// |<l, Omega_bar>| >= m <l>_2
DiophantineReport diophantine_check(const NormalForm& N,
                                    const ScheduleRow& row, int K_check);

struct ResonanceZone {
  std::map<int, int> k;                // harmonic over tangent labels
  std::vector<std::pair<int, int>> l;  // normal multi-index, |l| <= 2
  double alpha = 1.0;                  // resonance level
  double tau = 10.0;
  int v = 0;
};

double l2_weight(const std::vector<std::pair<int, int>>& l);
int k_bracket_of(const std::map<int, int>& k);

// |k| < (9 m / 10 E) |sum j^2 l_j|  certifies the zone empty (case 1);
// i = -j pairs are case 3; everything else case 2
int zone_case(const ResonanceZone& z, const ScheduleRow& row);

// the only normal mode an anti-diagonal pair can resonate with at harmonic k:
// j with sum_b k_b b + 2 j = 0, if integral and not tangential
std::optional<int> antidiagonal_mode(const std::map<int, int>& k,
                                     const ivec& tangent);

struct McResult {
  double estimate = 0.0;
  double lo = 0.0, hi = 0.0;  // 95% Wilson interval
  double envelope = 0.0;
  double measured_C = 0.0;
  long long hits = 0;
  long long samples = 0;
  bool below_envelope = true;
};
// membership |<k, omega(sigma_t)> + <l, Omega_bar(sigma_t)>| <
// 2 alpha <l>_2 / <k>^tau at the truncated point sigma_t; fixed 64-shard
// decomposition, reduction independent of thread count
McResult zone_measure_mc(
    const ResonanceZone& zone,
    const std::function<NormalForm(const ParameterPoint&)>& builder,
    long long samples, unsigned long long seed, int D,
    const ScheduleRow& row, bool parallel = false);

}  // namespace kam
