#pragma once
// Hamiltonian polynomials on T^n x R^n x l^{a,p} x l^{a,p}:
// finite sums of monomials  c * e^{i k.x} y^l z^alpha zbar^beta,
// with harmonics k over an ordered tangent set and z-support |j| <= jmax.
// Everything downstream (normal forms, homological blocks, the KAM step)
// lives in this algebra.

#include <complex>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "kam/fourier.hpp"

namespace kam {

struct AnalyticityWindow {
  double s = 1.0;   // strip half-width for angles
  double r = 0.1;   // amplitude radius: |y| < r^2, ||z||_{a,p} < r
  double a = 0.0;   // exponential weight
  double p = 2.0;   // polynomial weight, > 3/2
};

// z-exponent list: sorted (mode, power), power >= 1, mode != 0
using ZPow = std::vector<std::pair<int, int>>;

int zpow_total(const ZPow& z);
int zpow_get(const ZPow& z, int mode);
ZPow zpow_set(ZPow z, int mode, int power);  // power 0 erases

struct MonoKey {
  ivec k;      // harmonics over tangent
  ivec l;      // y powers over tangent
  ZPow alpha;  // z powers
  ZPow beta;   // zbar powers
  auto operator<=>(const MonoKey&) const = default;
};

struct HamiltonianPoly {
  ivec tangent;                    // sorted angle labels
  int jmax = 8;                    // z support cap
  int degree_cap = 4;              // 2|l| + |alpha| + |beta| <= cap
  int kcap = std::numeric_limits<int>::max();  // harmonic l1 cap
  std::map<MonoKey, cplx> terms;
  double tail = 0.0;               // majorant mass lost to caps (budget)

  bool is_zero() const { return terms.empty(); }
  cplx at(const MonoKey& m) const;
  // insert with cap enforcement; overflow majorant (at window) goes to tail
  void add_term(const MonoKey& m, cplx c, const AnalyticityWindow& w);
  HamiltonianPoly& operator+=(const HamiltonianPoly& g);
  HamiltonianPoly& operator-=(const HamiltonianPoly& g);
  HamiltonianPoly& operator*=(cplx c);
};

// z-ball component bound: |z_j| <= r / (|j|^p e^{a|j|}) on ||z||_{a,p} <= r
double z_weight(int j, const AnalyticityWindow& w);
// sup majorant of one monomial over D(s,r)
double mono_majorant(const MonoKey& m, cplx c, const AnalyticityWindow& w);
double poly_majorant(const HamiltonianPoly& P, const AnalyticityWindow& w);

HamiltonianPoly align_poly(const HamiltonianPoly& P, const ivec& new_tangent);

// exact product with cap enforcement
HamiltonianPoly poly_mul(const HamiltonianPoly& A, const HamiltonianPoly& B,
                         const AnalyticityWindow& w);

// {F,G} = sum_J (F_x G_y - F_y G_x) + i sum_normal (F_z G_zbar - F_zbar G_z),
// exact then capped.  parallel=true uses the sharded OpenMP kernel; both
// paths use the same fixed shard decomposition and are bit-identical.
HamiltonianPoly poisson_bracket(const HamiltonianPoly& F,
                                const HamiltonianPoly& G,
                                const AnalyticityWindow& w,
                                bool parallel = false);

// R = monomials with 2|l|+|alpha|+|beta| <= 2 and |l| <= 1; returns (R, P-R)
std::pair<HamiltonianPoly, HamiltonianPoly> taylor_truncate_R(
    const HamiltonianPoly& P);

// The seven quadratic blocks of R as coefficient functions of x.
// zz/zbzb/zzb matrices are keyed by (i,j); zz and zbzb store each unordered
// pair once (i <= j), zzb stores ordered (i,j) for z_i zbar_j.
struct RBlocks {
  TorusFourier x;                      // R^x
  std::map<int, TorusFourier> y;       // R^y_j, j in tangent
  std::map<int, TorusFourier> z;       // <R^z, z>
  std::map<int, TorusFourier> zbar;    // <R^zbar, zbar>
  std::map<std::pair<int, int>, TorusFourier> zz;
  std::map<std::pair<int, int>, TorusFourier> zbzb;
  std::map<std::pair<int, int>, TorusFourier> zzbar;
};
RBlocks split_blocks(const HamiltonianPoly& R);
// inverse of split_blocks (exact reassembly)
HamiltonianPoly assemble_blocks(const RBlocks& b, const ivec& tangent,
                                int jmax, int degree_cap, int kcap);

// phase point for exact evaluation
struct PhasePoint {
  std::map<int, cplx> x;      // angles (tangent)
  std::map<int, cplx> y;      // actions (tangent)
  std::map<int, cplx> z;      // normal modes
  std::map<int, cplx> zbar;
};
cplx eval_poly(const HamiltonianPoly& P, const PhasePoint& pt);

// weighted vector-field norm |X| + |Y|/r^2 + ||Z||_{a,p-1}/r + ||Zb||_{a,p-1}/r
struct VfNorm {
  double majorant = 0.0;  // certified upper bound (used by acceptance)
  double sampled = 0.0;   // lower bound from random phase points
};
VfNorm vf_norm(const HamiltonianPoly& P, const AnalyticityWindow& w,
               int sample_count = 0, unsigned seed = 1);

double lipschitz_seminorm(
    const std::function<HamiltonianPoly(const std::map<int, double>&)>& family,
    const std::vector<std::pair<std::map<int, double>, std::map<int, double>>>&
        pairs,
    const AnalyticityWindow& w);

struct ConservationReport {
  bool momentum_ok = true;
  bool mass_ok = true;
  std::vector<MonoKey> violations;
};
// momentum: sum_J j k_j + sum_normal j (alpha_j - beta_j) = 0 per term;
// mass: sum_J k_j + sum (alpha_j - beta_j) = 0 per term
ConservationReport check_momentum_mass(const HamiltonianPoly& P);

bool poly_real_symmetric(const HamiltonianPoly& P, double tol);

// Normal form N = sum_J omega_j y_j + sum_normal Omega_j(x) z_j zbar_j,
// with Omega_j kept as a per-stage list (stage i depends only on J_i).
struct NormalForm {
  FreqMap omega;                                    // tangential
  std::map<int, double> Omega_const;                // constant parts
  std::map<int, std::vector<TorusFourier>> Omega_stages;  // variable parts

  TorusFourier Omega_total(int j) const;            // const + sum of stages
  double Omega_bar(int j) const;
  HamiltonianPoly to_poly(const ivec& tangent, int jmax, int degree_cap,
                          int kcap) const;
};

}  // namespace kam
