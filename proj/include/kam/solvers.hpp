#pragma once
// Small-divisor linear solvers:
//   d_omega u = p                                (torus average equation)
//   (i d_omega + lambda) v = p                   (constant shift)
//   (i d_omega + lambda (1 + a(x))) u = p        (large variable coefficient,
//                                                 solved through a stagewise
//                                                 coordinate transform)
//   (-i d_omega + lambda + mu(x)) u = p          (Liu-Yuan type, large mu)
// plus the homological block solve for a full quadratic remainder, the dense
// matrix oracle used by tests, and the l2 operator norm certificate.

#include <optional>
#include <string>

#include "kam/hamiltonian.hpp"

namespace kam {

struct DiophantineProfile {
  double alpha = 1e-3;   // |<k,omega>|        >= alpha / <k>^tau
  double beta = 1e-3;    // |lambda - <k,omega>| >= beta / <k>^tau (shifted)
  double tau = 10.0;
  double m_lower = 0.5;               // normal-frequency gap m
  std::vector<double> alpha_stages;   // per-stage alpha_l
  std::vector<double> tau_stages;     // per-stage tau_l
  std::vector<double> gamma_stages;   // per-stage gamma_l, sum <= 1/10
  double guard_C = 1.0;               // anti-diagonal guard constant

  double alpha_at(size_t l) const {
    return l < alpha_stages.size() ? alpha_stages[l] : alpha;
  }
  double tau_at(size_t l) const {
    return l < tau_stages.size() ? tau_stages[l] : tau;
  }
  double gamma_at(size_t l) const {
    return l < gamma_stages.size() ? gamma_stages[l] : 0.1;
  }
};

// record of one divisor actually used (smallest per class kept in reports)
struct Divisor {
  ivec k;
  cplx value;
  double bound;
  std::string shift_desc;
};

// ---- basic solvers ---------------------------------------------------------

// d_omega u = p, [p] = 0; u(k) = p(k) / (i <k,omega>)
TorusFourier solve_dw(const FreqMap& omega, const TorusFourier& p,
                      const DiophantineProfile& prof,
                      double* min_divisor = nullptr);

// (i d_omega + lambda) v = p; v(k) = p(k) / (lambda - <k,omega>)
TorusFourier solve_shifted(const FreqMap& omega, cplx lambda,
                           const TorusFourier& p,
                           const DiophantineProfile& prof,
                           double* min_divisor = nullptr);

// ---- the stagewise coordinate transform (angle shear along omega) ----------

struct TransformStage {
  TorusFourier b;        // forward shift, phi = x + b(x) omega
  TorusFourier btilde;   // inverse shift, x = phi + btilde(phi) omega
  double gamma;          // stage budget gamma_l
  double b_norm;         // measured sup majorant of b
  double picard_residual;
  int picard_iters;
};

struct Transform {
  FreqMap omega;
  ivec index_set;                 // angles of the outermost stage
  std::vector<TransformStage> stages;
  int K = 64;                     // harmonic cap for compositions
  double s = 1.0;                 // strip used for majorants
  double s_out = 1.0;             // after the bridge narrowing s - k s/100
  double comp_tol = 1e-16;
  double tail = 0.0;              // composition truncation budget

  bool identity() const { return stages.empty(); }
  // pointwise maps (exact up to stored harmonics)
  std::vector<cplx> forward_point(std::vector<cplx> x) const;
  std::vector<cplx> inverse_point(std::vector<cplx> phi) const;
  // f o T and f o T^{-1} in the Fourier algebra
  TorusFourier pushforward(const TorusFourier& f, double* tail = nullptr) const;
  TorusFourier pullback(const TorusFourier& f, double* tail = nullptr) const;
};

// b_l = d_omega^{-1} a_l per stage, inverses by Picard iteration.
// Each a_l must have zero average; a_l depends only on its own index set.
Transform build_transform(const FreqMap& omega,
                          const std::vector<TorusFourier>& a_stages,
                          const DiophantineProfile& prof,
                          const AnalyticityWindow& w, int K);

// ---- variable-coefficient solvers ------------------------------------------

struct VarSolveReport {
  double residual_abs = 0.0;    // majorant of equation residual on |k|<=Kcheck
  double residual_rel = 0.0;    // relative to majorant of p
  double min_divisor = 1e300;
  double tail = 0.0;            // truncation budget accumulated
  int sweeps = 0;
};

// (i d_omega + lambda (1 + sum_l a_l(x))) u = p
TorusFourier solve_large_variable(const FreqMap& omega, cplx lambda,
                                  const std::vector<TorusFourier>& a_stages,
                                  const TorusFourier& p,
                                  const DiophantineProfile& prof,
                                  const AnalyticityWindow& w, int K,
                                  VarSolveReport* rep = nullptr);

// (-i d_omega + lambda + sum_l mu_l(x)) u = p, [mu_l] = 0, mu possibly large.
// Realized as integrating-factor sweeps: each sweep solves a constant-
// coefficient equation in the factored variable and re-absorbs the
// truncation commutator; the residual must contract by >= 2 per sweep.
TorusFourier solve_liu_yuan(const FreqMap& omega, cplx lambda,
                            const std::vector<TorusFourier>& mu_stages,
                            const TorusFourier& p,
                            const DiophantineProfile& prof,
                            const AnalyticityWindow& w, int K,
                            double sigma_out = 0.0,
                            VarSolveReport* rep = nullptr);

// residuals of the defining equations, truncated at cap K (tests/reports)
TorusFourier residual_large_variable(const FreqMap& omega, cplx lambda,
                                     const std::vector<TorusFourier>& a_stages,
                                     const TorusFourier& p,
                                     const TorusFourier& u, int K);
TorusFourier residual_liu_yuan(const FreqMap& omega, cplx lambda,
                               const std::vector<TorusFourier>& mu_stages,
                               const TorusFourier& p, const TorusFourier& u,
                               int K);

// ---- homological block solve ----------------------------------------------

struct BlockSolveResult {
  RBlocks F;                              // generating-function blocks
  double Rx_avg = 0.0;                    // [R^x] (irrelevant constant)
  std::map<int, cplx> Ry_avg;             // [R^y_j] -> tangential drift
  std::map<int, TorusFourier> diag;       // R^{zzbar}_{jj} -> normal drift
  std::map<std::pair<int, int>, TorusFourier> leftover;  // R' (|j| > K anti-diagonal)
  std::map<std::string, double> residual_rel;  // per block class
  double max_residual_rel = 0.0;
  double min_divisor = 1e300;
  double tail = 0.0;
};

// Solves {N,F} + R = 0 blockwise for the quadratic remainder R:
//  - x / y blocks through d_omega
//  - z, zbar, zz, zbzb, and off-diagonal zzbar through the variable-
//    coefficient solver (shift = sum Omega_m (alpha_m - beta_m))
//  - anti-diagonal zzbar_(-j)j, |j| <= K, through the Liu-Yuan solver,
//    guarded by  e^{C K s sum(gamma)} <= sigma^{-C (n + tau)}
// Diagonal zzbar_jj and |j| > K anti-diagonal terms are returned unsolved
// (they feed the new normal form and R' respectively).
BlockSolveResult solve_block_F(const NormalForm& N, const RBlocks& R,
                               const DiophantineProfile& prof,
                               const AnalyticityWindow& w, int K);

// ---- test support ----------------------------------------------------------

// Dense solve of (-i d_omega + lambda + mu(x)) u = p on modes |k|_1 <= K.
TorusFourier dense_oracle_solve(const FreqMap& omega, cplx lambda,
                                const TorusFourier& mu, const TorusFourier& p,
                                const ivec& index_set, int K,
                                double* condition_number = nullptr);

// certified l2 operator norm bound (4^{n+2}/sigma^n) * ||R||
double matrix_norm_bound(
    const std::map<std::pair<int, int>, double>& R_elements, int n,
    double sigma);

// all k in Z^dim with |k|_1 <= K (deterministic order)
std::vector<ivec> l1_ball(int dim, int K);

}  // namespace kam
