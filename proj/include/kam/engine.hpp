#pragma once
// One full KAM iteration step: parameter schedules, normal-frequency
// diagonalization, oscillator excitation, the homological solve, Lie-flow
// composition, and assembly of the new normal form + perturbation with an
// explicit truncation budget.

#include <chrono>

#include "kam/solvers.hpp"

namespace kam {

struct ScheduleSeeds {
  double s0 = 1.0;
  double eps0 = 1e-3;
  double rho0 = 0.5;
  double m0 = 0.5;
  double M10 = 1.0;
  double M20 = 1.0;
  double E0 = 10.0;   // E_v = E0 (v+1)^{5/2}
  double L0 = 1.0;    // L_v = L0
  double exp_ = 1.0;  // free exponent in alpha_i = 1/(i^i)^exp, beta, c_v
  double r0 = 0.1;
  double r_exp = 0.25;  // r_{v+1} = eps_v^{r_exp} r_v
};

struct ScheduleRow {
  int v = 0;
  ivec J;                           // tangent labels: 0 < |i| <= v+1
  std::vector<double> alpha_stage;  // alpha_v^i, stages i = 0..v
  double beta, tau, m, E, M1, M2, M, L;
  double s, sigma, logB;  // B_v stored as log (it overflows double fast)
  double eps, gamma, iota, Lambda, rho;
  int K;
  double r, lambda;
};

ScheduleRow schedules(int v, const ScheduleSeeds& seeds);
// the per-step Diophantine profile implied by a schedule row
DiophantineProfile profile_of(const ScheduleRow& row, const ScheduleSeeds& seeds);

// ---- normal-frequency diagonalization --------------------------------------
// Eliminates the variable part of Omega_t through the closed-form Poincare
// map  x -> x,  y -> y + dF/dx z_t zbar_t,  z_t -> z_t e^{2iF},
// zbar_t -> zbar_t e^{-2iF}  with F = -d_omega^{-1} Omega~_t (per stage).
// N is updated exactly (Omega_t becomes its average); P is substituted.
struct DiagReport {
  TorusFourier F;
  double nonconst_residual = 0.0;  // variable part left in the new Omega_t
  double phi_dist = 0.0;           // sup majorant of the shift F
  double jac_bound = 0.0;          // e^{s gamma n}
  double jac_sample_max = 0.0;     // max |e^{2iF}| at sampled strip points
  double tail = 0.0;
};
DiagReport diagonalize_normal_frequency(NormalForm& N, HamiltonianPoly& P,
                                        int t, const DiophantineProfile& prof,
                                        const AnalyticityWindow& w, int K,
                                        double tail_budget = 1e300);

// ---- oscillator excitation -------------------------------------------------
// z_{±j} = sqrt(2(I_{±j} + y_{±j})) e^{±i x_{±j}}: modes ±j move from the
// normal block into the tangent set.  Even z-powers substitute exactly; odd
// powers use the binomial series in y/I truncated at series_order.
void excite_oscillators(NormalForm& N, HamiltonianPoly& P, int j, double Ij,
                        double Imj, const AnalyticityWindow& w,
                        int series_order, double* tail = nullptr);

// ---- Lie series ------------------------------------------------------------
// G o X_F^1 = sum_{k<=order} ad_F^k(G)/k!,  ad_F(G) = {G,F}.  Stops early
// when the increment majorant drops below tol * majorant(G); throws
// SeriesStagnation if increments stop decaying while still above tolerance.
HamiltonianPoly lie_flow_apply(const HamiltonianPoly& F,
                               const HamiltonianPoly& G, int order,
                               const AnalyticityWindow& w, double tol,
                               double* tail = nullptr, bool parallel = false,
                               double prune_floor = 0.0);

// ---- one KAM step ----------------------------------------------------------
struct EngineConfig {
  int lie_order = 10;
  double lie_tol = 1e-15;
  int excite_series_order = 6;
  double tail_budget = 1e300;
  bool parallel = false;
  double prune_floor = 0.0;  // vector-field contribution floor for P_next
                             // terms (loss booked into the tail)
};

struct StepReport {
  int v = 0;
  double eps_measured = 0.0;    // vf_norm majorant of incoming P
  double eps_next = 0.0;        // vf_norm majorant of P_next
  double tail = 0.0;            // every truncation loss, summed
  double min_divisor = 1e300;
  double omega_drift = 0.0;     // max_j |omega'_j - omega_j|
  double Omega_drift_m1 = 0.0;  // sup_j |j| * sup-majorant of Omega drift
  double Rx_avg = 0.0;
  double leftover_majorant = 0.0;  // R' = anti-diagonal beyond the cap
  double max_block_residual = 0.0;
  double smallness_ratio = 0.0;  // eps_measured vs schedule eps (recorded)
  double wall_seconds = 0.0;
};

struct KamState {
  NormalForm N;
  HamiltonianPoly P;
  AnalyticityWindow w;
  std::map<int, double> sigma;  // parameter point (per normal mode)
  std::map<int, double> I;      // excitation actions, keyed by |mode|
  ScheduleSeeds seeds;
};

// Pipeline: diagonalize at t = ±(v+2) -> excite ±(v+2) -> quadratic
// truncation -> homological block solve (Gamma_K, R' split) -> Lie flow ->
// reassemble N_next (absorbing [R^y] and the z zbar diagonal including the
// <dOmega/dx, F^y> drift) and P_next.
StepReport kam_step(KamState& st, const ScheduleRow& row,
                    const EngineConfig& cfg);

}  // namespace kam
