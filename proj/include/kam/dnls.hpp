#pragma once
// Initial Hamiltonian of the derivative NLS with convolution potential,
// truncated to modes |j| <= jmax:
//   H = 1/2 sum (j^2 + sigma_j) q_j qbar_j
//       - (i/4) int (sum qbar_j phi_{-j})^2 (sum q_j phi_j) (i sum j q_j phi_j)
// with phi_j = e^{ijx}/sqrt(2 pi).  The x-integral enforces index-sum zero on
// the quartic term.  Action-angle coordinates are then introduced on modes +-1.

#include "kam/engine.hpp"

namespace kam {

struct DnlsConfig {
  int jmax = 8;
  std::map<int, double> sigma;  // sigma_j in [0, 1/|j|]
  double I1 = 1e-2, Im1 = 1e-2;
  AnalyticityWindow window;
  int degree_cap = 4;
  int series_order = 6;  // binomial series order for odd z-powers
};

// quadratic + quartic Hamiltonian in the mode amplitudes q (stored as
// z-variables, empty tangent set)
HamiltonianPoly build_hamiltonian(const DnlsConfig& cfg);

struct InitialSystem {
  NormalForm N;      // omega_{+-1} = 1 + sigma_{+-1}; Omega_j = (j^2+sigma_j)/2
  HamiltonianPoly P; // the quartic part in (x, y, z, zbar)
  double tail = 0.0; // truncation mass from the odd-power binomial series
};
InitialSystem initial_action_angle(const HamiltonianPoly& H,
                                   const DnlsConfig& cfg);

// Closed-form second derivatives of the quartic part at a torus section
// u = sum_j u_j phi_j (u keyed by mode amplitude u_j, i.e. the phase-space
// point q):
//   d2/dz_{m+t} dzbar_{n+t},  d2/dz_{n+t} dz_{m-t},  d2/dzbar_{n+t} dzbar_{m-t}
// evaluated by exact Fourier orthogonality.
struct P0Derivatives {
  cplx zzbar, zz, zbzb;
};
P0Derivatives p0_second_derivatives(const std::map<int, cplx>& u_profile,
                                    int m, int n, int t);

// default evaluation profile: u_j = sqrt(2 I_j) on the excited modes
std::map<int, cplx> default_u_profile(const DnlsConfig& cfg);

}  // namespace kam
