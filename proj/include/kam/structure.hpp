#pragma once
// Structural diagnostics on Hamiltonian polynomials: the two asymptotic
// estimate conditions on second-derivative blocks d^2 P / dq_{m+t} dq_{n+-t}
// (1/t-expansions fitted by least squares over integer t-windows), the
// frequency decomposition lambda_n = n^2 + sigma_n + n lambda_bar +
// lambda_tilde + lambda_hat_n, and the exponential tail bound on the
// anti-diagonal remainder beyond a harmonic cap.

#include <array>
#include <functional>

#include "kam/hamiltonian.hpp"

namespace kam {

enum class BlockKind { zzbar, zz, zbzb };

// Exact polynomial second derivative w.r.t. the pair of modes selected by
// (m, n, t, kind), restricted to the torus section y = 0, z = profile:
//   zzbar: (z_{m+t}, zbar_{n+t});  zz: (z_{m+t}, z_{n-t});
//   zbzb: (zbar_{m+t}, zbar_{n-t}).
// Result is a Fourier function of the angles.  Modes beyond jmax contribute
// zero; mode 0 is refused.
TorusFourier second_derivative_block(const HamiltonianPoly& P, int m, int n,
                                     int t, BlockKind kind,
                                     const std::map<int, cplx>& profile);

// least-squares fit of samples[t] ~ sum_i coef[i] * t^degrees[i]
struct ExpansionFit {
  std::array<TorusFourier, 3> coef;  // one function per fitted power of t
  std::array<int, 3> degrees{};
  double fit_residual = 0.0;  // max over t of sup-majorant misfit (relative)
  std::vector<int> t_samples;
};
ExpansionFit fit_t_expansion(const std::map<int, TorusFourier>& samples,
                             const std::array<int, 3>& degrees, double s);

struct SweepConfig {
  std::vector<std::pair<int, int>> pairs;  // (m, n)
  std::vector<int> t_values;
  std::map<int, cplx> profile;  // torus section for the z variables
  double refit_tol = 1e-8;      // agreement of leading coefficient across
                                // disjoint half-windows
  // optional parameter-derivative checks by central differences
  std::function<HamiltonianPoly(const std::map<int, double>&)> family;
  std::map<int, double> sigma0;
  std::vector<int> sigma_probes;
};

struct PairReport {
  int m = 0, n = 0;
  BlockKind kind = BlockKind::zzbar;
  double raw_margin = 1e300;    // min over t of (raw bound - measured)
  std::array<double, 3> coef_norm{};
  std::array<double, 3> coef_bound{};
  double fit_residual = 0.0;
  double refit_gap = 0.0;
  double sigma_margin = 1e300;  // min margin of the sigma-derivative checks
  bool pass = true;
};

struct StructureReport {
  bool pass = true;
  std::vector<PairReport> entries;
  double max_fit_residual = 0.0;
  double min_margin = 1e300;
};

// first type: blocks grow like t a1 + b1 + c1/t with raw bound
// max{|m+t|,|n+-t|} eps e^{-decay rho}
StructureReport verify_fae(const HamiltonianPoly& P, double Lambda, double eps,
                           double rho, const SweepConfig& sweep,
                           const AnalyticityWindow& w);
// second type: bounded template a + b/t + c/t^2 with raw bound
// eps e^{-decay rho}
StructureReport verify_sae(const HamiltonianPoly& F, double Lambda, double eps,
                           double rho, const SweepConfig& sweep,
                           const AnalyticityWindow& w);

struct FrequencyDecomposition {
  double lambda_bar = 0.0;
  double lambda_tilde = 0.0;
  std::map<int, double> lambda_hat;
  double decay = 0.0;  // sup_n |n| |lambda_hat_n|
};
// least-squares fit of lambda_n - n^2 - sigma_n ~ n lambda_bar + lambda_tilde
// over the window; the remainder is lambda_hat (reconstruction exact)
FrequencyDecomposition frequency_expansion(const std::map<int, double>& lambda,
                                           const std::map<int, double>& sigma,
                                           const std::vector<int>& n_window);

struct TailReport {
  double tail = 0.0;      // r^2 sum_{|j|>K} sup-majorant of the coefficient
  double envelope = 0.0;  // safety * r^2 * eps * e^{-rho K}
  double measured_C = 0.0;
  bool pass = true;
};
TailReport check_error_tail(const std::map<int, TorusFourier>& R_antidiag,
                            int K, double rho, double r, double eps,
                            double s, double safety = 10.0);

}  // namespace kam
