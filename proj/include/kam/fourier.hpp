#pragma once
// Truncated Fourier polynomials on finite-dimensional torus factors.
// Coefficients are stored sparsely, keyed by the harmonic vector k over an
// ordered set of angle labels.  All norms are coefficient majorants:
// they certify upper bounds for strip suprema without sampling.

#include <complex>
#include <limits>
#include <map>
#include <vector>

#include "kam/errors.hpp"

namespace kam {

using cplx = std::complex<double>;
using ivec = std::vector<int>;

// frequency vector keyed by angle label (nonzero integers)
using FreqMap = std::map<int, double>;

int l1_norm(const ivec& k);
int k_bracket(const ivec& k);  // <k> = max(1, |k|_1)

struct TorusFourier {
  ivec index_set;                       // sorted angle labels, each != 0
  int cutoff = std::numeric_limits<int>::max();  // l1 harmonic cap K
  std::map<ivec, cplx> coeffs;          // k (aligned to index_set) -> amplitude

  TorusFourier() = default;

  static TorusFourier zero() { return TorusFourier{}; }
  static TorusFourier constant(cplx c);
  // single harmonic c * e^{i k.x}
  static TorusFourier mode(ivec index_set, ivec k, cplx c);

  bool is_zero() const { return coeffs.empty(); }
  cplx at(const ivec& k) const;
  void set(const ivec& k, cplx c, double drop_tol = 0.0);

  TorusFourier& operator+=(const TorusFourier& g);
  TorusFourier& operator-=(const TorusFourier& g);
  TorusFourier& operator*=(cplx c);
};

TorusFourier operator+(TorusFourier f, const TorusFourier& g);
TorusFourier operator-(TorusFourier f, const TorusFourier& g);
TorusFourier operator*(TorusFourier f, cplx c);

// Re-key f onto a superset of angle labels (missing entries = harmonic 0).
TorusFourier aligned(const TorusFourier& f, const ivec& superset);
ivec union_index_set(const ivec& a, const ivec& b);

// sum_k f(k) e^{i k.x}
cplx eval(const TorusFourier& f, const std::vector<cplx>& x);
cplx eval(const TorusFourier& f, const std::map<int, cplx>& x);

// ||f||_{s,tau} = sum |f(k)| |k|^tau e^{|k| s};  |0|^tau := 0 for tau > 0.
double weighted_norm(const TorusFourier& f, double s, double tau);

// Majorant for sup over the strip |Im x| <= s: sum |f(k)| e^{|k| s}.
double sup_norm_bound(const TorusFourier& f, double s);

// Truncated convolution.  Mass discarded by the l1 cap K is accumulated into
// *tail as sum |c| e^{|k| s_tail} so callers can budget it.
TorusFourier mul(const TorusFourier& f, const TorusFourier& g, int K,
                 double s_tail = 0.0, double* tail = nullptr);

// Neumann series for (1 + a)^{-1}, truncated at cap K, stopping when the
// increment majorant at strip s falls below tol.
TorusFourier reciprocal_one_plus(const TorusFourier& a, int K, double tol,
                                 double s);

// d_omega f: k -> i <k, omega> f(k)
TorusFourier d_omega(const TorusFourier& f, const FreqMap& omega);
double dot_k_omega(const ivec& k, const ivec& index_set, const FreqMap& omega);

// partial derivative in angle label j: k -> i k_j f(k)
TorusFourier d_angle(const TorusFourier& f, int j);

// ([f], f - [f])
std::pair<cplx, TorusFourier> average_and_tilde(const TorusFourier& f);

// Gamma_K truncation; tail majorant at strip s reported through *tail_bound.
TorusFourier gamma_truncate(const TorusFourier& f, int K, double s = 0.0,
                            double* tail_bound = nullptr);

// drop coefficients with |c| <= floor_abs; the discarded majorant at s goes
// into *tail (keeps sparse objects small during iteration)
TorusFourier prune(const TorusFourier& f, double floor_abs, double s = 0.0,
                   double* tail = nullptr);

bool is_real_symmetric(const TorusFourier& f, double tol);

// f(x + h(x) * omega): algebraic composition
//   sum_m (i^m / m!) f_m(x) h(x)^m,   f_m(k) = <k,omega>^m f(k),
// truncated at cap K; series stops when the term majorant at strip s drops
// below tol (tracked into *tail together with convolution losses).
TorusFourier compose_shift(const TorusFourier& f, const TorusFourier& h,
                           const FreqMap& omega, int K, double s, double tol,
                           double* tail = nullptr);

// exp(c * f) as a truncated series (used by the diagonalization map)
TorusFourier exp_series(const TorusFourier& f, cplx c, int K, double s,
                        double tol, double* tail = nullptr);

}  // namespace kam
