#pragma once

// Quadrature-free evaluation of a single conversion-matrix element
//
//   E(p,q,k; lambda_n) = C_E * sum_m A_m(p) (lambda_n^2/8)^m I_m(p,q,k)
//
// where I_m is the projection of a degree-(2m+p) homogeneous polynomial
// onto the tensor Legendre basis, reduced to products of 1-d moments.
// Every element is either purely real or purely imaginary, decided by
// the parity of k_y alone.

#include <utility>

#include "moment_table.hpp"
#include "types.hpp"
#include "wide_real.hpp"

namespace mwxe {

enum class Axis { Real, Imaginary };

// A value constrained to one axis of the complex plane. `value` carries
// the sign; `zero` marks exact (structural) zeros.
struct AxisValue {
  WideReal value{};
  Axis axis = Axis::Real;
  bool zero = true;

  complex_t to_complex() const {
    if (zero) return {0.0, 0.0};
    return axis == Axis::Real ? complex_t(value.hi, 0.0) : complex_t(0.0, value.hi);
  }
};

struct SeriesParams {
  double lambda_n = 0.0;  // level-scaled decay rate
  double lambda0 = 1.0;
  double eps_a = 1e-16;
  double eps_r = 1e-16;
  int m_max = 512;
};

struct EntryResult {
  AxisValue value;
  int terms_used = 0;
  bool converged = true;
  // Effective-zero accounting: true when the term tested at the moment
  // bound m0 = min_term already falls below eps_a, the condition under
  // which the summation deems the element zero. The returned value still
  // carries the full windowed sum, which can exceed eps_a when later
  // terms revive the series; stores drop flagged entries to keep the
  // published sparsity accounting.
  bool effective_zero = false;
};

// Parity-based structural-zero predicate; independent of lambda and m.
bool oddity_zero(HarmonicIndex idx, const WaveletIndex& k);

// Exact zeros forced by the x<->y swap symmetry: for kx == ky the entry
// equals (-i)^q times its own conjugate, which kills real entries with
// q = 2 (mod 4) and imaginary entries with q = 0 (mod 4).
bool swap_symmetry_zero(HarmonicIndex idx, const WaveletIndex& k);

// Smallest m with a non-vanishing I_m: max(0, ceil((kx+ky+kz-p)/2)).
int min_term(int p, const WaveletIndex& k);

// Both real branches of I_m; at most one is nonzero for any (p,q,k).
// Exposed for the property tests.
std::pair<WideReal, WideReal> eval_im_parts(HarmonicIndex idx, const WaveletIndex& k, int m,
                                            const MomentTable& table);

// I_m(p,q,k) collapsed onto its axis, sign factor included.
AxisValue eval_im(HarmonicIndex idx, const WaveletIndex& k, int m, const MomentTable& table);

// Sums the series with the two-tolerance stopping rule. The tested term
// includes the full prefactor, so eps_a means the same across (p,q).
// lambda_n = 0 routes to eval_entry_laplace. A result with
// converged == false carries the partial sum at m_max.
EntryResult eval_entry(HarmonicIndex idx, const WaveletIndex& k, const SeriesParams& params,
                       const MomentTable& table);

// The lambda = 0 element: first series term with the rate power dropped,
//   C_Y(p,q) / (sqrt(8) (2p+1)!! 2^p) * I_0(p,q,k);
// identically zero when p < kx+ky+kz.
AxisValue eval_entry_laplace(HarmonicIndex idx, const WaveletIndex& k, const MomentTable& table);

}  // namespace mwxe
