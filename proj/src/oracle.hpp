#pragma once

// Independent ground truth: adaptive tensor-product Gauss-Legendre
// quadrature for the conversion-matrix inner products and for direct
// potential integrals. Shares only the pointwise specfun primitives
// with the series path, never its coefficient tables.

#include "conversion_matrix.hpp"
#include "types.hpp"

namespace mwxe {

struct QuadratureSpec {
  int base_rule_order = 12;       // Gauss-Legendre points per axis per cell
  int max_subdivision_depth = 10;
  double abs_tol = 1e-30;
  double rel_tol = 1e-12;
};

struct QuadResult {
  complex_t value{0.0, 0.0};
  double error_estimate = 0.0;
  bool converged = true;
  long cells = 0;

  double relative_error() const {
    double mag = std::abs(value);
    return mag > 0.0 ? error_estimate / mag : error_estimate;
  }
};

// Integral over [-1,1]^3 of conj(Q_p^q(lambda_n/2, x)) phi^k(x) / sqrt(8).
// For lambda_n = 0 the regular solid-harmonic branch replaces Q. A result
// with converged == false carries the best estimate; expected for large
// lambda_n or strongly oscillating k.
QuadResult quad_entry(HarmonicIndex idx, const WaveletIndex& k, double lambda_n, double lambda0,
                      const QuadratureSpec& spec);

// Integral over the block's box of exp(-lambda ||x-y||)/||x-y|| times the
// block's function. Requires x strictly outside the closed box.
QuadResult direct_potential(const WaveletBlock& block, const vec3& x, double lambda,
                            const QuadratureSpec& spec);

// Truncated expansion sum_{p<=p_max} sum_q M_p^q k^_p(lambda r) Y_p^q at
// x relative to center. Requires lambda > 0 and x != center.
complex_t multipole_potential(const MultipoleVector& m, const vec3& center, const vec3& x,
                              const ScaleParams& scale);

}  // namespace mwxe
