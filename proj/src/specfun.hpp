#pragma once

// Scaled modified spherical Bessel functions, associated Legendre
// functions and spherical harmonics in the normalization
//   Y_p^q = sqrt((2p+1)/4pi) sqrt((p-|q|)!/(p+|q|)!) P_p^{|q|}(cos t) e^{iqf}
// with the Condon-Shortley phase carried inside P_p^{|q|}, so that
// Y_p^{-q} = conj(Y_p^q).
//
// The radial functions are kept in scaled form,
//   i^_p(x) = i_p(x) / lambda0^p,   k^_p(x) = k_p(x) * lambda0^p,
// which keeps products i^ * k^ free of the lambda0 powers.

#include <vector>

#include "types.hpp"

namespace mwxe {

// i^_p at x = lambda*r. Downward (ratio) recurrence; throws range_error
// when the unscaled value overflows the exponent range.
double scaled_i(int p, double r, const ScaleParams& scale);

// k^_p at x = lambda*r. Upward recurrence; throws domain_error at r = 0.
double scaled_k(int p, double r, const ScaleParams& scale);

// All degrees 0..p_max at once (used by the potential evaluators).
std::vector<double> scaled_i_all(int p_max, double r, const ScaleParams& scale);
std::vector<double> scaled_k_all(int p_max, double r, const ScaleParams& scale);

// P_p^{|q|}(z) including the (-1)^{|q|} factor. Requires |z| <= 1.
double assoc_legendre(int p, int q_abs, double z);

// L2-normalized Legendre polynomial of degree k on [-1,1], evaluated
// pointwise (used by the quadrature oracle, never by the series path).
double normalized_legendre(int k, double x);

// sqrt((2p+1)/4pi * (p-|q|)!/(p+|q|)!)
double harmonic_norm(int p, int q);

complex_t spherical_harmonic(HarmonicIndex idx, double theta, double phi);

// Q_p^q(lambda, y) = i^_p(lambda*||y||) Y_p^q(y/||y||) for lambda > 0.
// Finite at y = 0 (only the p = 0 mode survives there).
complex_t eval_regular(HarmonicIndex idx, const ScaleParams& scale, const vec3& y);

// The lambda = 0 replacement: ||y||^p Y_p^q(y^) / ((2p+1)!! lambda0^p),
// the leading series term of eval_regular with the rate divided out.
complex_t eval_regular_laplace(HarmonicIndex idx, const ScaleParams& scale, const vec3& y);

}  // namespace mwxe
