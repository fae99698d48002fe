#pragma once

// Double-width floating point based on error-free transformations
// (two-sum / two-prod with FMA). A WideReal holds an unevaluated sum
// hi + lo with |lo| <= ulp(hi)/2; all four basic operations and sqrt
// keep a relative error below 2^-100 on finite, normalized inputs.
//
// Must be compiled with FP contraction disabled (-ffp-contract=off);
// the splits below are not valid if the compiler fuses a*b+c on its own.

#include <cmath>
#include <cstdint>
#include <limits>

namespace mwxe {

struct WideReal {
  double hi = 0.0;
  double lo = 0.0;

  constexpr WideReal() = default;
  constexpr WideReal(double h) : hi(h), lo(0.0) {}
  constexpr WideReal(double h, double l) : hi(h), lo(l) {}
};

namespace eft {

// s + e == a + b exactly.
inline WideReal two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

// Requires |a| >= |b| (or a == 0).
inline WideReal quick_two_sum(double a, double b) {
  double s = a + b;
  double e = b - (s - a);
  return {s, e};
}

// p + e == a * b exactly.
inline WideReal two_prod(double a, double b) {
  double p = a * b;
  double e = std::fma(a, b, -p);
  return {p, e};
}

}  // namespace eft

inline bool finite(const WideReal& a) { return std::isfinite(a.hi); }

inline WideReal operator+(const WideReal& a, const WideReal& b) {
  WideReal s = eft::two_sum(a.hi, b.hi);
  WideReal t = eft::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = eft::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return eft::quick_two_sum(s.hi, s.lo);
}

inline WideReal operator-(const WideReal& a) { return {-a.hi, -a.lo}; }

inline WideReal operator-(const WideReal& a, const WideReal& b) { return a + (-b); }

inline WideReal operator*(const WideReal& a, const WideReal& b) {
  WideReal p = eft::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return eft::quick_two_sum(p.hi, p.lo);
}

inline WideReal operator/(const WideReal& a, const WideReal& b) {
  // Long division with two correction steps.
  double q1 = a.hi / b.hi;
  WideReal r = a - WideReal(q1) * b;
  double q2 = r.hi / b.hi;
  r = r - WideReal(q2) * b;
  double q3 = r.hi / b.hi;
  WideReal q = eft::quick_two_sum(q1, q2);
  return q + WideReal(q3);
}

inline WideReal& operator+=(WideReal& a, const WideReal& b) { return a = a + b; }
inline WideReal& operator-=(WideReal& a, const WideReal& b) { return a = a - b; }
inline WideReal& operator*=(WideReal& a, const WideReal& b) { return a = a * b; }
inline WideReal& operator/=(WideReal& a, const WideReal& b) { return a = a / b; }

inline WideReal sqr(const WideReal& a) {
  WideReal p = eft::two_prod(a.hi, a.hi);
  p.lo += 2.0 * a.hi * a.lo;
  return eft::quick_two_sum(p.hi, p.lo);
}

// Karp's trick: one Newton step on 1/sqrt in double, corrected in
// double-width. Requires a >= 0.
inline WideReal sqrt(const WideReal& a) {
  if (a.hi == 0.0 && a.lo == 0.0) return {0.0, 0.0};
  double x = 1.0 / std::sqrt(a.hi);
  double ax = a.hi * x;
  WideReal err = a - sqr(WideReal(ax));
  return eft::quick_two_sum(ax, err.hi * (x * 0.5));
}

inline WideReal abs(const WideReal& a) { return a.hi < 0.0 ? -a : a; }

// Exact when f is a power of two and no overflow/underflow occurs.
inline WideReal scale(const WideReal& a, double f) { return {a.hi * f, a.lo * f}; }

inline double to_double(const WideReal& a) { return a.hi; }

inline bool operator==(const WideReal& a, const WideReal& b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator<(const WideReal& a, const WideReal& b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(const WideReal& a, const WideReal& b) { return b < a; }
inline bool operator<=(const WideReal& a, const WideReal& b) { return !(b < a); }
inline bool operator>=(const WideReal& a, const WideReal& b) { return !(a < b); }

inline bool is_zero(const WideReal& a) { return a.hi == 0.0; }

namespace wide {
// pi to double-double precision.
inline constexpr WideReal pi{3.141592653589793116e+00, 1.2246467991473531772e-16};
}  // namespace wide

// Integer power by binary exponentiation, n >= 0.
inline WideReal pow_int(WideReal base, int n) {
  WideReal r{1.0};
  while (n > 0) {
    if (n & 1) r *= base;
    base = sqr(base);
    n >>= 1;
  }
  return r;
}

}  // namespace mwxe
