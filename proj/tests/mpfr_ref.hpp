#pragma once

// Thin RAII wrapper over MPFR used as the arbitrary-precision reference
// in tests. 256-bit mantissa, far beyond the double-width arithmetic
// under test.

#include <mpfr.h>

#include <string>

namespace testref {

class Big {
 public:
  static constexpr int kPrecision = 256;

  Big() { mpfr_init2(v_, kPrecision); mpfr_set_zero(v_, 1); }
  explicit Big(double x) : Big() { mpfr_set_d(v_, x, MPFR_RNDN); }
  explicit Big(long x) : Big() { mpfr_set_si(v_, x, MPFR_RNDN); }
  Big(const Big& o) : Big() { mpfr_set(v_, o.v_, MPFR_RNDN); }
  Big& operator=(const Big& o) {
    mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  ~Big() { mpfr_clear(v_); }

  // exact sum of a double-width value
  static Big from_parts(double hi, double lo) {
    Big r(hi);
    Big l(lo);
    mpfr_add(r.v_, r.v_, l.v_, MPFR_RNDN);
    return r;
  }

  friend Big operator+(const Big& a, const Big& b) { Big r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Big operator-(const Big& a, const Big& b) { Big r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Big operator*(const Big& a, const Big& b) { Big r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Big operator/(const Big& a, const Big& b) { Big r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }

  Big sqrt() const { Big r; mpfr_sqrt(r.v_, v_, MPFR_RNDN); return r; }
  Big abs() const { Big r; mpfr_abs(r.v_, v_, MPFR_RNDN); return r; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  // |this - other| / |other|
  double rel_error_to(const Big& other) const {
    if (other.is_zero()) return (*this - other).abs().to_double();
    return ((*this - other).abs() / other.abs()).to_double();
  }

 private:
  mpfr_t v_;
};

}  // namespace testref
