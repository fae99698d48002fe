#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace mwxe {

using complex_t = std::complex<double>;
using vec3 = std::array<double, 3>;

// Degree/order pair of an expansion term, |q| <= p.
struct HarmonicIndex {
  int p = 0;
  int q = 0;
};

// Per-axis polynomial degrees of a basis function.
struct WaveletIndex {
  int kx = 0;
  int ky = 0;
  int kz = 0;

  int sum() const { return kx + ky + kz; }
  bool operator==(const WaveletIndex&) const = default;
};

// Kernel decay rate and the scaling base used to tame the exponential
// growth/decay of the radial functions. lambda0 defaults to lambda for
// positive lambda and to 1 for the Laplace case.
struct ScaleParams {
  double lambda = 0.0;
  double lambda0 = 1.0;

  static ScaleParams for_lambda(double lambda) {
    return {lambda, lambda > 0.0 ? lambda : 1.0};
  }
};

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct domain_error : error {
  using error::error;
};

// Result not representable (exp-range overflow in the radial functions).
struct range_error : error {
  using error::error;
};

// Caller broke an interface contract (mismatched sizes, bad indices).
struct contract_error : error {
  using error::error;
};

struct io_error : error {
  using error::error;
};

struct parse_error : error {
  parse_error(const std::string& what, long line) : error(what), line_number(line) {}
  long line_number;
};

}  // namespace mwxe
