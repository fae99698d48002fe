#pragma once

// Per-level sparse conversion matrices between multiwavelet coefficients
// and multipole/local expansions, with the split real/imaginary storage
// and the q >= 0 row convention.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "series.hpp"
#include "types.hpp"

namespace mwxe {

// Multipole (or local) coefficients in triangular layout covering all
// orders -p <= q <= p; index p*p + (q+p).
struct MultipoleVector {
  int p_max = 0;
  std::vector<complex_t> coeffs;

  explicit MultipoleVector(int p_max_)
      : p_max(p_max_), coeffs(static_cast<std::size_t>(p_max_ + 1) * (p_max_ + 1)) {}

  complex_t& at(int p, int q) { return coeffs[static_cast<std::size_t>(p) * p + (q + p)]; }
  const complex_t& at(int p, int q) const {
    return coeffs[static_cast<std::size_t>(p) * p + (q + p)];
  }
};

// Multiwavelet coefficients of one dyadic box b_(n,l). The coefficient
// array is dense over k <= (k_max, k_max, k_max).
struct WaveletBlock {
  int level = 0;
  std::array<int, 3> translation{0, 0, 0};
  int k_max = 0;
  std::vector<complex_t> coeffs;

  WaveletBlock(int level_, std::array<int, 3> translation_, int k_max_)
      : level(level_),
        translation(translation_),
        k_max(k_max_),
        coeffs(static_cast<std::size_t>(k_max_ + 1) * (k_max_ + 1) * (k_max_ + 1)) {}

  std::size_t index(const WaveletIndex& k) const {
    return (static_cast<std::size_t>(k.kx) * (k_max + 1) + k.ky) * (k_max + 1) + k.kz;
  }
  complex_t& at(const WaveletIndex& k) { return coeffs[index(k)]; }
  const complex_t& at(const WaveletIndex& k) const { return coeffs[index(k)]; }

  // box geometry on [0,1]^3
  double half_width() const { return 0.5 / static_cast<double>(1 << level); }
  vec3 center() const {
    double w = 2.0 * half_width();
    return {(translation[0] + 0.5) * w, (translation[1] + 0.5) * w, (translation[2] + 0.5) * w};
  }
};

struct MatrixStats {
  long long total = 0;
  long long real_nonzero = 0;
  long long imag_nonzero = 0;
  long long additional_real_zero = 0;
  long long additional_imag_zero = 0;
};

class ConversionMatrix {
 public:
  struct Entry {
    int16_t p, q, kx, ky, kz;
    double value;

    WaveletIndex k() const { return {kx, ky, kz}; }
  };

  struct BuildOptions {
    bool keep_effective_zeros = false;  // disable the eps_a drop (debugging)
    int threads = 0;                    // 0: hardware concurrency
  };

  // Evaluates 2^{-3n/2} E(p,q,k; lambda/2^n) over all admissible keys
  // with q >= 0. For lambda > 0, entries whose converged magnitude falls
  // below eps_a are dropped; for lambda = 0 the full predicted pattern
  // {p >= kx+ky+kz} is materialized. Throws convergence_error with the
  // offending key when the series hits the term cap.
  static ConversionMatrix build(int level, double lambda, double lambda0, int p_max, int k_max,
                                const SeriesParams& params, const MomentTable& table,
                                const BuildOptions& options);
  static ConversionMatrix build(int level, double lambda, double lambda0, int p_max, int k_max,
                                const SeriesParams& params, const MomentTable& table) {
    return build(level, lambda, lambda0, p_max, k_max, params, table, BuildOptions{});
  }

  int level() const { return level_; }
  double lambda() const { return lambda_; }
  double lambda0() const { return lambda0_; }
  int p_max() const { return p_max_; }
  int k_max() const { return k_max_; }
  double eps_a() const { return eps_a_; }
  double eps_r() const { return eps_r_; }
  const std::vector<Entry>& real_entries() const { return real_; }
  const std::vector<Entry>& imag_entries() const { return imag_; }

  // Stored value for q >= 0, conjugate for q < 0, zero for absent keys.
  complex_t entry(int p, int q, const WaveletIndex& k) const;

  // M_p^q = sum_k E(p,q,k) s_k for all -p_max <= q <= p_max; rows with
  // q < 0 reuse the stored rows with the imaginary part negated. The
  // kernel constant 8*lambda is applied on request (lambda > 0 only).
  MultipoleVector forward(const WaveletBlock& block, bool include_kernel_constant) const;

  // s_k = sum_{p,q} conj(E(p,q,k)) L_p^q over all orders.
  std::vector<complex_t> adjoint(const MultipoleVector& local) const;

  MatrixStats stats() const;

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;
  static ConversionMatrix read(std::istream& in);
  static ConversionMatrix read_file(const std::string& path);

 private:
  ConversionMatrix() = default;

  int level_ = 0;
  double lambda_ = 0.0;
  double lambda0_ = 1.0;
  int p_max_ = 0;
  int k_max_ = 0;
  double eps_a_ = 1e-16;
  double eps_r_ = 1e-16;
  std::vector<Entry> real_;  // sorted by (p,q,kx,ky,kz); disjoint from imag_
  std::vector<Entry> imag_;
};

// Series non-convergence with the offending key attached.
struct convergence_error : error {
  convergence_error(const std::string& what, int level, HarmonicIndex idx, WaveletIndex k)
      : error(what), level(level), idx(idx), k(k) {}
  int level;
  HarmonicIndex idx;
  WaveletIndex k;
};

}  // namespace mwxe
