#pragma once

// Exact moments of monomials against L2-normalized Legendre polynomials
// on [-1,1], built from the three-term recurrence alone. This table is
// the lambda-independent core of the series evaluation: every 3-d
// projection integral reduces to products of these 1-d moments.

#include <vector>

#include "types.hpp"
#include "wide_real.hpp"

namespace mwxe {

class MomentTable {
 public:
  // Fills moments for polynomial degree k <= k_max against monomial
  // powers l <= l_max. Requires k_max >= 1 and l_max >= k_max.
  MomentTable(int k_max, int l_max);

  int k_max() const { return k_max_; }
  int l_max() const { return l_max_; }

  // Stored value; exact zero for the structural zeros ((l+k) odd or
  // l < k). Throws contract_error when an index is out of range.
  const WideReal& moment(int k, int l) const;

  // True for indices that vanish identically.
  static bool structural_zero(int k, int l) { return l < k || ((l + k) & 1); }

  // One "k l value" line per structural nonzero.
  std::string dump() const;

 private:
  int k_max_;
  int l_max_;
  int width_;  // internal row width, padded so the recurrence never truncates
  std::vector<WideReal> entries_;
};

}  // namespace mwxe
