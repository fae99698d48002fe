#include "moment_table.hpp"

#include <charconv>
#include <sstream>

namespace mwxe {

// Rows 0 and 1 have closed forms; row k+1 follows from the three-term
// recurrence of the normalized Legendre polynomials,
//   moment(k+1, l) = alpha_k * moment(k, l+1) - gamma_k * moment(k-1, l)
// with alpha_k = (2k+1)/(k+1) * sqrt((2k+3)/(2k+1)) and
//      gamma_k = k/(k+1) * sqrt((2k+3)/(2k-1)).
// Each row consumes one column of the row below it, so rows are built
// on a width padded by k_max and truncated on access.
MomentTable::MomentTable(int k_max, int l_max) : k_max_(k_max), l_max_(l_max) {
  if (k_max < 1 || l_max < k_max)
    throw contract_error("moment table requires k_max >= 1 and l_max >= k_max");
  width_ = l_max + k_max + 1;
  entries_.assign(static_cast<std::size_t>(k_max + 1) * width_, WideReal{});

  auto at = [&](int k, int l) -> WideReal& {
    return entries_[static_cast<std::size_t>(k) * width_ + l];
  };

  const WideReal a0 = WideReal(1.0) / sqrt(WideReal(2.0));
  const WideReal a1 = sqrt(WideReal(3.0) / WideReal(2.0));
  for (int l = 0; l < width_; ++l) {
    if (l % 2 == 0) at(0, l) = scale(a0, 2.0) / WideReal(l + 1);
    else            at(1, l) = scale(a1, 2.0) / WideReal(l + 2);
  }

  for (int k = 1; k < k_max; ++k) {
    const WideReal alpha =
        WideReal(2 * k + 1) / WideReal(k + 1) * sqrt(WideReal(2 * k + 3) / WideReal(2 * k + 1));
    const WideReal gamma =
        WideReal(k) / WideReal(k + 1) * sqrt(WideReal(2 * k + 3) / WideReal(2 * k - 1));
    const int valid = width_ - (k + 1);  // columns this row can still reach
    for (int l = k + 1; l <= valid; ++l) {
      if ((l + k + 1) & 1) continue;
      at(k + 1, l) = alpha * at(k, l + 1) - gamma * at(k - 1, l);
    }
  }
}

const WideReal& MomentTable::moment(int k, int l) const {
  if (k < 0 || k > k_max_ || l < 0 || l > l_max_)
    throw contract_error("moment index out of range");
  return entries_[static_cast<std::size_t>(k) * width_ + l];
}

std::string MomentTable::dump() const {
  std::ostringstream out;
  char buf[32];
  for (int k = 0; k <= k_max_; ++k) {
    for (int l = 0; l <= l_max_; ++l) {
      if (structural_zero(k, l)) continue;
      auto r = std::to_chars(buf, buf + sizeof buf, moment(k, l).hi);
      out << k << ' ' << l << ' ' << std::string_view(buf, r.ptr - buf) << '\n';
    }
  }
  return out.str();
}

}  // namespace mwxe
