#include "series.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

namespace mwxe {

bool oddity_zero(HarmonicIndex idx, const WaveletIndex& k) {
  const int aq = std::abs(idx.q);
  if ((k.kz + idx.p + aq) & 1) return true;
  if ((k.kx + k.ky + aq) & 1) return true;
  if (idx.q == 0 && ((k.kx & 1) || (k.ky & 1))) return true;
  return false;
}

int min_term(int p, const WaveletIndex& k) {
  const int d = k.sum() - p;
  return d <= 0 ? 0 : (d + 1) / 2;
}

bool swap_symmetry_zero(HarmonicIndex idx, const WaveletIndex& k) {
  if (k.kx != k.ky) return false;
  const int qm = ((idx.q % 4) + 4) % 4;
  return (k.ky & 1) ? qm == 0 : qm == 2;
}

namespace {

// b_nu = (-1)^nu (2p-2nu-1)!! / (2^nu nu! (p-|q|-2nu)!), built by the
// ratio recurrence so no factorial is ever formed.
std::vector<WideReal> b_coefficients(int p, int aq) {
  const int count = (p - aq) / 2 + 1;
  std::vector<WideReal> b(count);
  WideReal b0{1.0};
  for (int i = 1; i <= p; ++i) {
    b0 *= WideReal(2 * i - 1);
    if (i <= p - aq) b0 /= WideReal(i);
  }
  b[0] = b0;
  for (int nu = 0; nu + 1 < count; ++nu) {
    const int e = p - aq - 2 * nu;
    b[nu + 1] = b[nu] * WideReal(-1.0 * e * (e - 1)) /
                WideReal(2.0 * (nu + 1) * (2 * p - 2 * nu - 1));
  }
  return b;
}

// binomial(n, j) for j = 0..n.
std::vector<WideReal> binomial_row(int n) {
  std::vector<WideReal> row(n + 1);
  row[0] = WideReal(1.0);
  for (int j = 0; j < n; ++j) row[j + 1] = row[j] * WideReal(n - j) / WideReal(j + 1);
  return row;
}

// Evaluates one real branch of I_m as the quadruple sum over
// (mu, nu, alpha, beta). `odd` selects the branch fed by the odd powers
// of the (x - siy)^{|q|} expansion. Direct form, used by eval_im_parts;
// the series evaluator below uses the cached variant instead.
WideReal im_branch(HarmonicIndex idx, const WaveletIndex& k, int m, const MomentTable& table,
                   bool odd) {
  const int p = idx.p;
  const int aq = std::abs(idx.q);
  const int mu_count = odd ? (aq + 1) / 2 : aq / 2 + 1;
  if (mu_count <= 0) return WideReal(0.0);

  const auto a_row = binomial_row(aq);
  const auto b = b_coefficients(p, aq);
  const int off = odd ? 1 : 0;

  WideReal total{0.0};
  for (int mu = 0; mu < mu_count; ++mu) {
    WideReal mu_sum{0.0};
    for (int nu = 0; nu <= (p - aq) / 2; ++nu) {
      WideReal nu_sum{0.0};
      WideReal c{1.0};  // binomial(m+nu, alpha), updated along alpha
      for (int alpha = 0; alpha <= m + nu; ++alpha) {
        const int ez = p - aq + 2 * m - 2 * alpha;
        if (alpha > 0) c = c * WideReal(m + nu - alpha + 1) / WideReal(alpha);
        if (!MomentTable::structural_zero(k.kz, ez)) {
          WideReal alpha_sum{0.0};
          WideReal d{1.0};  // binomial(alpha, beta)
          for (int beta = 0; beta <= alpha; ++beta) {
            if (beta > 0) d = d * WideReal(alpha - beta + 1) / WideReal(beta);
            const int ey = aq + 2 * beta - 2 * mu - off;
            const int ex = 2 * alpha - 2 * beta + 2 * mu + off;
            if (ey < 0 || MomentTable::structural_zero(k.ky, ey)) continue;
            if (MomentTable::structural_zero(k.kx, ex)) continue;
            alpha_sum += d * table.moment(k.ky, ey) * table.moment(k.kx, ex);
          }
          nu_sum += c * table.moment(k.kz, ez) * alpha_sum;
        }
      }
      mu_sum += b[nu] * nu_sum;
    }
    const WideReal a = a_row[2 * mu + off];
    total += ((mu & 1) ? -a : a) * mu_sum;
  }
  return total;
}

// Sign of the collected phase factor c; the axis itself is Imaginary
// exactly when k_y is odd.
double axis_sign(int q, int ky) {
  const int aq = std::abs(q);
  const int s = q > 0 ? 1 : (q < 0 ? -1 : 0);
  if (ky & 1) return ((aq / 2) & 1) ? -s : s;
  return (((aq + 1) / 2) & 1) ? -1.0 : 1.0;
}

struct BranchTerm {
  WideReal value;
  bool feasible;  // at least one moment product survived the index bounds
};

// Fixed-(p,q,k) branch evaluator reused across the series terms. The
// inner (beta) sums do not depend on m, so they are cached per
// (mu, alpha) and each term costs O(alpha_range) on top of the cache.
class BranchEvaluator {
 public:
  BranchEvaluator(HarmonicIndex idx, const WaveletIndex& k, const MomentTable& table)
      : table_(table),
        p_(idx.p),
        aq_(std::abs(idx.q)),
        k_(k),
        odd_(k.kx & 1),
        b_(b_coefficients(idx.p, std::abs(idx.q))),
        a_row_(binomial_row(std::abs(idx.q))) {
    const int mu_count = odd_ ? (aq_ + 1) / 2 : aq_ / 2 + 1;
    cache_.resize(std::max(mu_count, 0));
  }

  // Signed branch value I^{(b)}_m including the alternating a-coefficient.
  BranchTerm term(int m) {
    WideReal total{0.0};
    bool feasible = false;
    const int off = odd_ ? 1 : 0;
    for (int mu = 0; mu < static_cast<int>(cache_.size()); ++mu) {
      WideReal mu_sum{0.0};
      for (int nu = 0; nu <= (p_ - aq_) / 2; ++nu) {
        const int alpha_hi = alpha_limit(m, nu);
        WideReal c{1.0};
        WideReal nu_sum{0.0};
        for (int alpha = 0; alpha <= alpha_hi; ++alpha) {
          const int ez = p_ - aq_ + 2 * m - 2 * alpha;
          if (alpha > 0) c = c * WideReal(m + nu - alpha + 1) / WideReal(alpha);
          if (MomentTable::structural_zero(k_.kz, ez)) continue;
          const Inner& t = inner(mu, alpha);
          if (!t.feasible) continue;
          feasible = true;
          nu_sum += c * table_.moment(k_.kz, ez) * t.value;
        }
        mu_sum += b_[nu] * nu_sum;
      }
      const WideReal a = a_row_[2 * mu + off];
      total += ((mu & 1) ? -a : a) * mu_sum;
    }
    return {total, feasible};
  }

 private:
  struct Inner {
    WideReal value;
    bool feasible;
  };

  int alpha_limit(int m, int nu) const {
    // moment condition on the z factor: ez >= kz
    const int by_z = (p_ - aq_ + 2 * m - k_.kz) / 2;
    return std::min(m + nu, by_z);
  }

  const Inner& inner(int mu, int alpha) {
    auto& column = cache_[mu];
    while (static_cast<int>(column.size()) <= alpha) {
      const int a = static_cast<int>(column.size());
      column.push_back(compute_inner(mu, a));
    }
    return column[alpha];
  }

  Inner compute_inner(int mu, int alpha) const {
    const int off = odd_ ? 1 : 0;
    Inner out{WideReal{0.0}, false};
    WideReal d{1.0};
    for (int beta = 0; beta <= alpha; ++beta) {
      if (beta > 0) d = d * WideReal(alpha - beta + 1) / WideReal(beta);
      const int ey = aq_ + 2 * beta - 2 * mu - off;
      const int ex = 2 * alpha - 2 * beta + 2 * mu + off;
      if (ey < 0 || MomentTable::structural_zero(k_.ky, ey)) continue;
      if (MomentTable::structural_zero(k_.kx, ex)) continue;
      out.feasible = true;
      out.value += d * table_.moment(k_.ky, ey) * table_.moment(k_.kx, ex);
    }
    return out;
  }

  const MomentTable& table_;
  int p_, aq_;
  WaveletIndex k_;
  bool odd_;
  std::vector<WideReal> b_;
  std::vector<WideReal> a_row_;
  std::vector<std::vector<Inner>> cache_;  // [mu][alpha] inner sums
};

// C_Y(p,q) = sqrt((2p+1)/4pi * (p-|q|)!/(p+|q|)!)
WideReal wide_harmonic_norm(int p, int aq) {
  WideReal ratio{1.0};
  for (int j = p - aq + 1; j <= p + aq; ++j) ratio /= WideReal(j);
  return sqrt(WideReal(2 * p + 1) / scale(wide::pi, 4.0) * ratio);
}

void require_table(const MomentTable& table, int p, const WaveletIndex& k, int m) {
  const int need_l = 2 * m + p;
  const int need_k = std::max(std::max(k.kx, k.ky), k.kz);
  if (table.l_max() < need_l || table.k_max() < need_k)
    throw contract_error("moment table too small for requested term");
}

// A single term below eps_a does not certify an effective zero: the
// leading I_m can vanish exactly (index-bound infeasibility is skipped
// outright, but coefficient cancellations also occur) while later terms
// are large. The absolute branch of the stopping rule therefore asks
// for this many consecutive sub-eps_a terms.
constexpr int kZeroRunWindow = 6;

}  // namespace

std::pair<WideReal, WideReal> eval_im_parts(HarmonicIndex idx, const WaveletIndex& k, int m,
                                            const MomentTable& table) {
  require_table(table, idx.p, k, m);
  return {im_branch(idx, k, m, table, false), im_branch(idx, k, m, table, true)};
}

AxisValue eval_im(HarmonicIndex idx, const WaveletIndex& k, int m, const MomentTable& table) {
  AxisValue out;
  out.axis = (k.ky & 1) ? Axis::Imaginary : Axis::Real;
  if (oddity_zero(idx, k) || m < min_term(idx.p, k)) return out;
  require_table(table, idx.p, k, m);
  const WideReal branch = im_branch(idx, k, m, table, k.kx & 1);
  out.value = WideReal(axis_sign(idx.q, k.ky)) * branch;
  out.zero = is_zero(out.value);
  return out;
}

EntryResult eval_entry(HarmonicIndex idx, const WaveletIndex& k, const SeriesParams& params,
                       const MomentTable& table) {
  EntryResult result;
  result.value.axis = (k.ky & 1) ? Axis::Imaginary : Axis::Real;
  if (oddity_zero(idx, k) || swap_symmetry_zero(idx, k)) {
    result.effective_zero = true;
    return result;
  }
  if (params.lambda_n == 0.0) {
    result.value = eval_entry_laplace(idx, k, table);
    result.effective_zero = result.value.zero;
    return result;
  }

  const int p = idx.p;
  const int aq = std::abs(idx.q);
  const int m0 = min_term(p, k);
  require_table(table, p, k, m0);

  // prefactor (lambda_n/(2 lambda0))^p / (2p+1)!!, built jointly so
  // neither factor overflows on its own, times C_Y/sqrt(8) and the
  // constant sign of the axis factor.
  const WideReal rate = WideReal(params.lambda_n) / scale(WideReal(params.lambda0), 2.0);
  WideReal prefactor = wide_harmonic_norm(p, aq) / sqrt(WideReal(8.0));
  for (int j = 1; j <= p; ++j) prefactor *= rate / WideReal(2 * j + 1);
  prefactor *= WideReal(axis_sign(idx.q, k.ky));

  const WideReal lam2_8 = sqr(WideReal(params.lambda_n)) / WideReal(8.0);
  // coefficient A_m (lambda_n^2/8)^m, advanced via its term ratio
  WideReal coefficient{1.0};
  for (int m = 0; m < m0; ++m)
    coefficient *= lam2_8 / WideReal(1.0 * (m + 1) * (2 * m + 2 * p + 3));

  BranchEvaluator branch(idx, k, table);
  WideReal sum{0.0};
  const WideReal eps_a{params.eps_a};
  const WideReal eps_r{params.eps_r};
  int zero_run = 0;
  for (int m = m0; m <= params.m_max; ++m) {
    if (2 * m + p > table.l_max())
      throw contract_error("moment table too small for requested term");
    const BranchTerm bt = branch.term(m);
    if (m == m0) result.effective_zero = abs(prefactor * coefficient * bt.value) < eps_a;
    if (!bt.feasible) {
      // structurally empty term: no index tuple admissible yet
      coefficient *= lam2_8 / WideReal(1.0 * (m + 1) * (2 * m + 2 * p + 3));
      continue;
    }
    const WideReal term = prefactor * coefficient * bt.value;
    sum += term;
    result.terms_used = m;
    if (!finite(sum)) break;  // exponent overflow: report as non-converged
    const WideReal magnitude = abs(term);
    bool stop = false;
    if (magnitude < eps_a) {
      if (++zero_run >= kZeroRunWindow) stop = true;
    } else {
      zero_run = 0;
    }
    if (!is_zero(sum) && magnitude < eps_r * abs(sum)) stop = true;
    if (stop) {
      result.value.value = sum;
      result.value.zero = is_zero(sum);
      return result;
    }
    coefficient *= lam2_8 / WideReal(1.0 * (m + 1) * (2 * m + 2 * p + 3));
  }
  result.value.value = sum;
  result.value.zero = is_zero(sum);
  result.converged = false;
  return result;
}

AxisValue eval_entry_laplace(HarmonicIndex idx, const WaveletIndex& k, const MomentTable& table) {
  AxisValue out;
  out.axis = (k.ky & 1) ? Axis::Imaginary : Axis::Real;
  if (oddity_zero(idx, k)) return out;
  if (idx.p < k.sum()) return out;  // moment condition at m = 0
  if (swap_symmetry_zero(idx, k)) return out;
  require_table(table, idx.p, k, 0);

  const int aq = std::abs(idx.q);
  WideReal prefactor = wide_harmonic_norm(idx.p, aq) / sqrt(WideReal(8.0));
  for (int j = 1; j <= idx.p; ++j) prefactor /= WideReal(2 * (2 * j + 1));
  const WideReal branch = im_branch(idx, k, 0, table, k.kx & 1);
  out.value = prefactor * WideReal(axis_sign(idx.q, k.ky)) * branch;
  out.zero = is_zero(out.value);
  return out;
}

}  // namespace mwxe
