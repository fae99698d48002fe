#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "specfun.hpp"

namespace mwxe {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

struct Cell {
  vec3 lo, hi;
  complex_t estimate;
  double absint;  // integral of |f|, the cancellation scale
  int depth;
};

using Integrand = std::function<complex_t(const vec3&)>;

// Hard cap on processed cells so that non-convergent integrands (the
// documented failure regime) bail out quickly instead of exhausting the
// depth budget cell by cell.
constexpr long kMaxCells = 4000;

class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(const Integrand& f, const QuadratureSpec& spec) : f_(f), spec_(spec) {
    gauss_legendre(std::max(spec.base_rule_order, 2), nodes_, weights_);
  }

  QuadResult run(const vec3& lo, const vec3& hi) {
    QuadResult out;
    Cell root{lo, hi, {}, 0.0, 0};
    rule(root);
    out.cells = 1;
    root_volume_ = volume(root);
    tolerance_ = std::max(spec_.abs_tol, spec_.rel_tol * std::abs(root.estimate));

    bool failed = false;
    std::vector<Cell> stack{root};
    while (!stack.empty()) {
      Cell cell = stack.back();
      stack.pop_back();

      if (out.cells > kMaxCells) {
        // budget exhausted: flush what is queued without refining further
        out.value += cell.estimate;
        failed = true;
        continue;
      }

      Cell kids[8];
      split(cell, kids);
      complex_t kid_sum{0.0, 0.0};
      double kid_abs = 0.0;
      for (auto& kid : kids) {
        rule(kid);
        kid_sum += kid.estimate;
        kid_abs += kid.absint;
      }
      out.cells += 8;

      const double diff = std::abs(cell.estimate - kid_sum);
      const double local_tol = tolerance_ * (volume(cell) / root_volume_);
      const double noise_floor = 64.0 * 1e-16 * kid_abs;
      if (diff <= std::max(local_tol, noise_floor)) {
        out.value += kid_sum;
        out.error_estimate += diff;
      } else if (cell.depth + 1 >= spec_.max_subdivision_depth) {
        out.value += kid_sum;
        out.error_estimate += diff;
        failed = true;
      } else {
        for (int i = 7; i >= 0; --i) {
          kids[i].depth = cell.depth + 1;
          stack.push_back(kids[i]);
        }
      }
    }
    out.converged =
        !failed &&
        out.error_estimate <= std::max(spec_.abs_tol, spec_.rel_tol * std::abs(out.value));
    return out;
  }

 private:
  static double volume(const Cell& c) {
    return (c.hi[0] - c.lo[0]) * (c.hi[1] - c.lo[1]) * (c.hi[2] - c.lo[2]);
  }

  void split(const Cell& c, Cell* kids) const {
    vec3 mid{0.5 * (c.lo[0] + c.hi[0]), 0.5 * (c.lo[1] + c.hi[1]), 0.5 * (c.lo[2] + c.hi[2])};
    int n = 0;
    for (int ix = 0; ix < 2; ++ix)
      for (int iy = 0; iy < 2; ++iy)
        for (int iz = 0; iz < 2; ++iz) {
          Cell& k = kids[n++];
          k.lo = {ix ? mid[0] : c.lo[0], iy ? mid[1] : c.lo[1], iz ? mid[2] : c.lo[2]};
          k.hi = {ix ? c.hi[0] : mid[0], iy ? c.hi[1] : mid[1], iz ? c.hi[2] : mid[2]};
          k.depth = c.depth;
        }
  }

  void rule(Cell& c) {
    const int g = static_cast<int>(nodes_.size());
    const double sx = 0.5 * (c.hi[0] - c.lo[0]), cx = 0.5 * (c.hi[0] + c.lo[0]);
    const double sy = 0.5 * (c.hi[1] - c.lo[1]), cy = 0.5 * (c.hi[1] + c.lo[1]);
    const double sz = 0.5 * (c.hi[2] - c.lo[2]), cz = 0.5 * (c.hi[2] + c.lo[2]);
    const double jac = sx * sy * sz;
    complex_t sum{0.0, 0.0};
    double abs_sum = 0.0;
    for (int i = 0; i < g; ++i) {
      const double x = cx + sx * nodes_[i];
      for (int j = 0; j < g; ++j) {
        const double y = cy + sy * nodes_[j];
        double wij = weights_[i] * weights_[j];
        for (int l = 0; l < g; ++l) {
          const vec3 pt{x, y, cz + sz * nodes_[l]};
          const complex_t fv = f_(pt);
          const double w = wij * weights_[l];
          sum += w * fv;
          abs_sum += w * std::abs(fv);
        }
      }
    }
    c.estimate = jac * sum;
    c.absint = jac * abs_sum;
  }

  const Integrand& f_;
  QuadratureSpec spec_;
  std::vector<double> nodes_, weights_;
  double root_volume_ = 1.0;
  double tolerance_ = 0.0;
};

}  // namespace

QuadResult quad_entry(HarmonicIndex idx, const WaveletIndex& k, double lambda_n, double lambda0,
                      const QuadratureSpec& spec) {
  if (std::abs(idx.q) > idx.p) throw contract_error("quad_entry requires |q| <= p");
  if (k.kx < 0 || k.ky < 0 || k.kz < 0 || lambda_n < 0.0 || lambda0 <= 0.0)
    throw contract_error("quad_entry: invalid wavelet degrees or scales");
  const double inv_sqrt8 = 1.0 / std::sqrt(8.0);
  const ScaleParams sc{lambda_n / 2.0, lambda0};
  const bool laplace = lambda_n == 0.0;
  Integrand f = [&](const vec3& x) -> complex_t {
    complex_t qv = laplace ? eval_regular_laplace(idx, sc, x) : eval_regular(idx, sc, x);
    double basis = normalized_legendre(k.kx, x[0]) * normalized_legendre(k.ky, x[1]) *
                   normalized_legendre(k.kz, x[2]);
    return std::conj(qv) * (basis * inv_sqrt8);
  };
  AdaptiveIntegrator integ(f, spec);
  return integ.run({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0});
}

QuadResult direct_potential(const WaveletBlock& block, const vec3& x, double lambda,
                            const QuadratureSpec& spec) {
  const double w = 2.0 * block.half_width();
  vec3 lo{block.translation[0] * w, block.translation[1] * w, block.translation[2] * w};
  vec3 hi{lo[0] + w, lo[1] + w, lo[2] + w};
  if (x[0] >= lo[0] && x[0] <= hi[0] && x[1] >= lo[1] && x[1] <= hi[1] && x[2] >= lo[2] &&
      x[2] <= hi[2])
    throw domain_error("direct_potential: point inside the source box");

  const int K = block.k_max;
  const double norm = std::pow(M_SQRT2, 3.0 * (block.level + 1));
  std::vector<double> bx(K + 1), by(K + 1), bz(K + 1);
  Integrand f = [&, K](const vec3& y) -> complex_t {
    // map into the block's reference coordinates
    const double ux = 2.0 * ((y[0] - lo[0]) / w) - 1.0;
    const double uy = 2.0 * ((y[1] - lo[1]) / w) - 1.0;
    const double uz = 2.0 * ((y[2] - lo[2]) / w) - 1.0;
    for (int j = 0; j <= K; ++j) {
      bx[j] = normalized_legendre(j, ux);
      by[j] = normalized_legendre(j, uy);
      bz[j] = normalized_legendre(j, uz);
    }
    complex_t val{0.0, 0.0};
    for (int kx = 0; kx <= K; ++kx)
      for (int ky = 0; ky <= K; ++ky) {
        const double bxy = bx[kx] * by[ky];
        for (int kz = 0; kz <= K; ++kz) {
          const complex_t& s = block.coeffs[(static_cast<std::size_t>(kx) * (K + 1) + ky) * (K + 1) + kz];
          if (s != complex_t{0.0, 0.0}) val += s * (bxy * bz[kz]);
        }
      }
    const double dx = x[0] - y[0], dy = x[1] - y[1], dz = x[2] - y[2];
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    return val * (norm * std::exp(-lambda * r) / r);
  };
  AdaptiveIntegrator integ(f, spec);
  return integ.run(lo, hi);
}

complex_t multipole_potential(const MultipoleVector& m, const vec3& center, const vec3& x,
                              const ScaleParams& scale) {
  if (scale.lambda <= 0.0) throw domain_error("multipole_potential requires lambda > 0");
  const vec3 d{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
  const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  if (r == 0.0) throw domain_error("multipole_potential: singular at the center");
  const double theta = std::acos(std::clamp(d[2] / r, -1.0, 1.0));
  const double phi = std::atan2(d[1], d[0]);

  const auto radial = scaled_k_all(m.p_max, r, scale);
  complex_t sum{0.0, 0.0};
  for (int p = 0; p <= m.p_max; ++p)
    for (int q = -p; q <= p; ++q)
      sum += m.at(p, q) * radial[p] * spherical_harmonic({p, q}, theta, phi);
  return sum;
}

}  // namespace mwxe
