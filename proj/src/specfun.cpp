#include "specfun.hpp"

#include <algorithm>
#include <cmath>

namespace mwxe {

namespace {

// Ratios r_j = i_j(x)/i_{j-1}(x) for j = 1..p by the backward continued
// fraction r_j = x / ((2j+1) + x r_{j+1}). Backward evaluation is stable
// for the exponentially growing i_p at every order.
void bessel_i_ratios(int p, double x, double* out) {
  int start = std::max(p, static_cast<int>(x)) + 40;
  double r = x / (2.0 * start + 3.0);
  for (int j = start; j >= 1; --j) {
    r = x / ((2.0 * j + 1.0) + x * r);
    if (j <= p) out[j - 1] = r;
  }
}

double bessel_i0(double x) {
  // sinh(x)/x, series for small x to avoid 0/0.
  if (x < 1e-4) {
    double x2 = x * x;
    return 1.0 + x2 / 6.0 * (1.0 + x2 / 20.0);
  }
  return std::sinh(x) / x;
}

}  // namespace

double scaled_i(int p, double r, const ScaleParams& scale) {
  if (p < 0 || r < 0.0) throw domain_error("scaled_i requires p >= 0, r >= 0");
  const double x = scale.lambda * r;
  if (x == 0.0) return p == 0 ? 1.0 : 0.0;
  double v = bessel_i0(x);
  if (!std::isfinite(v)) throw range_error("scaled_i: argument beyond exp range");
  if (p == 0) return v;
  std::vector<double> ratios(p);
  bessel_i_ratios(p, x, ratios.data());
  for (int j = 0; j < p; ++j) v *= ratios[j] / scale.lambda0;
  if (!std::isfinite(v)) throw range_error("scaled_i: scaled value overflows");
  return v;
}

std::vector<double> scaled_i_all(int p_max, double r, const ScaleParams& scale) {
  std::vector<double> out(p_max + 1, 0.0);
  const double x = scale.lambda * r;
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  double v = bessel_i0(x);
  if (!std::isfinite(v)) throw range_error("scaled_i: argument beyond exp range");
  out[0] = v;
  if (p_max == 0) return out;
  std::vector<double> ratios(p_max);
  bessel_i_ratios(p_max, x, ratios.data());
  for (int p = 1; p <= p_max; ++p) out[p] = out[p - 1] * ratios[p - 1] / scale.lambda0;
  return out;
}

std::vector<double> scaled_k_all(int p_max, double r, const ScaleParams& scale) {
  if (r <= 0.0) throw domain_error("scaled_k: singular at r = 0");
  const double x = scale.lambda * r;
  const double s = scale.lambda0;
  std::vector<double> out(p_max + 1);
  out[0] = M_PI_2 / x * std::exp(-x);
  if (p_max >= 1) out[1] = out[0] * s * (1.0 + 1.0 / x);
  for (int p = 1; p < p_max; ++p)
    out[p + 1] = (2.0 * p + 1.0) / x * s * out[p] + s * s * out[p - 1];
  if (!std::isfinite(out[p_max])) throw range_error("scaled_k: scaled value overflows");
  return out;
}

double scaled_k(int p, double r, const ScaleParams& scale) {
  return scaled_k_all(p, r, scale)[p];
}

double assoc_legendre(int p, int q_abs, double z) {
  if (q_abs < 0 || q_abs > p) throw domain_error("assoc_legendre requires 0 <= |q| <= p");
  if (std::abs(z) > 1.0) throw domain_error("assoc_legendre requires |z| <= 1");
  // P_m^m = (-1)^m (2m-1)!! (1-z^2)^{m/2}, then upward in degree.
  double pmm = 1.0;
  if (q_abs > 0) {
    double somx2 = std::sqrt((1.0 - z) * (1.0 + z));
    double f = 1.0;
    for (int i = 0; i < q_abs; ++i) {
      pmm *= -f * somx2;
      f += 2.0;
    }
  }
  if (p == q_abs) return pmm;
  double pmmp1 = z * (2.0 * q_abs + 1.0) * pmm;
  for (int l = q_abs + 2; l <= p; ++l) {
    double pll = (z * (2.0 * l - 1.0) * pmmp1 - (l + q_abs - 1.0) * pmm) / (l - q_abs);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pmmp1;
}

double normalized_legendre(int k, double x) {
  double p0 = 1.0, p1 = x;
  if (k == 0) return M_SQRT1_2;
  for (int j = 1; j < k; ++j) {
    double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1 * std::sqrt(k + 0.5);
}

double harmonic_norm(int p, int q) {
  int aq = std::abs(q);
  double ratio = 1.0;
  for (int j = p - aq + 1; j <= p + aq; ++j) ratio /= j;
  return std::sqrt((2.0 * p + 1.0) / (4.0 * M_PI) * ratio);
}

complex_t spherical_harmonic(HarmonicIndex idx, double theta, double phi) {
  int aq = std::abs(idx.q);
  double v = harmonic_norm(idx.p, idx.q) * assoc_legendre(idx.p, aq, std::cos(theta));
  return v * std::polar(1.0, idx.q * phi);
}

namespace {

struct Spherical {
  double r, theta, phi;
};

Spherical to_spherical(const vec3& y) {
  double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  double ct = std::clamp(y[2] / r, -1.0, 1.0);
  return {r, std::acos(ct), std::atan2(y[1], y[0])};
}

}  // namespace

complex_t eval_regular(HarmonicIndex idx, const ScaleParams& scale, const vec3& y) {
  auto s = to_spherical(y);
  if (s.r == 0.0) return idx.p == 0 ? complex_t(harmonic_norm(0, 0)) : complex_t(0.0);
  return scaled_i(idx.p, s.r, scale) * spherical_harmonic(idx, s.theta, s.phi);
}

complex_t eval_regular_laplace(HarmonicIndex idx, const ScaleParams& scale, const vec3& y) {
  auto s = to_spherical(y);
  if (s.r == 0.0) return idx.p == 0 ? complex_t(harmonic_norm(0, 0)) : complex_t(0.0);
  double radial = 1.0;
  for (int j = 1; j <= idx.p; ++j) radial *= s.r / (scale.lambda0 * (2.0 * j + 1.0));
  return radial * spherical_harmonic(idx, s.theta, s.phi);
}

}  // namespace mwxe
