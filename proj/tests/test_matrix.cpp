#include "conversion_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"

using namespace mwxe;

namespace {

SeriesParams default_params() {
  SeriesParams sp;
  sp.eps_a = 1e-16;
  sp.eps_r = 1e-16;
  sp.m_max = 512;
  return sp;
}

MomentTable& shared_table() {
  static MomentTable t(10, 1050);
  return t;
}

WaveletBlock random_block(int level, int k_max, uint64_t seed, bool complex_coeffs) {
  std::mt19937_64 rng(seed);
  auto unit = [&]() { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  WaveletBlock block(level, {0, 0, 0}, k_max);
  for (auto& c : block.coeffs) c = complex_coeffs ? complex_t(unit(), unit()) : complex_t(unit());
  return block;
}

MultipoleVector random_local(int p_max, uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&]() { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  MultipoleVector v(p_max);
  for (auto& c : v.coeffs) c = complex_t(unit(), unit());
  return v;
}

complex_t inner(const std::vector<complex_t>& a, const std::vector<complex_t>& b) {
  complex_t s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

TEST_CASE("laplace build matches the predicted pattern") {
  auto m = ConversionMatrix::build(0, 0.0, 1.0, 10, 10, default_params(), shared_table());
  auto s = m.stats();
  CHECK(s.total == 87846);
  CHECK(s.real_nonzero == 1512);
  CHECK(s.imag_nonzero == 1001);
  CHECK(m.entry(0, 0, {0, 0, 0}).real() ==
        doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-15));
  // stored keys satisfy the pattern p >= kx+ky+kz
  for (const auto& e : m.real_entries()) CHECK(e.p >= e.kx + e.ky + e.kz);
}

TEST_CASE("store split follows the k_y parity rule and stays disjoint") {
  auto m = ConversionMatrix::build(0, 2.0, 2.0, 6, 6, default_params(), shared_table());
  for (const auto& e : m.real_entries()) CHECK(e.ky % 2 == 0);
  for (const auto& e : m.imag_entries()) CHECK(e.ky % 2 == 1);
  // disjoint by construction of the parity rule; verify on the raw keys
  auto key = [](const ConversionMatrix::Entry& e) {
    return (((static_cast<long>(e.p) * 32 + e.q) * 32 + e.kx) * 32 + e.ky) * 32 + e.kz;
  };
  std::vector<long> keys;
  for (const auto& e : m.real_entries()) keys.push_back(key(e));
  for (const auto& e : m.imag_entries()) keys.push_back(key(e));
  std::sort(keys.begin(), keys.end());
  CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
}

TEST_CASE("no stored key violates the parity predicate") {
  auto m = ConversionMatrix::build(0, 4.0, 4.0, 8, 8, default_params(), shared_table());
  for (const auto& e : m.real_entries())
    CHECK_FALSE(oddity_zero({e.p, e.q}, {e.kx, e.ky, e.kz}));
  for (const auto& e : m.imag_entries())
    CHECK_FALSE(oddity_zero({e.p, e.q}, {e.kx, e.ky, e.kz}));
}

TEST_CASE("swap and conjugation symmetries hold bitwise on the stores") {
  auto m = ConversionMatrix::build(0, 3.0, 3.0, 8, 8, default_params(), shared_table());
  auto check_entry = [&](const ConversionMatrix::Entry& e) {
    complex_t v = m.entry(e.p, e.q, {e.kx, e.ky, e.kz});
    // conjugation: negative order
    complex_t vneg = m.entry(e.p, -e.q, {e.kx, e.ky, e.kz});
    CHECK(vneg == std::conj(v));
    // swap: (ky,kx,kz) = (-i)^q conj, exact because both sides are index
    // transforms of the same stored value
    complex_t vswap = m.entry(e.p, e.q, {e.ky, e.kx, e.kz});
    static const complex_t phases[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    complex_t expect = phases[e.q % 4] * std::conj(v);
    CHECK(vswap.real() == expect.real());
    CHECK(vswap.imag() == expect.imag());
  };
  for (std::size_t i = 0; i < m.real_entries().size(); i += 7) check_entry(m.real_entries()[i]);
  for (std::size_t i = 0; i < m.imag_entries().size(); i += 7) check_entry(m.imag_entries()[i]);
  // absent and structurally zero keys read back as zero
  CHECK(m.entry(1, 0, {0, 0, 0}) == complex_t{0.0, 0.0});
}

TEST_CASE("level scaling identity to one ulp") {
  auto fine = ConversionMatrix::build(2, 4.0, 4.0, 6, 6, default_params(), shared_table());
  auto base = ConversionMatrix::build(0, 1.0, 4.0, 6, 6, default_params(), shared_table());
  REQUIRE(fine.real_entries().size() == base.real_entries().size());
  REQUIRE(fine.imag_entries().size() == base.imag_entries().size());
  const double factor = 0.125;  // 2^{-3*2/2}
  auto check = [&](const ConversionMatrix::Entry& a, const ConversionMatrix::Entry& b) {
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK(a.kx == b.kx);
    CHECK(a.ky == b.ky);
    CHECK(a.kz == b.kz);
    double expect = b.value * factor;
    CHECK(std::abs(a.value - expect) <= std::abs(expect) * 0x1.0p-52);
  };
  for (std::size_t i = 0; i < fine.real_entries().size(); ++i)
    check(fine.real_entries()[i], base.real_entries()[i]);
  for (std::size_t i = 0; i < fine.imag_entries().size(); ++i)
    check(fine.imag_entries()[i], base.imag_entries()[i]);
}

TEST_CASE("forward of a delta block against the analytic element") {
  auto m = ConversionMatrix::build(0, 0.0, 1.0, 4, 4, default_params(), shared_table());
  WaveletBlock block(0, {0, 0, 0}, 4);
  block.at({0, 0, 0}) = 1.0;
  auto mv = m.forward(block, false);
  CHECK(mv.at(0, 0).real() == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-15));
}

TEST_CASE("real blocks give conjugate-symmetric expansions") {
  auto m = ConversionMatrix::build(0, 2.0, 2.0, 6, 4, default_params(), shared_table());
  auto block = random_block(0, 4, 42, false);
  auto mv = m.forward(block, true);
  for (int p = 0; p <= 6; ++p)
    for (int q = 1; q <= p; ++q) {
      complex_t a = mv.at(p, q);
      complex_t b = mv.at(p, -q);
      CHECK(std::abs(b - std::conj(a)) < 1e-14 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("kernel constant is 8 lambda on request") {
  auto m = ConversionMatrix::build(0, 2.5, 2.5, 3, 3, default_params(), shared_table());
  auto block = random_block(0, 3, 7, true);
  auto bare = m.forward(block, false);
  auto scaled = m.forward(block, true);
  for (std::size_t i = 0; i < bare.coeffs.size(); ++i)
    CHECK(scaled.coeffs[i] == bare.coeffs[i] * (8.0 * 2.5));
}

TEST_CASE("forward/adjoint adjointness") {
  auto m = ConversionMatrix::build(0, 1.5, 1.5, 6, 5, default_params(), shared_table());
  auto block = random_block(0, 5, 99, true);
  auto local = random_local(6, 100);
  auto forwarded = m.forward(block, false);
  auto adjointed = m.adjoint(local);
  complex_t lhs = inner(forwarded.coeffs, local.coeffs);
  complex_t rhs = inner(block.coeffs, adjointed);
  CHECK(std::abs(lhs - rhs) < 1e-13 * std::max(std::abs(lhs), 1.0));
}

TEST_CASE("adjoint of a delta local expansion") {
  auto m = ConversionMatrix::build(0, 0.0, 1.0, 4, 4, default_params(), shared_table());
  MultipoleVector local(4);
  local.at(0, 0) = 1.0;
  auto w = m.adjoint(local);
  CHECK(w[0].real() == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-15));
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(std::abs(w[i]) < 1e-18);

  MultipoleVector zero(4);
  auto wz = m.adjoint(zero);
  for (auto& c : wz) CHECK(c == complex_t{0.0, 0.0});
}

TEST_CASE("contract violations") {
  auto m = ConversionMatrix::build(0, 1.0, 1.0, 3, 3, default_params(), shared_table());
  WaveletBlock wrong_level(1, {0, 0, 0}, 3);
  CHECK_THROWS_AS(m.forward(wrong_level, false), contract_error);
  WaveletBlock small(0, {0, 0, 0}, 2);
  CHECK_THROWS_AS(m.forward(small, false), contract_error);
  MultipoleVector big(5);
  CHECK_THROWS_AS(m.adjoint(big), contract_error);
  CHECK_THROWS_AS(m.entry(4, 0, {0, 0, 0}), contract_error);
  CHECK_THROWS_AS(m.entry(2, 0, {0, 0, 7}), contract_error);
  CHECK_THROWS_AS(
      ConversionMatrix::build(0, -1.0, 1.0, 3, 3, default_params(), shared_table()),
      contract_error);
}

TEST_CASE("series term cap propagates the offending key") {
  SeriesParams sp = default_params();
  sp.m_max = 2;
  try {
    ConversionMatrix::build(0, 30.0, 30.0, 2, 2, sp, shared_table());
    FAIL("expected convergence_error");
  } catch (const convergence_error& e) {
    CHECK(e.level == 0);
    CHECK(e.idx.p >= 0);
  }
}

TEST_CASE("file round trip is exact") {
  auto m = ConversionMatrix::build(0, 1.25, 1.25, 6, 5, default_params(), shared_table());
  std::ostringstream out;
  m.write(out);
  std::istringstream in(out.str());
  auto back = ConversionMatrix::read(in);

  CHECK(back.level() == m.level());
  CHECK(back.lambda() == m.lambda());
  CHECK(back.lambda0() == m.lambda0());
  CHECK(back.p_max() == m.p_max());
  CHECK(back.k_max() == m.k_max());
  CHECK(back.eps_a() == m.eps_a());
  CHECK(back.eps_r() == m.eps_r());
  REQUIRE(back.real_entries().size() == m.real_entries().size());
  REQUIRE(back.imag_entries().size() == m.imag_entries().size());
  for (std::size_t i = 0; i < m.real_entries().size(); ++i)
    CHECK(back.real_entries()[i].value == m.real_entries()[i].value);
  for (std::size_t i = 0; i < m.imag_entries().size(); ++i)
    CHECK(back.imag_entries()[i].value == m.imag_entries()[i].value);

  // second serialization is byte-identical
  std::ostringstream again;
  back.write(again);
  CHECK(again.str() == out.str());
}

TEST_CASE("parse errors carry line numbers") {
  {
    std::istringstream in("BOGUS\n");
    CHECK_THROWS_AS(ConversionMatrix::read(in), parse_error);
  }
  {
    std::istringstream in("MWXE 1\nlevel=0 lambda=1 lambda0=1 pmax=2 kmax=2 eps_a=1e-16\n");
    try {
      ConversionMatrix::read(in);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line_number == 2);
    }
  }
  {
    std::istringstream in(
        "MWXE 1\n"
        "level=0 lambda=1 lambda0=1 pmax=2 kmax=2 eps_a=1e-16 eps_r=1e-16\n"
        "0 0 0 0 0 X 1.5\n");
    try {
      ConversionMatrix::read(in);
      FAIL("expected parse_error");
    } catch (const parse_error& e) {
      CHECK(e.line_number == 3);
    }
  }
  CHECK_THROWS_AS(ConversionMatrix::read_file("/nonexistent/path.mwxe"), io_error);
}

TEST_CASE("keeping effective zeros yields a superset") {
  SeriesParams sp = default_params();
  ConversionMatrix::BuildOptions keep;
  keep.keep_effective_zeros = true;
  auto dropped = ConversionMatrix::build(0, 2.0, 2.0, 6, 6, sp, shared_table());
  auto kept = ConversionMatrix::build(0, 2.0, 2.0, 6, 6, sp, shared_table(), keep);
  CHECK(kept.real_entries().size() > dropped.real_entries().size());
  auto skept = kept.stats();
  // with nothing dropped, every parity-admissible key is materialized
  CHECK(skept.additional_real_zero == 0);
  CHECK(skept.additional_imag_zero == 0);
}

TEST_CASE("single-threaded and parallel builds agree bitwise") {
  SeriesParams sp = default_params();
  ConversionMatrix::BuildOptions serial;
  serial.threads = 1;
  ConversionMatrix::BuildOptions parallel;
  parallel.threads = 4;
  auto a = ConversionMatrix::build(0, 2.0, 2.0, 7, 5, sp, shared_table(), serial);
  auto b = ConversionMatrix::build(0, 2.0, 2.0, 7, 5, sp, shared_table(), parallel);
  REQUIRE(a.real_entries().size() == b.real_entries().size());
  for (std::size_t i = 0; i < a.real_entries().size(); ++i)
    CHECK(a.real_entries()[i].value == b.real_entries()[i].value);
}
