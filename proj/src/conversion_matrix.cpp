#include "conversion_matrix.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string_view>
#include <thread>

namespace mwxe {

namespace {

bool key_less(const ConversionMatrix::Entry& a, const ConversionMatrix::Entry& b) {
  if (a.p != b.p) return a.p < b.p;
  if (a.q != b.q) return a.q < b.q;
  if (a.kx != b.kx) return a.kx < b.kx;
  if (a.ky != b.ky) return a.ky < b.ky;
  return a.kz < b.kz;
}

// Applies (-i)^q conj(.) to a single-axis value: the x<->y swap map.
// Pure index/sign bookkeeping, hence bit-exact.
void swapped_value(int q, Axis axis, double v, Axis& axis_out, double& v_out) {
  // conj: real stays, imaginary negates
  double w = axis == Axis::Imaginary ? -v : v;
  switch (((q % 4) + 4) % 4) {
    case 0:
      axis_out = axis;
      v_out = w;
      break;
    case 1:  // * (-i)
      axis_out = axis == Axis::Real ? Axis::Imaginary : Axis::Real;
      v_out = axis == Axis::Real ? -w : w;
      break;
    case 2:  // * (-1)
      axis_out = axis;
      v_out = -w;
      break;
    default:  // * (+i)
      axis_out = axis == Axis::Real ? Axis::Imaginary : Axis::Real;
      v_out = axis == Axis::Real ? w : -w;
      break;
  }
}

struct RowResult {
  std::vector<ConversionMatrix::Entry> real;
  std::vector<ConversionMatrix::Entry> imag;
};

const char* kMagic = "MWXE 1";

void format_double(std::ostream& out, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, r.ptr - buf);
}

}  // namespace

ConversionMatrix ConversionMatrix::build(int level, double lambda, double lambda0, int p_max,
                                         int k_max, const SeriesParams& params,
                                         const MomentTable& table, const BuildOptions& options) {
  if (level < 0 || lambda < 0.0 || lambda0 <= 0.0 || p_max < 0 || k_max < 0)
    throw contract_error("invalid build parameters");
  if (table.k_max() < k_max) throw contract_error("moment table k_max too small for build");

  ConversionMatrix mat;
  mat.level_ = level;
  mat.lambda_ = lambda;
  mat.lambda0_ = lambda0;
  mat.p_max_ = p_max;
  mat.k_max_ = k_max;
  mat.eps_a_ = params.eps_a;
  mat.eps_r_ = params.eps_r;

  const double lambda_n = lambda / static_cast<double>(1 << level);
  SeriesParams level_params = params;
  level_params.lambda_n = lambda_n;
  level_params.lambda0 = lambda0;

  // 2^{-3n/2}, applied after rounding so that per-level stores are related
  // to the level-0 store by one double multiplication exactly
  const double level_scale = to_double(pow_int(sqrt(WideReal(0.5)), 3 * level));

  std::vector<HarmonicIndex> rows;
  for (int p = 0; p <= p_max; ++p)
    for (int q = 0; q <= p; ++q) rows.push_back({p, q});

  std::vector<RowResult> results(rows.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  HarmonicIndex failed_idx{};
  WaveletIndex failed_key{};
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t row = next.fetch_add(1);
      if (row >= rows.size() || failed.load(std::memory_order_relaxed)) break;
      const HarmonicIndex idx = rows[row];
      RowResult& out = results[row];
      for (int kx = 0; kx <= k_max; ++kx) {
        for (int ky = kx; ky <= k_max; ++ky) {  // kx > ky filled by the swap symmetry
          for (int kz = 0; kz <= k_max; ++kz) {
            const WaveletIndex k{kx, ky, kz};
            if (oddity_zero(idx, k)) continue;

            double value;
            Axis axis = (ky & 1) ? Axis::Imaginary : Axis::Real;
            if (lambda_n == 0.0) {
              if (idx.p < k.sum()) continue;  // outside the predicted pattern
              AxisValue v = eval_entry_laplace(idx, k, table);
              value = to_double(v.value) * level_scale;
            } else {
              EntryResult r = eval_entry(idx, k, level_params, table);
              if (!r.converged) {
                std::lock_guard<std::mutex> g(failure_mutex);
                failed_idx = idx;
                failed_key = k;
                failed.store(true);
                return;
              }
              if (!options.keep_effective_zeros && r.effective_zero) continue;
              value = to_double(r.value.value) * level_scale;
            }

            auto& store = axis == Axis::Imaginary ? out.imag : out.real;
            store.push_back({static_cast<int16_t>(idx.p), static_cast<int16_t>(idx.q),
                             static_cast<int16_t>(kx), static_cast<int16_t>(ky),
                             static_cast<int16_t>(kz), value});
            if (kx != ky) {
              Axis sw_axis;
              double sw_value;
              swapped_value(idx.q, axis, value, sw_axis, sw_value);
              auto& sw_store = sw_axis == Axis::Imaginary ? out.imag : out.real;
              sw_store.push_back({static_cast<int16_t>(idx.p), static_cast<int16_t>(idx.q),
                                  static_cast<int16_t>(ky), static_cast<int16_t>(kx),
                                  static_cast<int16_t>(kz), sw_value});
            }
          }
        }
      }
      std::sort(out.real.begin(), out.real.end(), key_less);
      std::sort(out.imag.begin(), out.imag.end(), key_less);
    }
  };

  unsigned n_threads = options.threads > 0 ? options.threads : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = std::min<unsigned>(n_threads, rows.size() ? rows.size() : 1);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (failed.load())
    throw convergence_error("series did not converge within the term cap", level, failed_idx,
                            failed_key);

  for (const auto& row : results) {
    mat.real_.insert(mat.real_.end(), row.real.begin(), row.real.end());
    mat.imag_.insert(mat.imag_.end(), row.imag.begin(), row.imag.end());
  }
  return mat;
}

complex_t ConversionMatrix::entry(int p, int q, const WaveletIndex& k) const {
  if (std::abs(q) > p || p > p_max_) throw contract_error("entry index out of range");
  if (k.kx < 0 || k.ky < 0 || k.kz < 0 || k.kx > k_max_ || k.ky > k_max_ || k.kz > k_max_)
    throw contract_error("entry wavelet index out of range");
  const int aq = std::abs(q);
  const Entry probe{static_cast<int16_t>(p), static_cast<int16_t>(aq),
                    static_cast<int16_t>(k.kx), static_cast<int16_t>(k.ky),
                    static_cast<int16_t>(k.kz), 0.0};
  const auto& store = (k.ky & 1) ? imag_ : real_;
  auto it = std::lower_bound(store.begin(), store.end(), probe, key_less);
  if (it == store.end() || key_less(probe, *it)) return {0.0, 0.0};
  complex_t v = (k.ky & 1) ? complex_t(0.0, it->value) : complex_t(it->value, 0.0);
  return q < 0 ? std::conj(v) : v;
}

MultipoleVector ConversionMatrix::forward(const WaveletBlock& block,
                                          bool include_kernel_constant) const {
  if (block.level != level_) throw contract_error("block level does not match matrix level");
  if (block.k_max < k_max_) throw contract_error("block does not cover the matrix degrees");

  MultipoleVector out(p_max_);
  for (const Entry& e : real_) {
    const complex_t s = block.at(e.k());
    const complex_t c = e.value * s;
    out.at(e.p, e.q) += c;
    if (e.q > 0) out.at(e.p, -e.q) += c;  // conj(E) has the same real part
  }
  for (const Entry& e : imag_) {
    const complex_t s = block.at(e.k());
    const complex_t c = complex_t(0.0, e.value) * s;
    out.at(e.p, e.q) += c;
    if (e.q > 0) out.at(e.p, -e.q) -= c;  // conj(E) negates the imaginary part
  }
  if (include_kernel_constant && lambda_ > 0.0) {
    const double c = 8.0 * lambda_;
    for (auto& m : out.coeffs) m *= c;
  }
  return out;
}

std::vector<complex_t> ConversionMatrix::adjoint(const MultipoleVector& local) const {
  if (local.p_max > p_max_) throw contract_error("local expansion exceeds matrix degree");

  std::vector<complex_t> out(static_cast<std::size_t>(k_max_ + 1) * (k_max_ + 1) * (k_max_ + 1));
  auto index = [&](const Entry& e) {
    return (static_cast<std::size_t>(e.kx) * (k_max_ + 1) + e.ky) * (k_max_ + 1) + e.kz;
  };
  for (const Entry& e : real_) {
    if (e.p > local.p_max) continue;
    // conj(E) = E for real entries; the q<0 row contributes E * L_p^{-q}
    complex_t acc = e.value * local.at(e.p, e.q);
    if (e.q > 0) acc += e.value * local.at(e.p, -e.q);
    out[index(e)] += acc;
  }
  for (const Entry& e : imag_) {
    if (e.p > local.p_max) continue;
    // conj(E) = -i v; for the q<0 row conj(E(p,-q)) = E(p,q) = +i v
    complex_t acc = complex_t(0.0, -e.value) * local.at(e.p, e.q);
    if (e.q > 0) acc += complex_t(0.0, e.value) * local.at(e.p, -e.q);
    out[index(e)] += acc;
  }
  return out;
}

MatrixStats ConversionMatrix::stats() const {
  MatrixStats s;
  const long long slots = static_cast<long long>(p_max_ + 1) * (p_max_ + 2) / 2;
  const long long cube = static_cast<long long>(k_max_ + 1) * (k_max_ + 1) * (k_max_ + 1);
  s.total = slots * cube;
  s.real_nonzero = static_cast<long long>(real_.size());
  s.imag_nonzero = static_cast<long long>(imag_.size());

  long long adm_real = 0, adm_imag = 0;
  for (int p = 0; p <= p_max_; ++p)
    for (int q = 0; q <= p; ++q)
      for (int kx = 0; kx <= k_max_; ++kx)
        for (int ky = 0; ky <= k_max_; ++ky)
          for (int kz = 0; kz <= k_max_; ++kz) {
            if (oddity_zero({p, q}, {kx, ky, kz})) continue;
            ((ky & 1) ? adm_imag : adm_real) += 1;
          }
  s.additional_real_zero = adm_real - s.real_nonzero;
  s.additional_imag_zero = adm_imag - s.imag_nonzero;
  return s;
}

void ConversionMatrix::write(std::ostream& out) const {
  out << kMagic << '\n';
  out << "level=" << level_ << " lambda=";
  format_double(out, lambda_);
  out << " lambda0=";
  format_double(out, lambda0_);
  out << " pmax=" << p_max_ << " kmax=" << k_max_ << " eps_a=";
  format_double(out, eps_a_);
  out << " eps_r=";
  format_double(out, eps_r_);
  out << '\n';

  // single pass over both stores in key order
  std::size_t ir = 0, ii = 0;
  while (ir < real_.size() || ii < imag_.size()) {
    bool take_real;
    if (ir == real_.size()) take_real = false;
    else if (ii == imag_.size()) take_real = true;
    else take_real = key_less(real_[ir], imag_[ii]);
    const Entry& e = take_real ? real_[ir++] : imag_[ii++];
    out << e.p << ' ' << e.q << ' ' << e.kx << ' ' << e.ky << ' ' << e.kz << ' '
        << (take_real ? 'R' : 'I') << ' ';
    format_double(out, e.value);
    out << '\n';
  }
}

void ConversionMatrix::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  write(out);
  if (!out) throw io_error("write failed: " + path);
}

namespace {

template <typename T>
T parse_number(std::string_view text, long line) {
  T value{};
  auto r = std::from_chars(text.data(), text.data() + text.size(), value);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
    throw parse_error("malformed number '" + std::string(text) + "'", line);
  return value;
}

std::string_view expect_field(std::string_view token, std::string_view key, long line) {
  if (token.substr(0, key.size()) != key)
    throw parse_error("expected '" + std::string(key) + "...'", line);
  return token.substr(key.size());
}

}  // namespace

ConversionMatrix ConversionMatrix::read(std::istream& in) {
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != kMagic)
    throw parse_error("bad magic, expected 'MWXE 1'", line_no);

  ++line_no;
  if (!std::getline(in, line)) throw parse_error("missing header line", line_no);
  std::istringstream header(line);
  std::string tok;
  std::vector<std::string> tokens;
  while (header >> tok) tokens.push_back(tok);
  if (tokens.size() != 7) throw parse_error("header must have 7 fields", line_no);

  ConversionMatrix mat;
  mat.level_ = parse_number<int>(expect_field(tokens[0], "level=", line_no), line_no);
  mat.lambda_ = parse_number<double>(expect_field(tokens[1], "lambda=", line_no), line_no);
  mat.lambda0_ = parse_number<double>(expect_field(tokens[2], "lambda0=", line_no), line_no);
  mat.p_max_ = parse_number<int>(expect_field(tokens[3], "pmax=", line_no), line_no);
  mat.k_max_ = parse_number<int>(expect_field(tokens[4], "kmax=", line_no), line_no);
  mat.eps_a_ = parse_number<double>(expect_field(tokens[5], "eps_a=", line_no), line_no);
  mat.eps_r_ = parse_number<double>(expect_field(tokens[6], "eps_r=", line_no), line_no);

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int p, q, kx, ky, kz;
    std::string axis, value_text;
    if (!(ls >> p >> q >> kx >> ky >> kz >> axis >> value_text) || (axis != "R" && axis != "I"))
      throw parse_error("malformed entry line", line_no);
    std::string rest;
    if (ls >> rest) throw parse_error("trailing data on entry line", line_no);
    const double value = parse_number<double>(value_text, line_no);
    Entry e{static_cast<int16_t>(p), static_cast<int16_t>(q), static_cast<int16_t>(kx),
            static_cast<int16_t>(ky), static_cast<int16_t>(kz), value};
    auto& store = axis == "R" ? mat.real_ : mat.imag_;
    if (!store.empty() && !key_less(store.back(), e))
      throw parse_error("entries out of order", line_no);
    store.push_back(e);
  }
  return mat;
}

ConversionMatrix ConversionMatrix::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);
  return read(in);
}

}  // namespace mwxe
