#include "mwxe.h"

#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include "conversion_matrix.hpp"
#include "moment_table.hpp"
#include "oracle.hpp"
#include "series.hpp"

using namespace mwxe;

extern "C" {

struct mwxe_table {
  MomentTable impl;
};

struct mwxe_matrix {
  ConversionMatrix impl;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

mwxe_status translate_exception() {
  try {
    throw;
  } catch (const convergence_error& e) {
    std::ostringstream os;
    os << e.what() << " at level=" << e.level << " p=" << e.idx.p << " q=" << e.idx.q << " k=("
       << e.k.kx << "," << e.k.ky << "," << e.k.kz << ")";
    set_error(os.str());
    return MWXE_ERR_NO_CONVERGENCE;
  } catch (const parse_error& e) {
    std::ostringstream os;
    os << e.what() << " (line " << e.line_number << ")";
    set_error(os.str());
    return MWXE_ERR_PARSE;
  } catch (const io_error& e) {
    set_error(e.what());
    return MWXE_ERR_IO;
  } catch (const range_error& e) {
    set_error(e.what());
    return MWXE_ERR_RANGE;
  } catch (const domain_error& e) {
    set_error(e.what());
    return MWXE_ERR_DOMAIN;
  } catch (const contract_error& e) {
    set_error(e.what());
    return MWXE_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return MWXE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return MWXE_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return MWXE_ERR_INTERNAL;
  }
}

SeriesParams to_series_params(const mwxe_series_params& p) {
  SeriesParams out;
  out.lambda_n = p.lambda_n;
  out.lambda0 = p.lambda0;
  out.eps_a = p.eps_a;
  out.eps_r = p.eps_r;
  out.m_max = p.m_max;
  return out;
}

void check_series_params(const mwxe_series_params& p) {
  if (p.lambda_n < 0.0 || p.lambda0 <= 0.0) throw contract_error("invalid lambda/lambda0");
  if (!(p.eps_a > 0.0 && p.eps_a < 1.0) || !(p.eps_r > 0.0 && p.eps_r < 1.0))
    throw contract_error("tolerances must lie in (0,1)");
  if (p.m_max < 1) throw contract_error("m_max must be >= 1");
}

void write_complex(double* re, double* im, const complex_t& v) {
  if (re) *re = v.real();
  if (im) *im = v.imag();
}

QuadratureSpec to_quadrature_spec(const mwxe_quadrature_spec& s) {
  if (s.base_rule_order < 8) throw contract_error("base_rule_order must be >= 8");
  if (s.abs_tol <= 0.0 || s.rel_tol <= 0.0) throw contract_error("tolerances must be positive");
  QuadratureSpec out;
  out.base_rule_order = s.base_rule_order;
  out.max_subdivision_depth = s.max_subdivision_depth;
  out.abs_tol = s.abs_tol;
  out.rel_tol = s.rel_tol;
  return out;
}

}  // namespace

extern "C" {

const char* mwxe_status_message(mwxe_status status) {
  switch (status) {
    case MWXE_OK: return "ok";
    case MWXE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MWXE_ERR_NO_CONVERGENCE: return "series did not converge";
    case MWXE_ERR_IO: return "i/o error";
    case MWXE_ERR_PARSE: return "parse error";
    case MWXE_ERR_DOMAIN: return "domain error";
    case MWXE_ERR_RANGE: return "range overflow";
    case MWXE_ERR_QUADRATURE: return "quadrature did not converge";
    case MWXE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mwxe_last_error(void) { return g_last_error.c_str(); }

/* ------------------- moment table ------------------- */

mwxe_status mwxe_table_create(int k_max, int l_max, mwxe_table** out) {
  if (!out) return MWXE_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  try {
    *out = new mwxe_table{MomentTable(k_max, l_max)};
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

void mwxe_table_destroy(mwxe_table* table) { delete table; }

mwxe_status mwxe_table_moment(const mwxe_table* table, int k, int l, double* value) {
  if (!table || !value) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    *value = to_double(table->impl.moment(k, l));
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

int mwxe_table_k_max(const mwxe_table* table) { return table ? table->impl.k_max() : -1; }
int mwxe_table_l_max(const mwxe_table* table) { return table ? table->impl.l_max() : -1; }

/* ------------------- series ------------------- */

void mwxe_series_params_init(mwxe_series_params* params, double lambda_n) {
  if (!params) return;
  params->lambda_n = lambda_n;
  params->lambda0 = lambda_n > 0.0 ? lambda_n : 1.0;
  params->eps_a = 1e-16;
  params->eps_r = 1e-16;
  params->m_max = 512;
}

int mwxe_oddity_zero(int p, int q, int kx, int ky, int kz) {
  return oddity_zero({p, q}, {kx, ky, kz}) ? 1 : 0;
}

int mwxe_min_term(int p, int kx, int ky, int kz) { return min_term(p, {kx, ky, kz}); }

mwxe_status mwxe_eval_entry(const mwxe_series_params* params, const mwxe_table* table, int p,
                            int q, int kx, int ky, int kz, double* re, double* im,
                            int* terms_used) {
  if (!params || !table) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    check_series_params(*params);
    if (std::abs(q) > p) throw contract_error("requires |q| <= p");
    if (kx < 0 || ky < 0 || kz < 0) throw contract_error("wavelet degrees must be >= 0");
    EntryResult r = eval_entry({p, q}, {kx, ky, kz}, to_series_params(*params), table->impl);
    if (terms_used) *terms_used = r.terms_used;
    write_complex(re, im, r.value.to_complex());
    if (!r.converged) {
      std::ostringstream os;
      os << "series hit the term cap at p=" << p << " q=" << q << " k=(" << kx << "," << ky << ","
         << kz << ")";
      set_error(os.str());
      return MWXE_ERR_NO_CONVERGENCE;
    }
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

/* ------------------- matrices ------------------- */

void mwxe_build_params_init(mwxe_build_params* params, double lambda) {
  if (!params) return;
  params->level = 0;
  params->lambda = lambda;
  params->lambda0 = lambda > 0.0 ? lambda : 1.0;
  params->p_max = 10;
  params->k_max = 10;
  params->eps_a = 1e-16;
  params->eps_r = 1e-16;
  params->m_max = 512;
  params->keep_effective_zeros = 0;
  params->threads = 0;
}

mwxe_status mwxe_matrix_build(const mwxe_build_params* params, const mwxe_table* table,
                              mwxe_matrix** out) {
  if (!params || !table || !out) return MWXE_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  try {
    SeriesParams sp;
    sp.lambda0 = params->lambda0;
    sp.eps_a = params->eps_a;
    sp.eps_r = params->eps_r;
    sp.m_max = params->m_max;
    if (!(sp.eps_a > 0.0 && sp.eps_a < 1.0) || !(sp.eps_r > 0.0 && sp.eps_r < 1.0))
      throw contract_error("tolerances must lie in (0,1)");
    ConversionMatrix::BuildOptions options;
    options.keep_effective_zeros = params->keep_effective_zeros != 0;
    options.threads = params->threads;
    *out = new mwxe_matrix{ConversionMatrix::build(params->level, params->lambda, params->lambda0,
                                                   params->p_max, params->k_max, sp, table->impl,
                                                   options)};
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

void mwxe_matrix_destroy(mwxe_matrix* matrix) { delete matrix; }

mwxe_status mwxe_matrix_write(const mwxe_matrix* matrix, const char* path) {
  if (!matrix || !path) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    matrix->impl.write_file(path);
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

mwxe_status mwxe_matrix_read(const char* path, mwxe_matrix** out) {
  if (!path || !out) return MWXE_ERR_INVALID_ARGUMENT;
  *out = nullptr;
  try {
    *out = new mwxe_matrix{ConversionMatrix::read_file(path)};
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

void mwxe_matrix_header(const mwxe_matrix* matrix, int* level, double* lambda, double* lambda0,
                        int* p_max, int* k_max, double* eps_a, double* eps_r) {
  if (!matrix) return;
  const ConversionMatrix& m = matrix->impl;
  if (level) *level = m.level();
  if (lambda) *lambda = m.lambda();
  if (lambda0) *lambda0 = m.lambda0();
  if (p_max) *p_max = m.p_max();
  if (k_max) *k_max = m.k_max();
  if (eps_a) *eps_a = m.eps_a();
  if (eps_r) *eps_r = m.eps_r();
}

mwxe_status mwxe_matrix_stats(const mwxe_matrix* matrix, mwxe_stats* stats) {
  if (!matrix || !stats) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    MatrixStats s = matrix->impl.stats();
    stats->total = s.total;
    stats->real_nonzero = s.real_nonzero;
    stats->imag_nonzero = s.imag_nonzero;
    stats->additional_real_zero = s.additional_real_zero;
    stats->additional_imag_zero = s.additional_imag_zero;
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

mwxe_status mwxe_matrix_entry(const mwxe_matrix* matrix, int p, int q, int kx, int ky, int kz,
                              double* re, double* im) {
  if (!matrix) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    write_complex(re, im, matrix->impl.entry(p, q, {kx, ky, kz}));
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

mwxe_status mwxe_matrix_forward(const mwxe_matrix* matrix, const double* wavelet_coeffs,
                                int include_kernel_constant, double* multipole_out) {
  if (!matrix || !wavelet_coeffs || !multipole_out) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    const ConversionMatrix& m = matrix->impl;
    WaveletBlock block(m.level(), {0, 0, 0}, m.k_max());
    const std::size_t n = block.coeffs.size();
    for (std::size_t i = 0; i < n; ++i)
      block.coeffs[i] = complex_t(wavelet_coeffs[2 * i], wavelet_coeffs[2 * i + 1]);
    MultipoleVector mv = m.forward(block, include_kernel_constant != 0);
    for (std::size_t i = 0; i < mv.coeffs.size(); ++i) {
      multipole_out[2 * i] = mv.coeffs[i].real();
      multipole_out[2 * i + 1] = mv.coeffs[i].imag();
    }
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

mwxe_status mwxe_matrix_adjoint(const mwxe_matrix* matrix, const double* local_coeffs,
                                int local_p_max, double* wavelet_out) {
  if (!matrix || !local_coeffs || !wavelet_out) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    if (local_p_max < 0) throw contract_error("local_p_max must be >= 0");
    MultipoleVector local(local_p_max);
    for (std::size_t i = 0; i < local.coeffs.size(); ++i)
      local.coeffs[i] = complex_t(local_coeffs[2 * i], local_coeffs[2 * i + 1]);
    std::vector<complex_t> w = matrix->impl.adjoint(local);
    for (std::size_t i = 0; i < w.size(); ++i) {
      wavelet_out[2 * i] = w[i].real();
      wavelet_out[2 * i + 1] = w[i].imag();
    }
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

/* ------------------- oracle ------------------- */

void mwxe_quadrature_spec_init(mwxe_quadrature_spec* spec) {
  if (!spec) return;
  spec->base_rule_order = 12;
  spec->max_subdivision_depth = 10;
  spec->abs_tol = 1e-30;
  spec->rel_tol = 1e-12;
}

mwxe_status mwxe_quad_entry(int p, int q, int kx, int ky, int kz, double lambda_n, double lambda0,
                            const mwxe_quadrature_spec* spec, double* re, double* im,
                            double* error_estimate) {
  if (!spec) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    QuadResult r = quad_entry({p, q}, {kx, ky, kz}, lambda_n, lambda0, to_quadrature_spec(*spec));
    write_complex(re, im, r.value);
    if (error_estimate) *error_estimate = r.error_estimate;
    if (!r.converged) {
      set_error("adaptive quadrature did not converge");
      return MWXE_ERR_QUADRATURE;
    }
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

mwxe_status mwxe_direct_potential(int level, const int translation[3], int k_max,
                                  const double* wavelet_coeffs, const double point[3],
                                  double lambda, const mwxe_quadrature_spec* spec, double* re,
                                  double* im, double* error_estimate) {
  if (!translation || !wavelet_coeffs || !point || !spec) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    if (level < 0 || k_max < 0) throw contract_error("invalid block geometry");
    for (int i = 0; i < 3; ++i)
      if (translation[i] < 0 || translation[i] >= (1 << level))
        throw contract_error("translation outside the level's dyadic grid");
    WaveletBlock block(level, {translation[0], translation[1], translation[2]}, k_max);
    for (std::size_t i = 0; i < block.coeffs.size(); ++i)
      block.coeffs[i] = complex_t(wavelet_coeffs[2 * i], wavelet_coeffs[2 * i + 1]);
    QuadResult r = direct_potential(block, {point[0], point[1], point[2]}, lambda,
                                    to_quadrature_spec(*spec));
    write_complex(re, im, r.value);
    if (error_estimate) *error_estimate = r.error_estimate;
    if (!r.converged) {
      set_error("adaptive quadrature did not converge");
      return MWXE_ERR_QUADRATURE;
    }
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

mwxe_status mwxe_multipole_potential(const double* multipole_coeffs, int p_max,
                                     const double center[3], const double point[3], double lambda,
                                     double lambda0, double* re, double* im) {
  if (!multipole_coeffs || !center || !point) return MWXE_ERR_INVALID_ARGUMENT;
  try {
    if (p_max < 0) throw contract_error("p_max must be >= 0");
    MultipoleVector mv(p_max);
    for (std::size_t i = 0; i < mv.coeffs.size(); ++i)
      mv.coeffs[i] = complex_t(multipole_coeffs[2 * i], multipole_coeffs[2 * i + 1]);
    complex_t v = multipole_potential(mv, {center[0], center[1], center[2]},
                                      {point[0], point[1], point[2]}, {lambda, lambda0});
    write_complex(re, im, v);
    return MWXE_OK;
  } catch (...) {
    return translate_exception();
  }
}

}  // extern "C"
