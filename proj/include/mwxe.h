#ifndef MWXE_H
#define MWXE_H

/*
 * C API for the multiwavelet <-> multipole conversion library.
 *
 * Conversion matrices E(p,q,k) project multiwavelet coefficients of a
 * dyadic box onto multipole expansions of the screened-Coulomb kernel
 * exp(-lambda r)/r, evaluated quadrature-free to machine precision.
 *
 * All heavy objects are opaque handles; every fallible call returns a
 * status code and writes results through out-parameters. Handles are
 * immutable after creation and safe to share across threads.
 *
 * Array layouts:
 *  - wavelet coefficients: complex interleaved (re,im), dense over
 *    0 <= kx,ky,kz <= k_max, index ((kx*(k_max+1))+ky)*(k_max+1)+kz;
 *    2*(k_max+1)^3 doubles total.
 *  - multipole/local coefficients: complex interleaved, triangular
 *    covering -p <= q <= p for 0 <= p <= p_max, index p*p + (q+p);
 *    2*(p_max+1)^2 doubles total.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mwxe_status {
  MWXE_OK = 0,
  MWXE_ERR_INVALID_ARGUMENT = 1,
  MWXE_ERR_NO_CONVERGENCE = 2,
  MWXE_ERR_IO = 3,
  MWXE_ERR_PARSE = 4,
  MWXE_ERR_DOMAIN = 5,
  MWXE_ERR_RANGE = 6,
  MWXE_ERR_QUADRATURE = 7, /* oracle did not converge; best estimate returned */
  MWXE_ERR_INTERNAL = 8
} mwxe_status;

/* Static message for a status code. */
const char* mwxe_status_message(mwxe_status status);

/* Detail message of the most recent failure on this thread (offending
 * indices included where applicable). Empty string if none. */
const char* mwxe_last_error(void);

/* ------------------------------------------------------------------ */
/* moment table                                                        */

typedef struct mwxe_table mwxe_table;

/* Exact monomial-against-Legendre moment table; k_max >= 1 and
 * l_max >= k_max. Sized l_max >= 2*m_max + p_max for series use. */
mwxe_status mwxe_table_create(int k_max, int l_max, mwxe_table** out);
void mwxe_table_destroy(mwxe_table* table);
mwxe_status mwxe_table_moment(const mwxe_table* table, int k, int l, double* value);
int mwxe_table_k_max(const mwxe_table* table);
int mwxe_table_l_max(const mwxe_table* table);

/* ------------------------------------------------------------------ */
/* series-level evaluation                                             */

typedef struct mwxe_series_params {
  double lambda_n; /* level-scaled decay rate (>= 0) */
  double lambda0;  /* scaling base (> 0) */
  double eps_a;    /* absolute tolerance */
  double eps_r;    /* relative tolerance */
  int m_max;       /* hard term cap */
} mwxe_series_params;

/* Defaults: eps_a = eps_r = 1e-16, m_max = 512, lambda0 = lambda_n
 * (or 1 when lambda_n = 0). */
void mwxe_series_params_init(mwxe_series_params* params, double lambda_n);

/* 1 when the parity conditions force E(p,q,k) = 0. */
int mwxe_oddity_zero(int p, int q, int kx, int ky, int kz);

/* Smallest series index with a non-vanishing term. */
int mwxe_min_term(int p, int kx, int ky, int kz);

/* One conversion-matrix element at level 0. terms_used may be NULL. */
mwxe_status mwxe_eval_entry(const mwxe_series_params* params, const mwxe_table* table, int p,
                            int q, int kx, int ky, int kz, double* re, double* im,
                            int* terms_used);

/* ------------------------------------------------------------------ */
/* conversion matrices                                                 */

typedef struct mwxe_matrix mwxe_matrix;

typedef struct mwxe_build_params {
  int level;      /* dyadic level n >= 0 */
  double lambda;  /* kernel decay rate >= 0 */
  double lambda0; /* scaling base > 0 */
  int p_max;
  int k_max;
  double eps_a;
  double eps_r;
  int m_max;
  int keep_effective_zeros; /* disable the eps_a drop (debugging) */
  int threads;              /* 0: hardware concurrency */
} mwxe_build_params;

/* Defaults for the given lambda: lambda0 = lambda (or 1 when lambda = 0),
 * eps_a = eps_r = 1e-16, m_max = 512, level 0, p_max = k_max = 10. */
void mwxe_build_params_init(mwxe_build_params* params, double lambda);

/* Builds the sparse conversion matrix for one level. The table must
 * satisfy k_max >= params->k_max and l_max >= 2*m_max + p_max. */
mwxe_status mwxe_matrix_build(const mwxe_build_params* params, const mwxe_table* table,
                              mwxe_matrix** out);
void mwxe_matrix_destroy(mwxe_matrix* matrix);

mwxe_status mwxe_matrix_write(const mwxe_matrix* matrix, const char* path);
mwxe_status mwxe_matrix_read(const char* path, mwxe_matrix** out);

/* Header fields of a matrix. Any pointer may be NULL. */
void mwxe_matrix_header(const mwxe_matrix* matrix, int* level, double* lambda, double* lambda0,
                        int* p_max, int* k_max, double* eps_a, double* eps_r);

typedef struct mwxe_stats {
  long long total;                /* all (p, 0<=q<=p, k) slots */
  long long real_nonzero;         /* stored entries, real store */
  long long imag_nonzero;         /* stored entries, imaginary store */
  long long additional_real_zero; /* admissible by parity but absent */
  long long additional_imag_zero;
} mwxe_stats;

mwxe_status mwxe_matrix_stats(const mwxe_matrix* matrix, mwxe_stats* stats);

/* Reconstructed element for any sign of q (conjugate symmetry applied);
 * zero for absent keys. */
mwxe_status mwxe_matrix_entry(const mwxe_matrix* matrix, int p, int q, int kx, int ky, int kz,
                              double* re, double* im);

/* multipole_out must hold 2*(p_max+1)^2 doubles; wavelet_coeffs is read
 * in the layout above with the matrix's k_max. */
mwxe_status mwxe_matrix_forward(const mwxe_matrix* matrix, const double* wavelet_coeffs,
                                int include_kernel_constant, double* multipole_out);

/* local_coeffs covers p <= local_p_max <= matrix p_max; wavelet_out must
 * hold 2*(k_max+1)^3 doubles. */
mwxe_status mwxe_matrix_adjoint(const mwxe_matrix* matrix, const double* local_coeffs,
                                int local_p_max, double* wavelet_out);

/* ------------------------------------------------------------------ */
/* quadrature oracle                                                   */

typedef struct mwxe_quadrature_spec {
  int base_rule_order;       /* Gauss-Legendre points per axis per cell */
  int max_subdivision_depth;
  double abs_tol;
  double rel_tol;
} mwxe_quadrature_spec;

/* Defaults: order 12, depth 10, abs_tol 1e-30, rel_tol 1e-12. */
void mwxe_quadrature_spec_init(mwxe_quadrature_spec* spec);

/* Adaptive-quadrature reference value of one level-0 element. Returns
 * MWXE_ERR_QUADRATURE (with the best estimate still written) when the
 * integrator cannot resolve the value; expected at large lambda_n/k. */
mwxe_status mwxe_quad_entry(int p, int q, int kx, int ky, int kz, double lambda_n, double lambda0,
                            const mwxe_quadrature_spec* spec, double* re, double* im,
                            double* error_estimate);

/* Potential of a multiwavelet block by direct adaptive integration of
 * the kernel; point must lie strictly outside the block's box. */
mwxe_status mwxe_direct_potential(int level, const int translation[3], int k_max,
                                  const double* wavelet_coeffs, const double point[3],
                                  double lambda, const mwxe_quadrature_spec* spec, double* re,
                                  double* im, double* error_estimate);

/* Truncated multipole expansion evaluated at a point; lambda > 0. */
mwxe_status mwxe_multipole_potential(const double* multipole_coeffs, int p_max,
                                     const double center[3], const double point[3], double lambda,
                                     double lambda0, double* re, double* im);

#ifdef __cplusplus
}
#endif

#endif /* MWXE_H */
