#ifndef FOURIER_INTERP_H
#define FOURIER_INTERP_H

#include <stddef.h>

#if defined(_WIN32)
#define FI_API __declspec(dllexport)
#else
#define FI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every call returns a status; FI_OK is zero. On failure fi_last_error() holds
   the message for the calling thread until its next failing call. */
enum fi_status {
  FI_OK = 0,
  FI_ERR_INVALID_ARGUMENT = 1,
  FI_ERR_NON_CONVERGENCE = 2,
  FI_ERR_BRANCH_TRACKING = 3,
  FI_ERR_ITERATION_LIMIT = 4,
  FI_ERR_POLE_PROXIMITY = 5,
  FI_ERR_ACCURACY_NOT_REACHED = 6,
  FI_ERR_ALIASING_SUSPECTED = 7,
  FI_ERR_GRID_MISMATCH = 8,
  FI_ERR_GRID_TOO_SHORT = 9,
  FI_ERR_TAIL_NOT_NEGLIGIBLE = 10,
  FI_ERR_OSCILLATION_BUDGET = 11,
  FI_ERR_TABLE_RANGE = 12,
  FI_ERR_GRID_COVERAGE = 13,
  FI_ERR_NOT_CONTRACTING = 14,
  FI_ERR_STAGNATION = 15,
  FI_ERR_QUADRATURE_DEGREE = 16,
  FI_ERR_TRUNCATION_BUDGET = 17,
  FI_ERR_PARITY_VIOLATION = 18,
  FI_ERR_TOTAL_INTEGRAL_NONZERO = 19,
  FI_ERR_BUDGET_EXCEEDED = 20,
  FI_ERR_IO = 21,
  FI_ERR_PARSE = 22,
  FI_ERR_INTERNAL = 99
};

FI_API const char* fi_status_name(int status);
FI_API const char* fi_last_error(void);
/* nonzero for statuses caused by bad input rather than by the numerics */
FI_API int fi_status_is_config(int status);

/* k is passed as the integer 2k throughout */
FI_API int fi_parse_half_integer(const char* text, int* two_k);
/* first index of the expansion for the b table with label sign */
FI_API int fi_start_index(int two_k, int sign, int* nu);

/* ---- coefficient tables b, a, atilde */
typedef struct fi_table fi_table;

enum fi_table_kind { FI_TABLE_B = 0, FI_TABLE_A = 1, FI_TABLE_ATILDE = 2 };

typedef struct {
  int two_k, sign, kind, n_max;
  size_t radii;
  double max_imag, max_quad_err, alias_ratio;
  int oversample;
  long kernel_evaluations;
} fi_table_info;

/* oversample <= 0 keeps the default */
FI_API int fi_table_compute(int two_k, int sign, const double* r, size_t nr, int n_max, int oversample,
                            fi_table** out);
FI_API int fi_table_pair(const fi_table* plus, const fi_table* minus, fi_table** a, fi_table** atilde);
FI_API int fi_table_read(const char* path, fi_table** out);
/* also writes the metadata sidecar path.meta */
FI_API int fi_table_write(const fi_table* t, const char* path);
FI_API int fi_table_info_get(const fi_table* t, fi_table_info* info);
FI_API int fi_table_radii(const fi_table* t, double* out);
FI_API int fi_table_row(const fi_table* t, int n, double* out);
FI_API void fi_table_free(fi_table* t);

/* ---- weighted sup bounds */
typedef struct fi_bounds fi_bounds;
typedef struct {
  double g_tilde, fitted_constant, min_rate;
  int calibration_n, all_dominated, rows;
} fi_bounds_info;
typedef struct {
  int n, dominated;
  double sup_measured, shape, rate;
} fi_bounds_row;

FI_API int fi_bounds_compute(double beta, const fi_table* plus, const fi_table* minus, fi_bounds** out);
FI_API int fi_bounds_info_get(const fi_bounds* b, fi_bounds_info* info);
FI_API int fi_bounds_row_get(const fi_bounds* b, int i, fi_bounds_row* row);
FI_API void fi_bounds_free(fi_bounds* b);

/* ---- radial interpolation and perturbed reconstruction */
typedef struct fi_interp_tables fi_interp_tables;
typedef struct fi_profile fi_profile;
typedef struct fi_node_data fi_node_data;
typedef struct fi_recon fi_recon;

/* a and atilde for k = d/2 on a panel grid reaching sqrt(n_max) + 6 */
FI_API int fi_interp_tables_build(int d, int n_max, fi_interp_tables** out);
FI_API int fi_interp_tables_shape(const fi_interp_tables* t, int* d, int* n_max, double* r_max);
FI_API void fi_interp_tables_free(fi_interp_tables* t);

FI_API int fi_profile_read(const char* path, fi_profile** out);
FI_API int fi_profile_write(const fi_profile* p, const char* path);
FI_API int fi_profile_zero(int d, fi_profile** out);
/* deterministic profile scaled to a fraction of the bisected contraction threshold */
FI_API int fi_profile_threshold_fraction(const fi_interp_tables* t, double s, double eta, double fraction,
                                         unsigned seed, fi_profile** out, double* delta_star);
FI_API int fi_profile_budget(const fi_profile* p, const fi_interp_tables* t, double* budget);
FI_API void fi_profile_free(fi_profile* p);

FI_API int fi_node_data_read(const char* path, fi_node_data** out);
FI_API int fi_node_data_write(const fi_node_data* data, const char* path);
/* samples of exp(-pi t |x|^2) and its transform at the nodes moved by the profile */
FI_API int fi_node_data_gaussian(int d, int n_max, const fi_profile* p, double t, fi_node_data** out);
FI_API void fi_node_data_free(fi_node_data* data);

typedef struct {
  double budget;
  int converged, iterations;
  size_t samples;
} fi_recon_info;

FI_API int fi_reconstruct(const fi_node_data* data, const fi_profile* p, const fi_interp_tables* t, int j_max,
                          double tol, fi_recon** out);
FI_API int fi_recon_info_get(const fi_recon* r, fi_recon_info* info);
FI_API int fi_recon_log(const fi_recon* r, int i, int* j, double* diff, double* ratio);
/* grid samples of the reconstruction; r, re, im hold info.samples entries */
FI_API int fi_recon_samples(const fi_recon* r, double* radius, double* re, double* im);
FI_API int fi_recon_eval(const fi_recon* r, double radius, double* re, double* im);
FI_API void fi_recon_free(fi_recon* r);

/* ---- hyperbola pipeline */
typedef struct fi_odd_profile fi_odd_profile;
typedef struct fi_hup fi_hup;

FI_API int fi_odd_profile_read(const char* path, fi_odd_profile** out);
FI_API int fi_odd_profile_write(const fi_odd_profile* f, const char* path);
/* t exp(-pi t^2)(A + B t^2) with A fixed by a zero total integral */
FI_API int fi_odd_profile_synthetic(double B, fi_odd_profile** out);
FI_API int fi_odd_profile_zero(fi_odd_profile** out);
FI_API void fi_odd_profile_free(fi_odd_profile* f);

enum fi_verdict { FI_VERDICT_ZERO = 0, FI_VERDICT_RECONSTRUCTED = 1, FI_VERDICT_INCONSISTENT = 2 };

typedef struct {
  int verdict, n_max, iterations_re, iterations_im;
  double budget, data_norm, phi_direct_norm, phi_rec_norm, discrepancy;
  double parity, total_integral, route_agreement, r_check, tol;
} fi_hup_info;

/* cross_data_path NULL: data synthesized from f on the deterministic profile of size delta */
FI_API int fi_hup_run(const fi_odd_profile* f, const char* cross_data_path, double delta, const fi_interp_tables* t,
                      double tol, fi_hup** out);
FI_API int fi_hup_info_get(const fi_hup* h, fi_hup_info* info);
FI_API const char* fi_verdict_name(int verdict);
FI_API int fi_hup_phi(const fi_hup* h, double r, double* direct_re, double* direct_im, double* rec_re, double* rec_im);
FI_API int fi_hup_log(const fi_hup* h, int imag_part, int i, int* j, double* diff, double* ratio);
FI_API int fi_hup_write_cross_data(const fi_hup* h, const char* path);
FI_API void fi_hup_free(fi_hup* h);

/* ---- verification suites */
typedef struct fi_verify_report fi_verify_report;
typedef struct {
  const char* suite;
  const char* name;
  const char* detail;
  double residual, tol, seconds;
  int pass, errored, lower;
} fi_check;

FI_API int fi_verify_suite_count(void);
FI_API int fi_verify_suite(int i, const char** name, int* criterion, const char** summary);
/* filter: comma separated names or NULL; level 0 quick, 1 full; table_dir may be NULL */
FI_API int fi_verify_validate(const char* filter, double tol_scale, const char* table_dir);
FI_API int fi_verify_run(const char* filter, double tol_scale, int level, const char* table_dir,
                         fi_verify_report** out);
FI_API size_t fi_verify_count(const fi_verify_report* r);
/* strings stay valid until the report is freed */
FI_API int fi_verify_check(const fi_verify_report* r, size_t i, fi_check* out);
FI_API void fi_verify_free(fi_verify_report* r);

#ifdef __cplusplus
}
#endif

#endif
