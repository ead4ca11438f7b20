/* C interface to the fracext solver library. */
#ifndef FRACEXT_H
#define FRACEXT_H

#include <stddef.h>

#if defined(_WIN32)
#define FX_API __declspec(dllexport)
#else
#define FX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fx_status {
  FX_OK = 0,
  FX_ERR_CONFIG = 2,
  FX_ERR_SOLVER = 3,
  FX_ERR_IO = 4,
  FX_ERR_DOMAIN = 5,
  FX_ERR_ARGUMENT = 6,
  FX_ERR_INTERNAL = 7
} fx_status;

typedef struct fx_study fx_study;
typedef struct fx_table fx_table;

typedef struct fx_row {
  size_t level;
  size_t M;
  size_t cells;
  size_t dofs;
  double Y;
  double err_h1w;
  double err_hs;
  double assemble_ms;
  double solve_ms;
  size_t cg_iters;
} fx_row;

FX_API const char* fx_version(void);

/* Message of the last failed call on this thread ("" if none). */
FX_API const char* fx_last_error(void);

FX_API fx_status fx_study_from_json(const char* text, fx_study** out);
FX_API fx_status fx_study_from_file(const char* path, fx_study** out);
FX_API void fx_study_free(fx_study* study);
FX_API fx_status fx_study_set_threads(fx_study* study, int threads);
FX_API fx_status fx_study_set_timings(fx_study* study, int enabled);
/* Per-level progress lines on stderr during fx_study_run. */
FX_API fx_status fx_study_set_progress(fx_study* study, int enabled);
FX_API fx_status fx_study_level_count(const fx_study* study, size_t* out);
/* The config's "output" entry; "" when absent.  Owned by the study. */
FX_API fx_status fx_study_output(const fx_study* study, const char** out);

FX_API fx_status fx_study_run(const fx_study* study, fx_table** out);

/* Solves the finest level.  The bottom-face trace goes to trace_path (NULL for
 * stdout); matrix_path (optional) receives the system in Matrix Market format.
 * The mesh summary JSON is copied into summary when capacity allows; *needed
 * (optional) receives the size including the terminating zero. */
FX_API fx_status fx_study_solve(const fx_study* study, const char* trace_path, const char* matrix_path,
                                char* summary, size_t capacity, size_t* needed);

/* Extension trace against the matrix transference oracle, CSV to path (NULL for stdout). */
FX_API fx_status fx_study_oracle_compare(const fx_study* study, const char* path);

FX_API size_t fx_table_row_count(const fx_table* table);
FX_API fx_status fx_table_row(const fx_table* table, size_t index, fx_row* out);
FX_API fx_status fx_table_rates(const fx_table* table, double* rate_h1w, double* rate_hs);
FX_API fx_status fx_table_write_csv(const fx_table* table, const char* path);
FX_API void fx_table_free(fx_table* table);

/* K_nu table against the integral representation, CSV to path (NULL for stdout). */
FX_API fx_status fx_selftest(const char* path, double* max_rel_err);

FX_API fx_status fx_bessel_k(double nu, double z, double* out);
FX_API fx_status fx_gamma(double x, double* out);
FX_API fx_status fx_psi(double s, double lambda, double y, double* psi, double* dpsi);

#ifdef __cplusplus
}
#endif

#endif
