#ifndef ZYGMUND_H
#define ZYGMUND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ZYG_API __declspec(dllexport)
#else
#define ZYG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zyg_status {
  ZYG_OK = 0,
  ZYG_ERR_ARGUMENT = 2, /* bad parameters or configuration */
  ZYG_ERR_NUMERIC = 3,  /* a numeric validation failed */
  ZYG_ERR_IO = 4,       /* unreadable input or unwritable output */
  ZYG_ERR_INTERNAL = 5
} zyg_status;

typedef struct zyg_field zyg_field;

typedef struct zyg_run_options {
  const char* out_dir;     /* NULL: config output_dir */
  uint64_t seed;
  int has_seed;            /* nonzero: seed overrides sampling.seed */
  int threads;             /* <= 0: config value, then hardware concurrency */
  const char* points_path; /* eval only */
} zyg_run_options;

ZYG_API const char* zyg_version(void);

/* Message of the last failed call on this thread; "" if none. */
ZYG_API const char* zyg_last_error(void);

/* Field from a config "field" block (JSON text). */
ZYG_API zyg_status zyg_field_from_json(const char* json, zyg_field** out);
ZYG_API void zyg_field_free(zyg_field* field);
ZYG_API size_t zyg_field_dimension(const zyg_field* field);

/* grad holds d+1 values, hess (d+1)^2 row-major. Any output may be NULL. */
ZYG_API zyg_status zyg_field_jet(const zyg_field* field, const double* x, double y,
                                 double* value, double* grad, double* hess);

/* Boundary function f(x); ZYG_ERR_ARGUMENT when the field has none. */
ZYG_API zyg_status zyg_field_eval_boundary(const zyg_field* field, const double* x, double* out);

ZYG_API zyg_status zyg_hungerford_bound(double alpha, double beta, int d, double* bound,
                                        int* valid);

/* Runs a CLI command. On success *summary_json (may be NULL) receives a
   heap string to release with zyg_string_free. */
ZYG_API zyg_status zyg_run_command(const char* command, const char* config_json,
                                   const zyg_run_options* options, char** summary_json);

ZYG_API void zyg_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
