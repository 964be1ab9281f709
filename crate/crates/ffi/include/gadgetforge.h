#ifndef GADGETFORGE_H
#define GADGETFORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GfStatus {
  GF_STATUS_OK = 0,
  GF_STATUS_NULL_POINTER = 1,
  GF_STATUS_INVALID_ARGUMENT = 2,
  GF_STATUS_INVALID_DIMENSION = 3,
  GF_STATUS_NOT_HERMITIAN = 4,
  GF_STATUS_NUMERICAL = 5,
  GF_STATUS_UNSUPPORTED = 6,
  GF_STATUS_PARSE = 7,
  // A gadget ran but at least one of its checks failed.
  GF_STATUS_CHECK_FAILED = 8,
  GF_STATUS_PANIC = 9,
} GfStatus;

typedef enum GfClass {
  GF_CLASS_LA_UNIVERSAL = 0,
  GF_CLASS_LA_STOQUASTIC_UNIVERSAL = 1,
  GF_CLASS_ONE_LOCAL_ONLY = 2,
} GfClass;

// Dense complex matrix.
typedef struct GfMatrix GfMatrix;

// Result of classifying an interaction.
typedef struct GfVerdict GfVerdict;

// Optional gadget parameters. NaN (or 0 for `d`) selects the gadget's default.
typedef struct GfGadgetParams {
  size_t d;
  double theta;
  double alpha;
  double beta;
  double mu;
  uint64_t seed;
  double tol;
} GfGadgetParams;

// Simulation measurements. `eta` and `eps` are NaN when the ranks differ.
typedef struct GfSimulation {
  size_t low_space_dim;
  size_t encoded_dim;
  bool rank_match;
  double eta;
  double eps;
  double identity_offset;
} GfSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or NULL. Owned by the library.
const char *gf_last_error(void);

// Library version as a static NUL-terminated string.
const char *gf_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void gf_string_free(char *s);

// Creates a `rows`×`cols` matrix from row-major real and imaginary parts.
// `im` may be NULL for a real matrix.
//
// # Safety
// `re` (and `im` if non-null) must point to `rows*cols` doubles.
enum GfStatus gf_matrix_new(size_t rows,
                            size_t cols,
                            const double *re,
                            const double *im,
                            struct GfMatrix **out);

// # Safety
// `m` must be NULL or a handle from this library not already freed.
void gf_matrix_free(struct GfMatrix *m);

// # Safety
// `m` must be a live handle; `rows` and `cols` must be writable.
enum GfStatus gf_matrix_dims(const struct GfMatrix *m, size_t *rows, size_t *cols);

// Copies the entries in row-major order. Either output may be NULL.
//
// # Safety
// Non-null outputs must have room for `rows*cols` doubles.
enum GfStatus gf_matrix_copy(const struct GfMatrix *m, double *re, double *im);

// Classifies a two-qudit interaction on C^d ⊗ C^d.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum GfStatus gf_classify_two_qudit(const struct GfMatrix *h,
                                    size_t d,
                                    double tol,
                                    struct GfVerdict **out);

// Classifies an interaction set given in the CLI's JSON format.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum GfStatus gf_classify_set_json(const char *json, double tol, struct GfVerdict **out);

// # Safety
// `v` must be a live verdict handle.
enum GfClass gf_verdict_class(const struct GfVerdict *v);

// Full verdict as JSON, written to `*out`.
//
// # Safety
// `v` must be a live verdict handle and `out` writable.
enum GfStatus gf_verdict_json(const struct GfVerdict *v, char **out);

// # Safety
// `v` must be NULL or a handle from this library not already freed.
void gf_verdict_free(struct GfVerdict *v);

// Builds a named gadget and writes its report as JSON to `*out`.
// Returns `CHECK_FAILED` (with the report still written) if any check failed.
//
// # Safety
// `name` must be a NUL-terminated string; `params` may be NULL for defaults.
enum GfStatus gf_gadget_run(const char *name, const struct GfGadgetParams *params, char **out);

// Measures how well `h_sim` simulates `h_target` through the isometry `v`
// with low-energy cutoff `delta`.
//
// # Safety
// Matrix arguments must be live handles and `out` writable.
enum GfStatus gf_certify_simulation(const struct GfMatrix *h_sim,
                                    const struct GfMatrix *h_target,
                                    const struct GfMatrix *v,
                                    double delta,
                                    bool modulo_identity,
                                    struct GfSimulation *out);

// Quantum Max-d-Cut on a graph given as `{"n": .., "edges": [[i, j, w], ..]}`;
// writes the result as JSON to `*out`.
//
// # Safety
// `graph_json` must be a NUL-terminated string and `out` writable.
enum GfStatus gf_max_d_cut(const char *graph_json, size_t d, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GADGETFORGE_H */
