#ifndef MGFEM_H
#define MGFEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MgfemStatus {
  MGFEM_STATUS_OK = 0,
  // I/O and other failures.
  MGFEM_STATUS_FAILED = 1,
  MGFEM_STATUS_CONFIG = 2,
  MGFEM_STATUS_SOLVER = 3,
  MGFEM_STATUS_NULL_POINTER = 4,
  MGFEM_STATUS_INVALID_UTF8 = 5,
  MGFEM_STATUS_OUT_OF_RANGE = 6,
  MGFEM_STATUS_PANIC = 7,
} MgfemStatus;

// A validated run configuration.
typedef struct MgfemConfig MgfemConfig;

// The outcome of a completed run.
typedef struct MgfemResult MgfemResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *mgfem_version(void);

// Message of the last failed call on this thread, or null. Valid until
// the next call into the library on this thread.
const char *mgfem_last_error_message(void);

// Parses and validates configuration text into `*out`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a writable pointer.
enum MgfemStatus mgfem_config_parse(const char *text, struct MgfemConfig **out);

// Overrides the output directory.
//
// # Safety
// `cfg` must come from [`mgfem_config_parse`]; `dir` must be a
// NUL-terminated string.
enum MgfemStatus mgfem_config_set_out_dir(struct MgfemConfig *cfg, const char *dir);

// Overrides the VTK snapshot stride; 0 writes no snapshots.
//
// # Safety
// `cfg` must come from [`mgfem_config_parse`].
enum MgfemStatus mgfem_config_set_snapshot_stride(struct MgfemConfig *cfg, uintptr_t stride);

// # Safety
// `cfg` must come from [`mgfem_config_parse`] and not be used again.
// Null is ignored.
void mgfem_config_free(struct MgfemConfig *cfg);

// Runs the configured problem and writes its outputs.
//
// # Safety
// `cfg` must come from [`mgfem_config_parse`]; `out` must be writable.
enum MgfemStatus mgfem_run(const struct MgfemConfig *cfg, struct MgfemResult **out);

// Number of completed time steps, 0 for a null handle.
//
// # Safety
// `res` must be null or come from [`mgfem_run`].
uintptr_t mgfem_result_steps(const struct MgfemResult *res);

// Number of files written, 0 for a null handle.
//
// # Safety
// `res` must be null or come from [`mgfem_run`].
uintptr_t mgfem_result_file_count(const struct MgfemResult *res);

// Path of the `index`-th written file; owned by the result handle.
//
// # Safety
// `res` must come from [`mgfem_run`]; `out` must be writable.
enum MgfemStatus mgfem_result_file_path(const struct MgfemResult *res,
                                        uintptr_t index,
                                        const char **out);

// # Safety
// `res` must come from [`mgfem_run`] and not be used again. Null is
// ignored.
void mgfem_result_free(struct MgfemResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MGFEM_H */
