#ifndef LINZIP_H
#define LINZIP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LzMode {
  LZ_MODE_EXACT = 0,
  LZ_MODE_HEURISTIC = 1,
} LzMode;

// Result code of every fallible call.
typedef enum LzStatus {
  LZ_STATUS_OK = 0,
  LZ_STATUS_NULL_POINTER = 1,
  LZ_STATUS_INVALID_UTF8 = 2,
  LZ_STATUS_PARSE = 3,
  LZ_STATUS_CONFIG = 4,
  LZ_STATUS_RENDER = 5,
  LZ_STATUS_PANIC = 6,
} LzStatus;

typedef enum LzStyle {
  // One set per row.
  LZ_STYLE_LINEAR = 0,
  // Non-intersecting sets share rows.
  LZ_STYLE_DISJOINT = 1,
  // Row mates must not overlap in their active ranges.
  LZ_STYLE_NON_ALTERNATING = 2,
  // At most two row mates cover any column.
  LZ_STYLE_PAIR_ALTERNATING = 3,
} LzStyle;

// Pipeline settings, starting from the library defaults.
typedef struct LzConfig LzConfig;

// Output of one pipeline run.
typedef struct LzResult LzResult;

// A validated set system.
typedef struct LzSetSystem LzSetSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or an empty string.
const char *lz_last_error(void);

// Library version as a static string.
const char *lz_version(void);

// Parses a JSON instance (`{"elements": [...], "sets": {...}}`).
enum LzStatus lz_set_system_from_json(const char *json, struct LzSetSystem **out);

// Parses a CSV 0/1 membership matrix with a header row of element names.
enum LzStatus lz_set_system_from_csv(const char *csv, struct LzSetSystem **out);

// Reads an instance file; the format follows the `.json`/`.csv` extension.
enum LzStatus lz_set_system_from_file(const char *path, struct LzSetSystem **out);

// Builds a synthetic instance; `density` must lie in [0, 1].
enum LzStatus lz_set_system_generate(size_t n_sets,
                                     size_t n_elements,
                                     double density,
                                     uint64_t seed,
                                     struct LzSetSystem **out);

// Number of sets, or 0 for a null handle.
size_t lz_set_system_set_count(const struct LzSetSystem *sys);

// Number of elements kept after validation, or 0 for a null handle.
size_t lz_set_system_element_count(const struct LzSetSystem *sys);

void lz_set_system_free(struct LzSetSystem *sys);

// New configuration with the library defaults. Never returns null.
struct LzConfig *lz_config_new(void);

void lz_config_free(struct LzConfig *cfg);

enum LzStatus lz_config_set_style(struct LzConfig *cfg, enum LzStyle style);

// Maximum sets per row; 0 means unbounded. Other values below 2 are rejected.
enum LzStatus lz_config_set_bound(struct LzConfig *cfg, size_t bound);

enum LzStatus lz_config_set_mode(struct LzConfig *cfg, enum LzMode mode);

// Per-stage limit for the exact solvers, in seconds.
enum LzStatus lz_config_set_timeout(struct LzConfig *cfg, double seconds);

enum LzStatus lz_config_set_seed(struct LzConfig *cfg, uint64_t seed);

enum LzStatus lz_config_set_show_cardinality(struct LzConfig *cfg, bool on);

// Whether metrics carry stage wall times (off by default for reproducibility).
enum LzStatus lz_config_set_record_timings(struct LzConfig *cfg, bool on);

// Runs the whole pipeline. On success `*out` receives a result to be
// released with `lz_result_free`.
enum LzStatus lz_run(const struct LzConfig *cfg,
                     const struct LzSetSystem *sys,
                     struct LzResult **out);

// SVG document, or null for a null handle.
const char *lz_result_svg(const struct LzResult *res);

// Metrics as JSON, or null for a null handle.
const char *lz_result_metrics_json(const struct LzResult *res);

// Rendered geometry as JSON, or null for a null handle.
const char *lz_result_meta_json(const struct LzResult *res);

size_t lz_result_row_count(const struct LzResult *res);

size_t lz_result_total_blocks(const struct LzResult *res);

void lz_result_free(struct LzResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINZIP_H */
