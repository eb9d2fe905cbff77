#ifndef GREENWALK_H
#define GREENWALK_H

/* Generated by cbindgen from the greenwalk-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirror the CLI exit codes where they overlap.
 */
typedef enum {
  /**
   * Success.
   */
  GW_STATUS_OK = 0,
  /**
   * Unspecified runtime failure; see `gw_last_error`.
   */
  GW_STATUS_RUNTIME_ERROR = 1,
  /**
   * Malformed config, spec, measure, or word.
   */
  GW_STATUS_SCHEMA_ERROR = 2,
  /**
   * Budget or memory cap exceeded.
   */
  GW_STATUS_BUDGET_ERROR = 3,
  /**
   * A required pointer argument was null.
   */
  GW_STATUS_NULL_POINTER = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  GW_STATUS_UTF8_ERROR = 5,
} GwStatus;

/**
 * Opaque group handle: a word-problem oracle plus its generator set.
 */
typedef struct GwGroup GwGroup;

/**
 * Parses a group spec (the config `group` object, e.g.
 * `{"type":"free","rank":2,"extra":["ab"]}`) into an opaque handle.
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string and `out` a valid pointer.
 */
GwStatus gw_group_new(const char *spec_json, GwGroup **out);

/**
 * Releases a group handle. Null is a no-op.
 *
 * # Safety
 * `group` must be a pointer from `gw_group_new`, not yet freed.
 */
void gw_group_free(GwGroup *group);

/**
 * Number of generator labels of the group (the symmetric generating set).
 *
 * # Safety
 * `group` must be a live handle; `out` must be valid.
 */
GwStatus gw_group_generator_count(const GwGroup *group, uintptr_t *out);

/**
 * Evaluates a word over generator labels (e.g. `"abA"` or `"x1 X2"`) and
 * returns the display form of its normal form.
 *
 * # Safety
 * `group` must be a live handle; strings as in the module docs.
 */
GwStatus gw_group_normal_form(const GwGroup *group, const char *word, char **out);

/**
 * Runs a full batch config (same JSON schema as the CLI) and returns the
 * primary report JSON; report files are written under `out_dir`.
 *
 * # Safety
 * Strings must be NUL-terminated; `out_report` must be valid.
 */
GwStatus gw_run_json(const char *config_json, const char *out_dir, char **out_report);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must come from a greenwalk FFI call, not yet freed.
 */
void gw_string_free(char *s);

/**
 * Last error message on this thread, or null if none. Caller frees with
 * `gw_string_free`.
 */
char *gw_last_error(void);

#endif /* GREENWALK_H */
