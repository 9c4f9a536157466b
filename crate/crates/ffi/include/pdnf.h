#ifndef PDNF_H
#define PDNF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PdnfStatus {
  PDNF_STATUS_OK = 0,
  PDNF_STATUS_NULL_POINTER = 1,
  PDNF_STATUS_INVALID_UTF8 = 2,
  PDNF_STATUS_PARSE_ERROR = 3,
  PDNF_STATUS_INPUT_ERROR = 4,
  // The call completed but an exact check failed.
  PDNF_STATUS_VERIFICATION_FAILED = 5,
  PDNF_STATUS_INTERNAL = 6,
} PdnfStatus;

// A normal form with its report.
typedef struct PdnfNormalForm PdnfNormalForm;

// A parsed system file.
typedef struct PdnfSystem PdnfSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses system-file text. On success `*out` owns a new handle.
//
// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
enum PdnfStatus pdnf_system_parse(const char *text, struct PdnfSystem **out);

// Dimension of the system, or 0 for a null handle.
//
// # Safety
// `sys` must be null or a live handle.
size_t pdnf_system_dim(const struct PdnfSystem *sys);

// # Safety
// `sys` must be null or a handle from `pdnf_system_parse` not yet freed.
void pdnf_system_free(struct PdnfSystem *sys);

// Normal form through `order`. Declared eigenvalues must match the
// linear part.
//
// # Safety
// `sys` must be a live handle and `out` a valid pointer.
enum PdnfStatus pdnf_normalize(const struct PdnfSystem *sys,
                               uint32_t order,
                               struct PdnfNormalForm **out);

// The normal-form report as JSON.
//
// # Safety
// `nf` must be a live handle and `out` a valid pointer.
enum PdnfStatus pdnf_normal_form_json(const struct PdnfNormalForm *nf, char **out);

// Re-runs the exact checks. Returns `Ok` when all pass and
// `VerificationFailed` otherwise.
//
// # Safety
// `nf` must be a live handle.
enum PdnfStatus pdnf_normal_form_verify(const struct PdnfNormalForm *nf);

// # Safety
// `nf` must be null or a handle from `pdnf_normalize` not yet freed.
void pdnf_normal_form_free(struct PdnfNormalForm *nf);

// Runs a command-line subcommand (`analyze`, `unfold`, ...) on `sys` and
// writes its JSON report. `sys` may be null for `selfcheck`. A report
// whose checks fail is still written and the call returns
// `VerificationFailed`.
//
// # Safety
// `command` must be a nul-terminated string, `sys` null or a live handle
// and `out` a valid pointer.
enum PdnfStatus pdnf_run(const struct PdnfSystem *sys,
                         const char *command,
                         uint32_t order,
                         char **out);

// Message for the last failing call on this thread, or null. Valid until
// the next call into this library on the same thread.
const char *pdnf_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void pdnf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PDNF_H */
