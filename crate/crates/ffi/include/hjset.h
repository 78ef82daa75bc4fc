#ifndef HJSET_H
#define HJSET_H

/* Generated by cbindgen from hjset-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every entry point.
typedef enum HjsetStatus {
  // success; out-parameters are populated
  HJSET_STATUS_OK = 0,
  // the bounded search exhausted its space (a legitimate negative)
  HJSET_STATUS_EXHAUSTED = 1,
  // malformed input; see `hjset_last_error`
  HJSET_STATUS_INVALID_INPUT = 2,
  // a required pointer argument was null
  HJSET_STATUS_NULL_POINTER = 3,
  // an input string was not valid UTF-8
  HJSET_STATUS_UTF8 = 4,
  // certificate verification failed
  HJSET_STATUS_VERIFY_FAILED = 5,
  // an internal panic was caught at the boundary
  HJSET_STATUS_PANIC = 6,
} HjsetStatus;

// Opaque certificate handle.
typedef struct HjsetCertificate HjsetCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent error on this thread, or null. The caller
// owns the string and must release it with `hjset_string_free`.
char *hjset_last_error(void);

// Library version as a static string; do not free.
const char *hjset_version(void);

// Release a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned through an out-parameter of
// this library, or null.
void hjset_string_free(char *s);

// Release a certificate handle.
//
// # Safety
// `cert` must be a handle previously returned by this library, or null.
void hjset_certificate_free(struct HjsetCertificate *cert);

// Least `N <= max` such that every `c`-coloring of the length-`N` cube
// over `k` letters has a monochromatic line. `Exhausted` means unresolved
// within the cap.
enum HjsetStatus hjset_hj_number(uint32_t k, uint32_t c, uint32_t max, uint32_t *out_number);

// Lex-least line-free `c`-coloring of the length-`len` cube, rendered in
// the `word<TAB>color` file format; `Exhausted` when every coloring has a
// monochromatic line.
enum HjsetStatus hjset_hj_line_free(uint32_t k, uint32_t c, uint32_t len, char **out_coloring);

// Canonically least monochromatic `n`-variable line of a coloring
// (`word<TAB>color` text). On success the root is returned in word
// syntax (`a#1b`).
//
// # Safety
// `colors` must be a valid NUL-terminated string.
enum HjsetStatus hjset_find_mono_line(uint32_t k, uint32_t n, const char *colors, char **out_root);

// Bounded J-set witness search over the word semigroup. On success the
// witness is returned as a small TOML document with keys `m`, `t`, `a`.
//
// # Safety
// `pred` and `seqs` must be valid NUL-terminated strings.
enum HjsetStatus hjset_find_witness(uint32_t k,
                                    const char *pred,
                                    const char *seqs,
                                    uint32_t m_max,
                                    uint32_t horizon,
                                    uint32_t pool_len,
                                    char **out_witness);

// Canonically least `n`-variable word whose every substitution instance
// satisfies the predicate.
//
// # Safety
// `pred` must be a valid NUL-terminated string.
enum HjsetStatus hjset_theorem3(const char *pred,
                                uint32_t n,
                                uint32_t k,
                                uint32_t word_len,
                                char **out_word);

// Parse a certificate from its TOML text into an opaque handle.
//
// # Safety
// `text` must be a valid NUL-terminated string.
enum HjsetStatus hjset_certificate_parse(const char *text, struct HjsetCertificate **out_cert);

// Subcommand recorded in a certificate.
//
// # Safety
// `cert` must be a live handle from this library.
enum HjsetStatus hjset_certificate_subcommand(const struct HjsetCertificate *cert,
                                              char **out_subcommand);

// Serialize a certificate handle back to TOML.
//
// # Safety
// `cert` must be a live handle from this library.
enum HjsetStatus hjset_certificate_to_toml(const struct HjsetCertificate *cert, char **out_text);

// Re-check every claim of a certificate without re-running its search.
//
// # Safety
// `cert` must be a live handle from this library.
enum HjsetStatus hjset_certificate_verify(const struct HjsetCertificate *cert);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HJSET_H */
