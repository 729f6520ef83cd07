#ifndef PROGEQ_H
#define PROGEQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes shared by every fallible function.
 */
typedef enum PqStatus {
  PQ_STATUS_OK = 0,
  PQ_STATUS_NULL_ARGUMENT = 1,
  PQ_STATUS_INVALID_UTF8 = 2,
  PQ_STATUS_PARSE_ERROR = 3,
  PQ_STATUS_RULE_ERROR = 4,
  PQ_STATUS_NOT_APPLICABLE = 5,
  PQ_STATUS_NOT_PROVEN = 6,
  PQ_STATUS_INTERNAL = 7,
} PqStatus;

/*
 An immutable, parsed program.
 */
typedef struct PqProgram PqProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread, or an empty
 string. Valid until the next call into this library from the same thread.
 */
const char *pq_last_error(void);

/*
 Library version as a static string.
 */
const char *pq_version(void);

/*
 Parses prefix text such as `s01 === ( +s s02 s03 ) ;`.

 # Safety
 `text` must be null or a valid NUL-terminated string; `out` must be null
 or valid for writes.
 */
enum PqStatus pq_program_parse(const char *text, struct PqProgram **out);

/*
 Releases a program. Null is ignored.

 # Safety
 `p` must be null or a handle from this library not yet freed.
 */
void pq_program_free(struct PqProgram *p);

/*
 Writes the program's prefix text to `*out`.

 # Safety
 `p` must be null or a live handle; `out` must be null or valid for writes.
 */
enum PqStatus pq_program_print(const struct PqProgram *p, char **out);

/*
 Number of statements in the program, or 0 for a null handle.

 # Safety
 `p` must be null or a live handle.
 */
size_t pq_program_len(const struct PqProgram *p);

/*
 Applies one rule such as `stm1 Commute N`, writing a new handle to `*out`.
 Returns `NotApplicable` when the rule is not legal on the program.

 # Safety
 Pointers must be null or valid as described for the other functions.
 */
enum PqStatus pq_program_apply(const struct PqProgram *p, const char *rule, struct PqProgram **out);

/*
 Writes every legal rule on the program to `*out`, one per line.

 # Safety
 `p` must be null or a live handle; `out` must be null or valid for writes.
 */
enum PqStatus pq_program_enumerate(const struct PqProgram *p, char **out);

/*
 Checks that `rules` (one per line, `#` comments allowed) rewrites `a`
 into `b`. Returns `Ok` when proven and `NotProven` otherwise.

 # Safety
 Pointers must be null or valid as described for the other functions.
 */
enum PqStatus pq_verify(const struct PqProgram *a, const struct PqProgram *b, const char *rules);

/*
 Searches for a proof with the built-in heuristic policy. On success the
 proof is written to `*out`, one rule per line; otherwise the status is
 `NotProven` and `*out` is untouched.

 # Safety
 Pointers must be null or valid as described for the other functions.
 */
enum PqStatus pq_prove_heuristic(const struct PqProgram *a,
                                 const struct PqProgram *b,
                                 size_t beam,
                                 size_t intermediates,
                                 size_t max_steps,
                                 char **out);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void pq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROGEQ_H */
