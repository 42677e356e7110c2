#ifndef SPECFORGE_H
#define SPECFORGE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  // A required pointer was null.
  SF_STATUS_NULL_ARGUMENT = 1,
  // A string was not valid UTF-8.
  SF_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON or an out-of-range value.
  SF_STATUS_INVALID_ARGUMENT = 3,
  SF_STATUS_NOT_FOUND = 4,
  SF_STATUS_IO = 5,
  // The engine rejected the request; see `sf_last_error`.
  SF_STATUS_DOMAIN = 6,
  // A session was asked for results before all prompts were answered,
  // or answered after it finished.
  SF_STATUS_WRONG_STATE = 7,
  SF_STATUS_INTERNAL = 8,
} SfStatus;

typedef struct SfCatalog SfCatalog;

typedef struct SfDocument SfDocument;

typedef struct SfSession SfSession;

// A table together with its goods buffer.
typedef struct SfTable SfTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *sf_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void sf_string_free(char *s);

// Compares two designations: negative, zero or positive.
//
// # Safety
// `a` and `b` must be valid NUL-terminated strings.
enum SfStatus sf_compare_designations(const char *a, const char *b, int *out);

// Sorts a JSON array of designations.
//
// # Safety
// `items_json` must be a valid string; `out` a valid pointer.
enum SfStatus sf_sort_designations(const char *items_json, char **out);

// Loads and validates a catalog directory.
//
// # Safety
// `dir` must be a valid string; `out` a valid pointer.
enum SfStatus sf_catalog_load(const char *dir, struct SfCatalog **out);

// # Safety
// `c` must come from `sf_catalog_load` or be null.
void sf_catalog_free(struct SfCatalog *c);

// Per-profile statistics as a JSON array.
//
// # Safety
// `c` must be a live catalog; `out` a valid pointer.
enum SfStatus sf_catalog_stats(const struct SfCatalog *c, char **out);

// Starts a selection session. The session keeps its own copy of what it
// needs, so the catalog may be freed afterwards.
//
// # Safety
// `c` must be a live catalog, `table` a valid string, `out` a valid pointer.
enum SfStatus sf_session_start(const struct SfCatalog *c,
                               const char *table,
                               uintptr_t row,
                               struct SfSession **out);

// # Safety
// `s` must come from `sf_session_start` or be null.
void sf_session_free(struct SfSession *s);

// The next prompt as JSON (`{"prompt":"done"}` when nothing is left).
//
// # Safety
// `s` must be a live session; `out` a valid pointer.
enum SfStatus sf_session_prompt(const struct SfSession *s, char **out);

// Answers the current prompt. `answer_json` is an option index, a number
// or a JSON string.
//
// # Safety
// `s` must be a live session; `answer_json` a valid string.
enum SfStatus sf_session_answer(struct SfSession *s, const char *answer_json);

// Generated fields of a finished session as JSON.
//
// # Safety
// `s` must be a live session; `out` a valid pointer.
enum SfStatus sf_session_finish(const struct SfSession *s, char **out);

// Loads a drawing file.
//
// # Safety
// `path` must be a valid string; `out` a valid pointer.
enum SfStatus sf_document_load(const char *path, struct SfDocument **out);

// An empty drawing.
//
// # Safety
// `out` must be a valid pointer.
enum SfStatus sf_document_new(struct SfDocument **out);

// # Safety
// `d` must be a live document; `path` a valid string.
enum SfStatus sf_document_save(const struct SfDocument *d, const char *path);

// # Safety
// `d` must come from this library or be null.
void sf_document_free(struct SfDocument *d);

// Repeated designations within the document, as JSON. `scope` is a comma
// list of `po`, `axono`, `vk`.
//
// # Safety
// `d` must be a live document; `scope` a valid string; `out` a valid pointer.
enum SfStatus sf_document_duplicates(const struct SfDocument *d, const char *scope, char **out);

// Fills a new table of the kind in `kind_path` from the document.
//
// # Safety
// `d` must be a live document; strings valid; `out` a valid pointer.
enum SfStatus sf_document_autofill(const struct SfDocument *d,
                                   const char *kind_path,
                                   const char *scope,
                                   struct SfTable **out);

// An empty table of the kind in `kind_path`.
//
// # Safety
// `kind_path` must be a valid string; `out` a valid pointer.
enum SfStatus sf_table_new(const char *kind_path, struct SfTable **out);

// A table from its JSON file form.
//
// # Safety
// `table_json` must be a valid string; `out` a valid pointer.
enum SfStatus sf_table_from_json(const char *table_json, struct SfTable **out);

// # Safety
// `t` must be a live table; `out` a valid pointer.
enum SfStatus sf_table_to_json(const struct SfTable *t, char **out);

// Number of data rows.
//
// # Safety
// `t` must be a live table; `out` a valid pointer.
enum SfStatus sf_table_len(const struct SfTable *t, uintptr_t *out);

// Applies one operation object or an array of them. Either all apply or
// the table is unchanged.
//
// # Safety
// `t` must be a live table; `ops_json` a valid string.
enum SfStatus sf_table_apply(struct SfTable *t, const char *ops_json);

// Copies the goods buffer of `from` into `to`, for moving rows between tables.
//
// # Safety
// Both must be live tables.
enum SfStatus sf_table_share_buffer(const struct SfTable *from, struct SfTable *to);

// # Safety
// `t` must come from this library or be null.
void sf_table_free(struct SfTable *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECFORGE_H */
