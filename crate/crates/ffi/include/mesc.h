#ifndef MESC_H
#define MESC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum MescStatus {
  MESC_STATUS_OK = 0,
  MESC_STATUS_NULL_POINTER = 1,
  MESC_STATUS_INVALID_UTF8 = 2,
  MESC_STATUS_IO = 3,
  MESC_STATUS_MALFORMED = 4,
  MESC_STATUS_INDEX_FORMAT = 5,
  MESC_STATUS_CHECKSUM = 6,
  MESC_STATUS_VERSION_MISMATCH = 7,
  MESC_STATUS_INVALID_ARGUMENT = 8,
  MESC_STATUS_NO_COOCCURRENCE_MASS = 9,
  MESC_STATUS_EMPTY_INPUT = 10,
  MESC_STATUS_PANIC = 11,
} MescStatus;

// Bilingual dictionary handle.
typedef struct MescDictionary MescDictionary;

// Co-occurrence index handle.
typedef struct MescIndex MescIndex;

// Transliteration table handle.
typedef struct MescTranslitTable MescTranslitTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a
// successful one. Valid until the next call on the same thread.
const char *mesc_last_error_message(void);

// Build an index from a `doc_id<TAB>text` corpus file with the default
// tokenizer (case folding and punctuation stripping on).
//
// # Safety
// `corpus_path` must be a valid C string; `out` must be writable.
enum MescStatus mesc_index_build(const char *corpus_path, size_t window, struct MescIndex **out);

// Load an index written by `mesc_index_save` or `mesc index`.
//
// # Safety
// `path` must be a valid C string; `out` must be writable.
enum MescStatus mesc_index_load(const char *path, struct MescIndex **out);

// # Safety
// `index` must be a live handle; `path` a valid C string.
enum MescStatus mesc_index_save(const struct MescIndex *index, const char *path);

// Release an index. NULL is ignored.
//
// # Safety
// `index` must come from this library and not be used afterwards.
void mesc_index_free(struct MescIndex *index);

// Number of distinct terms in the index; 0 for NULL.
//
// # Safety
// `index` must be NULL or a live handle.
size_t mesc_index_vocabulary_size(const struct MescIndex *index);

// Number of documents in the index; 0 for NULL.
//
// # Safety
// `index` must be NULL or a live handle.
size_t mesc_index_doc_count(const struct MescIndex *index);

// Whether two terms co-occur within the index window.
//
// # Safety
// `index` must be a live handle, `a`/`b` valid C strings, `out` writable.
enum MescStatus mesc_index_cooccurs(const struct MescIndex *index,
                                    const char *a,
                                    const char *b,
                                    bool *out);

// Joint co-occurrence probability of two terms.
//
// # Safety
// `index` must be a live handle, `a`/`b` valid C strings, `out` writable.
enum MescStatus mesc_index_joint_probability(const struct MescIndex *index,
                                             const char *a,
                                             const char *b,
                                             double *out);

// Levenshtein distance between two strings, counted in characters.
//
// # Safety
// `a`/`b` must be valid C strings, `out` writable.
enum MescStatus mesc_med(const char *a, const char *b, size_t *out);

// Whether the edit distance between `a` and `b` is at most `k`.
//
// # Safety
// `a`/`b` must be valid C strings, `out` writable.
enum MescStatus mesc_within_distance(const char *a, const char *b, size_t k, bool *out);

// Load a `source<TAB>cand1|cand2|...` dictionary, normalised with the
// tokenizer settings of `index`.
//
// # Safety
// `index` must be a live handle, `path` a valid C string, `out` writable.
enum MescStatus mesc_dictionary_load(const struct MescIndex *index,
                                     const char *path,
                                     struct MescDictionary **out);

// Number of source entries in the dictionary; 0 for NULL.
//
// # Safety
// `dict` must be NULL or a live handle.
size_t mesc_dictionary_len(const struct MescDictionary *dict);

// Release a dictionary. NULL is ignored.
//
// # Safety
// `dict` must come from this library and not be used afterwards.
void mesc_dictionary_free(struct MescDictionary *dict);

// Load a transliteration rule file.
//
// # Safety
// `path` must be a valid C string, `out` writable.
enum MescStatus mesc_translit_load(const char *path, struct MescTranslitTable **out);

// Release a transliteration table. NULL is ignored.
//
// # Safety
// `table` must come from this library and not be used afterwards.
void mesc_translit_free(struct MescTranslitTable *table);

// Translate a source-language query. On success `*out` receives the
// selected target terms joined by single spaces; release it with
// `mesc_string_free`. `translit` may be NULL.
//
// # Safety
// Handles must be live (or NULL for `translit`), `query` a valid C string,
// `out` writable.
enum MescStatus mesc_translate_query(const struct MescIndex *index,
                                     const struct MescDictionary *dict,
                                     const struct MescTranslitTable *translit,
                                     const char *query,
                                     char **out);

// Release a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void mesc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MESC_H */
