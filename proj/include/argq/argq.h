/* C interface of the argument quality library.
 *
 * Every function returns an aq_status. On failure a message describing the
 * problem (naming the offending config key or file) is available from
 * aq_last_error() on the same thread until the next call. Strings returned
 * through out-parameters are owned by the caller and released with
 * aq_string_free(). Handles are opaque and not thread-safe; distinct handles
 * may be used from different threads.
 */
#ifndef ARGQ_H
#define ARGQ_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define AQ_API __declspec(dllexport)
#else
#define AQ_API __attribute__((visibility("default")))
#endif

/* Stable codes; the command-line tool uses them as exit statuses. */
typedef enum aq_status {
  AQ_OK = 0,
  AQ_INVALID_ARGUMENT = 1,
  AQ_CONFIG_ERROR = 2,
  AQ_DATA_ERROR = 3,
  AQ_RUNTIME_ERROR = 4,
  AQ_FINGERPRINT_ERROR = 5
} aq_status;

typedef struct aq_config aq_config;
typedef struct aq_scorer aq_scorer;

/* Progress and warning messages. */
typedef void (*aq_log_fn)(const char* message, void* user_data);

AQ_API const char* aq_version(void);
AQ_API const char* aq_last_error(void);
AQ_API void aq_string_free(char* s);

/* Configuration. aq_config_new starts from the documented defaults. */
AQ_API aq_status aq_config_new(aq_config** out);
AQ_API aq_status aq_config_load(const char* path, aq_config** out);
/* "section.key" assignment, e.g. ("run.jobs", "4"). */
AQ_API aq_status aq_config_set(aq_config* cfg, const char* key, const char* value);
/* Sorted "section.key = value" lines of every effective setting. */
AQ_API aq_status aq_config_canonical(const aq_config* cfg, char** out);
/* INI text with every key, its default and a short description. */
AQ_API aq_status aq_config_defaults(char** out);
AQ_API void aq_config_free(aq_config* cfg);

/* Checks config, corpus, lexicons and embedding file; *summary_json gets
 * argument and topic counts and the score histogram. */
AQ_API aq_status aq_validate(const aq_config* cfg, aq_log_fn log, void* user_data,
                             char** summary_json);

/* Runs the experiment suites. `suites` is a comma-separated subset of
 * "q1,q2,q3" or NULL for the configured ones; jobs <= 0 keeps the configured
 * degree. *manifest_json (may be NULL) receives the run manifest. */
AQ_API aq_status aq_run(const aq_config* cfg, const char* suites, int jobs, aq_log_fn log,
                        void* user_data, char** manifest_json);

/* Trains final models on the whole corpus into out_dir. */
AQ_API aq_status aq_train(const aq_config* cfg, const char* out_dir, int baseline,
                          aq_log_fn log, void* user_data);

AQ_API aq_status aq_scorer_open(const char* model_dir, aq_scorer** out);
/* *result_json: {"scores": {...}, ["rounded": {...},] "contributions": {...}}. */
AQ_API aq_status aq_scorer_score(const aq_scorer* scorer, const char* text, size_t length,
                                 int rounded, char** result_json);
AQ_API void aq_scorer_free(aq_scorer* scorer);

#ifdef __cplusplus
}
#endif

#endif /* ARGQ_H */
