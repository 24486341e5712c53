/* gestid: performer identification from hand-gesture recordings. */
#ifndef GESTID_GESTID_H
#define GESTID_GESTID_H

#include <stddef.h>
#include <stdint.h>

#if defined(GESTID_BUILDING_LIBRARY)
#define GESTID_API __attribute__((visibility("default")))
#else
#define GESTID_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gestid_status {
  GESTID_OK = 0,
  GESTID_ERR_USAGE = 1,     /* invalid argument or configuration value */
  GESTID_ERR_DATA = 2,      /* malformed or unsuitable input data */
  GESTID_ERR_NUMERICAL = 3, /* a numerical kernel failed */
  GESTID_ERR_IO = 4,        /* file system error */
  GESTID_ERR_INTERNAL = 5
} gestid_status;

typedef struct gestid_corpus gestid_corpus;
typedef struct gestid_run_config gestid_run_config;
typedef struct gestid_report gestid_report;

GESTID_API const char* gestid_version(void);

/* Message of the most recent failure on the calling thread ("" if none). */
GESTID_API const char* gestid_last_error(void);

/* Warnings go to stderr unless a handler is installed. A NULL handler
   discards them. */
typedef void (*gestid_warning_fn)(const char* message, void* user_data);
GESTID_API void gestid_set_warning_handler(gestid_warning_fn handler, void* user_data);

/* Strings returned with ownership (char**) are released with this. */
GESTID_API void gestid_string_free(char* s);

/* ---- corpora ---- */

typedef struct gestid_synthetic_spec {
  int performers;
  int gestures;
  int natural_repetitions;
  int rapid_repetitions;
  int slow_repetitions;
  int sensors;
  double style_separation;
  double noise_sigma;
  uint64_t seed;
} gestid_synthetic_spec;

GESTID_API void gestid_synthetic_spec_default(gestid_synthetic_spec* spec);
GESTID_API gestid_status gestid_corpus_generate(const gestid_synthetic_spec* spec, gestid_corpus** out);
GESTID_API gestid_status gestid_corpus_load(const char* dir, gestid_corpus** out);
GESTID_API gestid_status gestid_corpus_save(const gestid_corpus* corpus, const char* dir);

/* Imports a directory of raw recordings. `device` is "dg5vhand" or
   "cyberglove"; `pattern` (may be NULL for the default) is a regex over file
   names with groups performer, gesture, repetition. */
GESTID_API gestid_status gestid_corpus_convert(const char* src_dir, const char* device, const char* pattern,
                                               int first_column_is_time, gestid_corpus** out);
GESTID_API void gestid_corpus_free(gestid_corpus* corpus);

GESTID_API size_t gestid_corpus_recording_count(const gestid_corpus* corpus);
GESTID_API size_t gestid_corpus_performer_count(const gestid_corpus* corpus);
GESTID_API size_t gestid_corpus_gesture_count(const gestid_corpus* corpus);
GESTID_API size_t gestid_corpus_sensor_count(const gestid_corpus* corpus);
/* 16 hex digits plus terminator. */
GESTID_API gestid_status gestid_corpus_digest(const gestid_corpus* corpus, char out[17]);

/* Plot data for a 2-D LDA projection: CSV rows x,y,performer,gesture. */
GESTID_API gestid_status gestid_project(const gestid_corpus* corpus, int length, int pca_dim, char** csv);

/* ---- experiments ---- */

GESTID_API gestid_status gestid_run_config_create(gestid_run_config** out);
GESTID_API void gestid_run_config_free(gestid_run_config* config);
/* Keys: corpus, out, scenario, classifier, mode, seed, outer-folds,
   inner-folds, pca-dim, length, layout, kernel, lda-dims, knn-k, svm-c,
   svm-gamma. List values are ','-separated (scenario: ';'). */
GESTID_API gestid_status gestid_run_config_set(gestid_run_config* config, const char* key, const char* value);
/* Current value of `out` (owned by the config). */
GESTID_API const char* gestid_run_config_out(const gestid_run_config* config);

/* Runs every configured scenario and classifier. With a NULL corpus the
   configured corpus directory is loaded. */
GESTID_API gestid_status gestid_run(const gestid_run_config* config, const gestid_corpus* corpus,
                                    gestid_report** out);
GESTID_API void gestid_report_free(gestid_report* report);

/* Writes summary.txt, report.json, manifest.toml and confusion CSVs. */
GESTID_API gestid_status gestid_report_write(const gestid_report* report, const char* dir);

/* Text views owned by the report. */
GESTID_API const char* gestid_report_summary(const gestid_report* report);
GESTID_API const char* gestid_report_json(const gestid_report* report);
GESTID_API const char* gestid_report_manifest(const gestid_report* report);

GESTID_API size_t gestid_report_outcome_count(const gestid_report* report);
typedef struct gestid_outcome {
  const char* scenario;   /* e.g. "a:5", "b", "c:1,3/2,4" */
  const char* classifier; /* "lda", "knn" or "svm" */
  double accuracy;        /* in [0, 1] */
  size_t warning_count;
} gestid_outcome;
GESTID_API gestid_status gestid_report_outcome(const gestid_report* report, size_t index, gestid_outcome* out);

#ifdef __cplusplus
}
#endif

#endif
