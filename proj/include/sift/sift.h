#ifndef SIFT_SIFT_H
#define SIFT_SIFT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SIFT_API __declspec(dllexport)
#else
#define SIFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sift_status {
    SIFT_OK = 0,
    SIFT_ERR_ARGUMENT = 1,     /* null or out-of-range argument */
    SIFT_ERR_PARSE = 2,        /* malformed PDDL or JSON; see sift_last_error_span */
    SIFT_ERR_STRUCTURAL = 3,
    SIFT_ERR_INAPPLICABLE = 4,
    SIFT_ERR_LIMIT = 5,
    SIFT_ERR_CONFIG = 6,
    SIFT_ERR_GENERATION = 7,
    SIFT_ERR_EMPTY_INPUT = 8,
    SIFT_ERR_INTERNAL = 9
} sift_status;

typedef enum sift_sample_kind {
    SIFT_SAMPLE_TRACES = 0,
    SIFT_SAMPLE_PARTIAL = 1,
    SIFT_SAMPLE_FULL = 2
} sift_sample_kind;

typedef struct sift_sample_config {
    sift_sample_kind kind;
    size_t n;            /* trace count */
    size_t length;       /* trace length, also the root walk scale of partial graphs */
    uint64_t seed;
    size_t bfs_budget;   /* edges expanded from each root of a partial graph */
    size_t sample_roots;
    size_t node_cap;     /* full graphs */
} sift_sample_config;

typedef struct sift_learn_config {
    int64_t max_arity;   /* negative: largest observed action arity */
    size_t group_cap;
    size_t workers;
    const char* domain_name;  /* null: "learned" */
} sift_learn_config;

typedef struct sift_problem sift_problem;  /* hidden domain with train and optional test instance */
typedef struct sift_sample sift_sample;    /* trace graph, plus hidden states when generated */
typedef struct sift_model sift_model;      /* learned domain, instance and sidecar */
typedef struct sift_report sift_report;    /* verification outcome */

SIFT_API const char* sift_version(void);

/* Message of the last failing call on this thread; empty after success. */
SIFT_API const char* sift_last_error(void);
/* Source span of the last parse error: 1-based line and column, byte range. Returns 0 if none. */
SIFT_API int sift_last_error_span(size_t* line, size_t* column, size_t* start, size_t* end);

/* Strings returned through char** are owned by the caller. */
SIFT_API void sift_string_free(char* s);

SIFT_API void sift_sample_config_default(sift_sample_config* config);
SIFT_API void sift_learn_config_default(sift_learn_config* config);

/* Checks a domain text and emits it back in canonical form. */
SIFT_API sift_status sift_domain_normalize(const char* domain_pddl, char** out);

SIFT_API sift_status sift_problem_create(const char* domain_pddl, const char* train_pddl, const char* test_pddl,
                                         sift_problem** out);
SIFT_API void sift_problem_free(sift_problem* problem);

/* Samples the training instance (or the test instance when `from_test` is nonzero). */
SIFT_API sift_status sift_generate(const sift_problem* problem, const sift_sample_config* config, int from_test,
                                   sift_sample** out);
SIFT_API sift_status sift_sample_read(const char* tracegraph_json, sift_sample** out);
SIFT_API sift_status sift_sample_read_plain(const char* traces_text, sift_sample** out);
SIFT_API sift_status sift_sample_write(const sift_sample* sample, char** out);
SIFT_API size_t sift_sample_node_count(const sift_sample* sample);
SIFT_API size_t sift_sample_edge_count(const sift_sample* sample);
SIFT_API size_t sift_sample_trace_count(const sift_sample* sample);
SIFT_API void sift_sample_free(sift_sample* sample);

SIFT_API sift_status sift_learn(const sift_sample* sample, const sift_learn_config* config, sift_model** out);
SIFT_API sift_status sift_model_read(const char* domain_pddl, const char* sidecar_json, const char* instance_pddl,
                                     sift_model** out);
SIFT_API sift_status sift_model_domain(const sift_model* model, char** out);
/* SIFT_ERR_STRUCTURAL when the input had no initial node. */
SIFT_API sift_status sift_model_instance(const sift_model* model, char** out);
SIFT_API sift_status sift_model_sidecar(const sift_model* model, char** out);
SIFT_API size_t sift_model_candidate_count(const sift_model* model);
SIFT_API size_t sift_model_admissible_count(const sift_model* model);
/* Stage timings in seconds: features, pruning, build. Any pointer may be null. */
SIFT_API void sift_model_timings(const sift_model* model, double* features, double* pruning, double* build);
SIFT_API void sift_model_free(sift_model* model);

/* Compatibility of a learned model with a test input; inapplicability probes
 * run only when the sample carries hidden states from `problem`'s test instance. */
SIFT_API sift_status sift_verify(const sift_model* model, const sift_problem* problem, const sift_sample* const* tests,
                                 size_t test_count, size_t workers, sift_report** out);
SIFT_API int sift_report_passed(const sift_report* report);
SIFT_API sift_status sift_report_json(const sift_report* report, char** out);
SIFT_API void sift_report_free(sift_report* report);

/* Bundled catalog as JSON; searches SIFT_BENCHMARK_DIR first. */
SIFT_API sift_status sift_benchmarks(char** out);
/* Loads a bundled benchmark by name. */
SIFT_API sift_status sift_benchmark_problem(const char* name, sift_problem** out);
/* Regime defaults of a bundled benchmark. */
SIFT_API sift_status sift_benchmark_sample_config(const char* name, sift_sample_kind kind, sift_sample_config* out);

typedef struct sift_pipeline_config {
    sift_sample_config train;
    const sift_sample_config* tests;  /* verification inputs drawn from the test instance */
    size_t test_count;
    size_t runs;
    uint64_t seed;
    size_t workers;
    sift_learn_config learn;
} sift_pipeline_config;

/* Seeded runs of generate, learn and verify. `row_json` is deterministic;
 * `row_text` is a table line with timings. Output pointers may be null. */
SIFT_API sift_status sift_pipeline(const sift_problem* problem, const sift_pipeline_config* config, char** row_json,
                                   char** row_text, double* verif_rate);

#ifdef __cplusplus
}
#endif

#endif
