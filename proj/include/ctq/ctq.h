/*
 * ctq — exact cosine-threshold query engine over sparse non-negative vectors.
 *
 * C API of the shared library. All functions returning ctq_status report
 * CTQ_OK on success; on failure ctq_last_error() holds a detail message for
 * the calling thread. Handles are opaque; every *_free function tolerates
 * NULL. An index is immutable once built or opened and may be shared by any
 * number of concurrent queries; result handles are confined to the thread
 * that created them.
 */

#ifndef CTQ_H
#define CTQ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctq_status {
    CTQ_OK = 0,
    CTQ_ERR_EMPTY_VECTOR,
    CTQ_ERR_NEGATIVE_VALUE,
    CTQ_ERR_DUPLICATE_ID,
    CTQ_ERR_DIMENSION_RANGE,
    CTQ_ERR_PARSE,
    CTQ_ERR_IO,
    CTQ_ERR_FORMAT_VERSION,
    CTQ_ERR_CHECKSUM,
    CTQ_ERR_UNKNOWN_DIM,
    CTQ_ERR_INVALID_BOUND,
    CTQ_ERR_ALL_EXHAUSTED,
    CTQ_ERR_UNKNOWN_STRATEGY,
    CTQ_ERR_INSTANCE_TOO_LARGE,
    CTQ_ERR_BAD_ARGUMENT,
    CTQ_ERR_INTERNAL
} ctq_status;

typedef enum ctq_strategy {
    CTQ_STRATEGY_LOCKSTEP = 0,
    CTQ_STRATEGY_MAXRED = 1,
    CTQ_STRATEGY_HULL = 2
} ctq_strategy;

typedef enum ctq_stop {
    CTQ_STOP_BASELINE = 0,
    CTQ_STOP_TIGHT = 1
} ctq_stop;

typedef struct ctq_vecset ctq_vecset; /* an ordered collection of sparse vectors */
typedef struct ctq_index ctq_index;   /* an immutable inverted index */
typedef struct ctq_result ctq_result; /* one query's matches and statistics */

const char* ctq_status_name(ctq_status status);

/* Detail message for the most recent failure on this thread. */
const char* ctq_last_error(void);

/* ---- vector sets ------------------------------------------------------- */

ctq_status ctq_vecset_create(ctq_vecset** out);

/* Adds one vector: nnz (dim, value) pairs, values > 0, dims unique. */
ctq_status ctq_vecset_add(ctq_vecset* set, const char* id, const uint32_t* dims,
                          const double* values, size_t nnz);

/* Parses the text format "id<TAB>dim:value dim:value ..." ('#' comments). */
ctq_status ctq_vecset_parse_file(const char* path, ctq_vecset** out);

/* The built-in six-vector demo database and its companion query. */
ctq_status ctq_vecset_fixture(ctq_vecset** out);

size_t ctq_vecset_size(const ctq_vecset* set);
const char* ctq_vecset_id(const ctq_vecset* set, size_t i);
ctq_status ctq_vecset_entries(const ctq_vecset* set, size_t i, const uint32_t** dims,
                              const double** values, size_t* nnz);
void ctq_vecset_free(ctq_vecset* set);

/* ---- index ------------------------------------------------------------- */

/* Builds an index over the set. normalize != 0 scales vectors to unit norm. */
ctq_status ctq_index_build(const ctq_vecset* set, int normalize, ctq_index** out);

ctq_status ctq_index_save(const ctq_index* index, const char* dir);
ctq_status ctq_index_open(const char* dir, ctq_index** out);
void ctq_index_free(ctq_index* index);

uint32_t ctq_index_dims(const ctq_index* index);
uint64_t ctq_index_size(const ctq_index* index);
/* Largest gap between consecutive lower-hull vertices across all lists. */
uint32_t ctq_index_hull_gap(const ctq_index* index);
uint64_t ctq_index_hull_vertices(const ctq_index* index);

/* ---- queries ----------------------------------------------------------- */

typedef struct ctq_query_opts {
    double theta;          /* threshold in (0, 1]; ignored when topk > 0 */
    int64_t topk;          /* > 0 switches to top-k mode */
    ctq_strategy strategy; /* traversal strategy */
    ctq_stop stop;         /* stopping condition (threshold mode) */
    double tau_tilde;      /* capped-approximation constant; 0 = 1/theta */
    int normalize;         /* normalize the query vector (text inputs do) */
    uint64_t opt_budget;   /* >0: also compute the optimal access cost when
                              the cursor lattice has at most this many
                              positions */
} ctq_query_opts;

void ctq_query_opts_init(ctq_query_opts* opts);

typedef struct ctq_query_stats {
    uint64_t access_cost;
    uint64_t candidate_count;
    uint64_t last_gap;
    double epsilon_upper;
    uint64_t verification_accesses;
    uint64_t result_count;
    uint64_t wall_time_micros;
    int64_t opt_cost; /* -1 when not computed */
} ctq_query_stats;

ctq_status ctq_query_run(const ctq_index* index, const uint32_t* dims, const double* values,
                         size_t nnz, const ctq_query_opts* opts, ctq_result** out);

size_t ctq_result_size(const ctq_result* result);
const char* ctq_result_id(const ctq_result* result, size_t i);
double ctq_result_score(const ctq_result* result, size_t i);
void ctq_result_stats(const ctq_result* result, ctq_query_stats* out);

/* Ids gathered as candidates (ascending); independent of the result rows. */
size_t ctq_result_candidate_count(const ctq_result* result);
const char* ctq_result_candidate(const ctq_result* result, size_t i);

void ctq_result_free(ctq_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CTQ_H */
