#include "ctq/ctq.h"

#include <cstring>
#include <string>
#include <vector>

#include "ctq/engine.hpp"
#include "ctq/index.hpp"
#include "ctq/io.hpp"

struct ctq_vecset {
    std::vector<ctq::SparseVector> vectors;
    // flat per-vector arrays handed out by ctq_vecset_entries; filled on
    // insertion so concurrent readers never mutate shared state
    std::vector<std::vector<uint32_t>> dims_store;
    std::vector<std::vector<double>> values_store;

    void push(ctq::SparseVector v) {
        std::vector<uint32_t> dims(v.nnz());
        std::vector<double> values(v.nnz());
        for (size_t k = 0; k < v.nnz(); ++k) {
            dims[k] = v.entries()[k].dim;
            values[k] = v.entries()[k].value;
        }
        vectors.push_back(std::move(v));
        dims_store.push_back(std::move(dims));
        values_store.push_back(std::move(values));
    }
    void fill(std::vector<ctq::SparseVector> vs) {
        for (auto& v : vs) push(std::move(v));
    }
};

struct ctq_index {
    ctq::InvertedIndex index;
};

struct ctq_result {
    std::vector<ctq::Match> matches;
    ctq::QueryStats stats;
};

namespace {

thread_local std::string t_last_error;

ctq_status map_code(ctq::ErrorCode code) {
    using ctq::ErrorCode;
    switch (code) {
        case ErrorCode::Ok: return CTQ_OK;
        case ErrorCode::EmptyVector: return CTQ_ERR_EMPTY_VECTOR;
        case ErrorCode::NegativeValue: return CTQ_ERR_NEGATIVE_VALUE;
        case ErrorCode::DuplicateId: return CTQ_ERR_DUPLICATE_ID;
        case ErrorCode::DimensionOutOfRange: return CTQ_ERR_DIMENSION_RANGE;
        case ErrorCode::ParseError: return CTQ_ERR_PARSE;
        case ErrorCode::IoError: return CTQ_ERR_IO;
        case ErrorCode::FormatVersionMismatch: return CTQ_ERR_FORMAT_VERSION;
        case ErrorCode::ChecksumMismatch: return CTQ_ERR_CHECKSUM;
        case ErrorCode::UnknownDim: return CTQ_ERR_UNKNOWN_DIM;
        case ErrorCode::InvalidBound: return CTQ_ERR_INVALID_BOUND;
        case ErrorCode::AllExhausted: return CTQ_ERR_ALL_EXHAUSTED;
        case ErrorCode::UnknownStrategy: return CTQ_ERR_UNKNOWN_STRATEGY;
        case ErrorCode::InstanceTooLarge: return CTQ_ERR_INSTANCE_TOO_LARGE;
        case ErrorCode::BadArgument: return CTQ_ERR_BAD_ARGUMENT;
        case ErrorCode::Internal: return CTQ_ERR_INTERNAL;
    }
    return CTQ_ERR_INTERNAL;
}

template <typename Fn>
ctq_status guarded(Fn&& fn) {
    try {
        fn();
        return CTQ_OK;
    } catch (const ctq::Error& e) {
        t_last_error = e.what();
        return map_code(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return CTQ_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return CTQ_ERR_INTERNAL;
    }
}

ctq_status fail(ctq_status status, const char* message) {
    t_last_error = message;
    return status;
}

}  // namespace

extern "C" {

const char* ctq_status_name(ctq_status status) {
    switch (status) {
        case CTQ_OK: return "ok";
        case CTQ_ERR_EMPTY_VECTOR: return "empty-vector";
        case CTQ_ERR_NEGATIVE_VALUE: return "negative-value";
        case CTQ_ERR_DUPLICATE_ID: return "duplicate-id";
        case CTQ_ERR_DIMENSION_RANGE: return "dimension-out-of-range";
        case CTQ_ERR_PARSE: return "parse-error";
        case CTQ_ERR_IO: return "io-error";
        case CTQ_ERR_FORMAT_VERSION: return "format-version-mismatch";
        case CTQ_ERR_CHECKSUM: return "checksum-mismatch";
        case CTQ_ERR_UNKNOWN_DIM: return "unknown-dim";
        case CTQ_ERR_INVALID_BOUND: return "invalid-bound";
        case CTQ_ERR_ALL_EXHAUSTED: return "all-exhausted";
        case CTQ_ERR_UNKNOWN_STRATEGY: return "unknown-strategy";
        case CTQ_ERR_INSTANCE_TOO_LARGE: return "instance-too-large";
        case CTQ_ERR_BAD_ARGUMENT: return "bad-argument";
        case CTQ_ERR_INTERNAL: return "internal-error";
    }
    return "unknown";
}

const char* ctq_last_error(void) { return t_last_error.c_str(); }

ctq_status ctq_vecset_create(ctq_vecset** out) {
    if (!out) return fail(CTQ_ERR_BAD_ARGUMENT, "out is NULL");
    return guarded([&] { *out = new ctq_vecset(); });
}

ctq_status ctq_vecset_add(ctq_vecset* set, const char* id, const uint32_t* dims,
                          const double* values, size_t nnz) {
    if (!set || !id || (nnz > 0 && (!dims || !values)))
        return fail(CTQ_ERR_BAD_ARGUMENT, "NULL argument");
    return guarded([&] {
        set->push(ctq::SparseVector::make(id, std::span(dims, nnz), std::span(values, nnz)));
    });
}

ctq_status ctq_vecset_parse_file(const char* path, ctq_vecset** out) {
    if (!path || !out) return fail(CTQ_ERR_BAD_ARGUMENT, "NULL argument");
    return guarded([&] {
        auto vectors = ctq::parse_vector_file(path);
        auto* set = new ctq_vecset();
        set->fill(std::move(vectors));
        *out = set;
    });
}

ctq_status ctq_vecset_fixture(ctq_vecset** out) {
    if (!out) return fail(CTQ_ERR_BAD_ARGUMENT, "out is NULL");
    return guarded([&] {
        auto* set = new ctq_vecset();
        set->fill(ctq::builtin_fixture_vectors());
        *out = set;
    });
}

size_t ctq_vecset_size(const ctq_vecset* set) { return set ? set->vectors.size() : 0; }

const char* ctq_vecset_id(const ctq_vecset* set, size_t i) {
    if (!set || i >= set->vectors.size()) return nullptr;
    return set->vectors[i].id().c_str();
}

ctq_status ctq_vecset_entries(const ctq_vecset* set, size_t i, const uint32_t** dims,
                              const double** values, size_t* nnz) {
    if (!set || !dims || !values || !nnz) return fail(CTQ_ERR_BAD_ARGUMENT, "NULL argument");
    if (i >= set->vectors.size()) return fail(CTQ_ERR_BAD_ARGUMENT, "vector index out of range");
    *dims = set->dims_store[i].data();
    *values = set->values_store[i].data();
    *nnz = set->dims_store[i].size();
    return CTQ_OK;
}

void ctq_vecset_free(ctq_vecset* set) { delete set; }

ctq_status ctq_index_build(const ctq_vecset* set, int normalize, ctq_index** out) {
    if (!set || !out) return fail(CTQ_ERR_BAD_ARGUMENT, "NULL argument");
    return guarded([&] {
        auto* handle = new ctq_index{ctq::InvertedIndex::build(set->vectors, normalize != 0)};
        *out = handle;
    });
}

ctq_status ctq_index_save(const ctq_index* index, const char* dir) {
    if (!index || !dir) return fail(CTQ_ERR_BAD_ARGUMENT, "NULL argument");
    return guarded([&] { index->index.save(dir); });
}

ctq_status ctq_index_open(const char* dir, ctq_index** out) {
    if (!dir || !out) return fail(CTQ_ERR_BAD_ARGUMENT, "NULL argument");
    return guarded([&] { *out = new ctq_index{ctq::InvertedIndex::load(dir)}; });
}

void ctq_index_free(ctq_index* index) { delete index; }

uint32_t ctq_index_dims(const ctq_index* index) { return index ? index->index.dims() : 0; }
uint64_t ctq_index_size(const ctq_index* index) { return index ? index->index.size() : 0; }
uint32_t ctq_index_hull_gap(const ctq_index* index) {
    return index ? index->index.hull_gap() : 0;
}
uint64_t ctq_index_hull_vertices(const ctq_index* index) {
    return index ? index->index.hull_vertex_count() : 0;
}

void ctq_query_opts_init(ctq_query_opts* opts) {
    if (!opts) return;
    opts->theta = 0.0;
    opts->topk = 0;
    opts->strategy = CTQ_STRATEGY_HULL;
    opts->stop = CTQ_STOP_TIGHT;
    opts->tau_tilde = 0.0;
    opts->normalize = 1;
    opts->opt_budget = 0;
}

ctq_status ctq_query_run(const ctq_index* index, const uint32_t* dims, const double* values,
                         size_t nnz, const ctq_query_opts* opts, ctq_result** out) {
    if (!index || !opts || !out || nnz == 0 || !dims || !values)
        return fail(CTQ_ERR_BAD_ARGUMENT, "NULL argument or empty query");
    return guarded([&] {
        ctq::SparseVector q =
            ctq::SparseVector::make("q", std::span(dims, nnz), std::span(values, nnz));
        // run_query / run_topk normalize internally; the flag only matters
        // for score reporting semantics, which are normalization-invariant,
        // so it is accepted for interface symmetry with index building.
        (void)opts->normalize;

        ctq::Strategy strategy;
        switch (opts->strategy) {
            case CTQ_STRATEGY_LOCKSTEP: strategy = ctq::Strategy::Lockstep; break;
            case CTQ_STRATEGY_MAXRED: strategy = ctq::Strategy::MaxReduction; break;
            case CTQ_STRATEGY_HULL: strategy = ctq::Strategy::Hull; break;
            default:
                throw ctq::Error(ctq::ErrorCode::UnknownStrategy, "unknown strategy value");
        }

        auto* result = new ctq_result();
        try {
            if (opts->topk > 0) {
                ctq::TopKOptions topk;
                topk.strategy = strategy;
                topk.tau_tilde = opts->tau_tilde;
                result->matches = ctq::run_topk(index->index, q,
                                                static_cast<size_t>(opts->topk), topk,
                                                &result->stats);
            } else {
                ctq::QueryOptions qopts;
                qopts.strategy = strategy;
                qopts.stop = opts->stop == CTQ_STOP_BASELINE ? ctq::StopKind::Baseline
                                                             : ctq::StopKind::Tight;
                qopts.tau_tilde = opts->tau_tilde;
                qopts.opt_budget = opts->opt_budget;
                result->matches =
                    ctq::run_query(index->index, q, opts->theta, qopts, &result->stats);
            }
        } catch (...) {
            delete result;
            throw;
        }
        *out = result;
    });
}

size_t ctq_result_size(const ctq_result* result) { return result ? result->matches.size() : 0; }

const char* ctq_result_id(const ctq_result* result, size_t i) {
    if (!result || i >= result->matches.size()) return nullptr;
    return result->matches[i].id.c_str();
}

double ctq_result_score(const ctq_result* result, size_t i) {
    if (!result || i >= result->matches.size()) return 0.0;
    return result->matches[i].score;
}

void ctq_result_stats(const ctq_result* result, ctq_query_stats* out) {
    if (!result || !out) return;
    out->access_cost = result->stats.access_cost;
    out->candidate_count = result->stats.candidate_count;
    out->last_gap = result->stats.last_gap;
    out->epsilon_upper = result->stats.epsilon_upper;
    out->verification_accesses = result->stats.verification_accesses;
    out->result_count = result->stats.result_count;
    out->wall_time_micros = result->stats.wall_time_micros;
    out->opt_cost = result->stats.opt_cost;
}

size_t ctq_result_candidate_count(const ctq_result* result) {
    return result ? result->stats.candidates.size() : 0;
}

const char* ctq_result_candidate(const ctq_result* result, size_t i) {
    if (!result || i >= result->stats.candidates.size()) return nullptr;
    return result->stats.candidates[i].c_str();
}

void ctq_result_free(ctq_result* result) { delete result; }

}  // extern "C"
