#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctq/index.hpp"
#include "ctq/stopping.hpp"
#include "ctq/traversal.hpp"
#include "ctq/verify.hpp"

namespace ctq {

struct GatherMetrics {
    uint64_t access_cost = 0;       // sum of cursors at stop
    uint64_t candidate_count = 0;
    uint64_t last_gap = 0;          // |b_stop| - |b| at the last hull boundary
    double epsilon_upper = 0.0;     // cosine-approximation bound at that boundary
    double ms_at_boundary = 1.0;
    double f_tilde_at_boundary = 0.0;
    uint64_t strategy_hull_gap = 0;  // convexity constant of the hulls in use
    bool stopped_by_exhaustion = false;
};

struct GatherOptions {
    Strategy strategy = Strategy::Hull;
    StopKind stop = StopKind::Tight;
    double tau_tilde = 0.0;    // 0 selects the default 1/theta
    bool record_path = false;  // keep the per-move support indices
};

struct GatherResult {
    std::vector<uint64_t> pool;  // candidate refs, encounter order, deduplicated
    Frontier frontier;
    GatherMetrics metrics;
    std::vector<size_t> path;  // when record_path
};

/// Gathering phase: advance cursors under the chosen strategy until the
/// stopping condition fires or every support list is exhausted. Every vector
/// whose cosine can reach theta is in the pool when this returns.
GatherResult gather(const InvertedIndex& index, const Query& q, const GatherOptions& options = {});

struct Match {
    uint64_t ref;
    std::string id;
    double score;
};

struct QueryStats {
    uint64_t access_cost = 0;
    uint64_t candidate_count = 0;
    uint64_t last_gap = 0;
    double epsilon_upper = 0.0;
    uint64_t verification_accesses = 0;
    uint64_t result_count = 0;
    uint64_t wall_time_micros = 0;
    int64_t opt_cost = -1;  // filled only when an OPT budget was given
    std::vector<std::string> candidates;  // pooled ids, ascending
};

struct QueryOptions {
    Strategy strategy = Strategy::Hull;
    StopKind stop = StopKind::Tight;
    double tau_tilde = 0.0;
    uint64_t opt_budget = 0;  // max lattice positions for the OPT oracle; 0 = skip
};

/// Threshold query: gather, then verify each pooled candidate. The query
/// vector is unit-normalized internally; results are exact and sorted by
/// score descending, ties by ascending id.
std::vector<Match> run_query(const InvertedIndex& index, const SparseVector& query, double theta,
                             const QueryOptions& options = {}, QueryStats* stats = nullptr);

struct TopKOptions {
    Strategy strategy = Strategy::Lockstep;
    double tau_tilde = 0.0;  // >0 switches the hull strategy to capped hulls
};

/// Top-k query: gathering with the k-th best exact score as a moving
/// threshold; exact scores are computed when a candidate is first pooled.
/// Returns the k best matches (score descending, ties by ascending id).
std::vector<Match> run_topk(const InvertedIndex& index, const SparseVector& query, size_t k,
                            const TopKOptions& options = {}, QueryStats* stats = nullptr);

/// Ground-truth oracle: full scan of the store with exact cosines.
/// Normalizes the query exactly like run_query.
std::vector<Match> linear_scan(const InvertedIndex& index, const SparseVector& query,
                               double theta);

struct OptCost {
    uint64_t opt = 0;
    bool interior = false;  // some optimal position touches no list end
};

/// Minimum access cost: exhaustive scan of the cursor lattice for the
/// smallest |b| satisfying the stopping condition. Guarded by max_positions
/// (throws InstanceTooLarge beyond it).
OptCost brute_force_opt(const InvertedIndex& index, const Query& q, StopKind stop,
                        uint64_t max_positions = 1000000);

/// Number of dimensions the stop model ranges over: the index dimensionality
/// extended by any higher query dims.
uint64_t effective_dims(const InvertedIndex& index, const SparseVector& query);

}  // namespace ctq
