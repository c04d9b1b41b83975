#pragma once

#include <cstdint>
#include <vector>

#include "ctq/index.hpp"
#include "ctq/vectors.hpp"

namespace ctq {

/// Query-side data shared by verification and scoring: support entries in
/// dim order, the same entries ordered by ascending weight (for the
/// min-unobserved-weight bound), norms, and the effective dimensionality.
class VerifyContext {
public:
    VerifyContext(const SparseVector& query, uint64_t total_dims);

    const SparseVector& query() const { return query_; }
    double norm() const { return norm_; }
    double weight_sq_total() const { return weight_sq_total_; }
    uint64_t total_dims() const { return total_dims_; }
    size_t support_size() const { return query_.nnz(); }

    /// Index into the support for a dim, or npos when the query is zero there.
    size_t support_index(uint32_t dim) const;
    static constexpr size_t npos = static_cast<size_t>(-1);

    /// Support indices ordered by ascending weight.
    const std::vector<uint32_t>& ascending_weight_order() const { return asc_order_; }

private:
    SparseVector query_;
    double norm_ = 0.0;
    double weight_sq_total_ = 0.0;
    uint64_t total_dims_ = 0;
    std::vector<uint32_t> asc_order_;
};

/// Accumulators over an observed prefix of one candidate. Bounds hold for
/// every unit completion of the view:
///   ub = partialDot + sqrt(1 - sSq) * sqrt(qSq_unobserved)
///   lb = partialDot + sqrt(1 - sSq) * min unobserved weight
struct PartialView {
    explicit PartialView(const VerifyContext& ctx);

    void observe(uint32_t dim, double value);

    double partial_dot() const { return partial_dot_; }
    double s_sq() const { return s_sq_; }
    double q_sq_observed() const { return q_sq_observed_; }
    double q_min_unobserved() const;

    struct Bounds {
        double lb;
        double ub;
    };
    Bounds bounds() const;

private:
    const VerifyContext* ctx_;
    double partial_dot_ = 0.0;
    double s_sq_ = 0.0;
    double q_sq_observed_ = 0.0;
    uint64_t observed_total_ = 0;
    uint64_t observed_support_ = 0;
    std::vector<char> support_observed_;
    mutable size_t asc_cursor_ = 0;
};

struct VerifyOutcome {
    bool accept;
    uint64_t accesses;
};

/// Exact cosine between the stored candidate and the query; the single
/// scoring routine shared by verification, the linear-scan oracle and result
/// reporting, so their decisions are bit-identical.
double exact_cosine(const StoredVector& candidate, const VerifyContext& ctx);

/// Scans the candidate's entries in descending-value order, maintaining the
/// partial view; accepts as soon as lb clears theta, rejects as soon as ub
/// falls below it, and falls back to the exact comparison on a full scan.
/// The decision always equals (exact_cosine >= effective theta).
VerifyOutcome verify_candidate(const StoredVector& candidate, const VerifyContext& ctx,
                               double theta);

}  // namespace ctq
