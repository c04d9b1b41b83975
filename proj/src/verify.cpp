#include "ctq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctq {

VerifyContext::VerifyContext(const SparseVector& query, uint64_t total_dims)
    : query_(query), total_dims_(total_dims) {
    weight_sq_total_ = query_.norm_sq();
    norm_ = std::sqrt(weight_sq_total_);
    asc_order_.resize(query_.nnz());
    std::iota(asc_order_.begin(), asc_order_.end(), 0u);
    const auto& entries = query_.entries();
    std::sort(asc_order_.begin(), asc_order_.end(), [&](uint32_t a, uint32_t b) {
        if (entries[a].value != entries[b].value) return entries[a].value < entries[b].value;
        return entries[a].dim < entries[b].dim;
    });
    total_dims_ = std::max<uint64_t>(total_dims_, query_.dim_bound());
}

size_t VerifyContext::support_index(uint32_t dim) const {
    const auto& entries = query_.entries();
    auto it = std::lower_bound(entries.begin(), entries.end(), dim,
                               [](const Entry& e, uint32_t d) { return e.dim < d; });
    if (it == entries.end() || it->dim != dim) return npos;
    return static_cast<size_t>(it - entries.begin());
}

PartialView::PartialView(const VerifyContext& ctx)
    : ctx_(&ctx), support_observed_(ctx.support_size(), 0) {}

void PartialView::observe(uint32_t dim, double value) {
    ++observed_total_;
    s_sq_ += value * value;
    size_t idx = ctx_->support_index(dim);
    if (idx != VerifyContext::npos) {
        double w = ctx_->query().entries()[idx].value;
        partial_dot_ += value * w;
        q_sq_observed_ += w * w;
        support_observed_[idx] = 1;
        ++observed_support_;
    }
}

double PartialView::q_min_unobserved() const {
    uint64_t unobserved_total = ctx_->total_dims() - observed_total_;
    uint64_t unobserved_support = ctx_->support_size() - observed_support_;
    if (unobserved_total > unobserved_support) return 0.0;  // some zero-weight dim unseen
    if (unobserved_support == 0) return 0.0;
    const auto& order = ctx_->ascending_weight_order();
    while (asc_cursor_ < order.size() && support_observed_[order[asc_cursor_]]) ++asc_cursor_;
    return asc_cursor_ < order.size() ? ctx_->query().entries()[order[asc_cursor_]].value : 0.0;
}

PartialView::Bounds PartialView::bounds() const {
    double s_rem = std::sqrt(std::max(0.0, 1.0 - s_sq_));
    double q_rem = std::sqrt(std::max(0.0, ctx_->weight_sq_total() - q_sq_observed_));
    double lb = partial_dot_ + s_rem * q_min_unobserved();
    double ub = partial_dot_ + s_rem * q_rem;
    return {lb, ub};
}

double exact_cosine(const StoredVector& candidate, const VerifyContext& ctx) {
    return dot(candidate.vector, ctx.query()) / (candidate.norm * ctx.norm());
}

VerifyOutcome verify_candidate(const StoredVector& candidate, const VerifyContext& ctx,
                               double theta) {
    const double eff = effective_theta(theta);
    const auto& entries = candidate.vector.entries();
    PartialView view(ctx);
    uint64_t accesses = 0;
    for (uint32_t pos : candidate.value_order) {
        const Entry& e = entries[pos];
        view.observe(e.dim, e.value);
        ++accesses;
        auto [lb, ub] = view.bounds();
        if (lb >= eff + kVerifyBoundMargin) return {true, accesses};
        if (ub < eff - kVerifyBoundMargin) return {false, accesses};
    }
    return {exact_cosine(candidate, ctx) >= eff, accesses};
}

}  // namespace ctq
