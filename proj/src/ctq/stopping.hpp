#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "ctq/index.hpp"
#include "ctq/vectors.hpp"

namespace ctq {

/// Per-support-dimension cursors into the posting lists. pos[i] counts
/// consumed entries; the bound is the sentinel 1 before the first access,
/// the value of the last consumed entry while inside the list, and 0 once
/// the list is exhausted (no unseen vector has a positive value there).
struct Frontier {
    std::vector<uint32_t> dims;              // support dims, ascending
    std::vector<double> weights;             // q_i per support dim
    std::vector<const PostingList*> lists;   // nullptr when the dim has no postings
    std::vector<uint64_t> pos;
    uint64_t total = 0;                      // |b|

    static Frontier open(const InvertedIndex& index, const Query& q);

    size_t size() const { return dims.size(); }
    uint64_t list_size(size_t i) const { return lists[i] ? lists[i]->size() : 0; }
    bool exhausted(size_t i) const { return pos[i] >= list_size(i); }
    bool all_exhausted() const;

    double bound(size_t i) const {
        if (exhausted(i)) return 0.0;
        return pos[i] == 0 ? 1.0 : lists[i]->value_at(pos[i]);
    }

    /// Consumes the next entry on support dim i and returns it.
    const Posting& advance(size_t i);
};

/// Result of the max-similarity computation at a frontier.
/// tau is +inf in the degenerate all-constrained cases; infeasible marks a
/// frontier below which no unit vector exists at all (MS reported as 0).
struct TauResult {
    double tau = 1.0;
    double ms = 1.0;
    bool infeasible = false;

    static constexpr double kInfiniteTau = std::numeric_limits<double>::infinity();
};

/// Solves sum_i min{q_i * tau, bound_i}^2 = 1 over the support by sorting the
/// keys bound_i/q_i and scanning prefixes, then evaluates the max-similarity.
/// zero_weight_dims is the number of dimensions outside the support; with at
/// least one such dimension, leftover norm can always be absorbed at the
/// sentinel bound 1, otherwise an all-constrained frontier with
/// sum bound^2 < 1 is infeasible.
TauResult solve_tau_direct(std::span<const double> weights, std::span<const double> bounds,
                           uint64_t zero_weight_dims);

TauResult solve_tau_direct(const Frontier& frontier, uint64_t zero_weight_dims);

/// sum_i q_i * bound_i over the support.
double baseline_value(const Frontier& frontier);

/// Baseline stopping condition: sum q_i * L_i[b_i] below theta.
bool baseline_stop(const Frontier& frontier, double theta);

/// Order-augmented balanced search tree over the support dimensions, keyed by
/// bound_i/q_i, with subtree sums of L*q, q^2 and L^2. Maintains tau and the
/// max-similarity under single-bound updates in O(log d). Per-query mutable
/// state; not shared across threads.
class TauState {
public:
    TauState(std::span<const double> weights, std::span<const double> bounds,
             uint64_t zero_weight_dims);

    /// Re-keys one support dim to a smaller bound. Throws UnknownDim for an
    /// out-of-range index and InvalidBound if the bound would grow.
    void update(size_t support_idx, double new_bound);

    /// Descends the tree once; O(log d). Equivalent to solve_tau_direct on
    /// the current bounds.
    TauResult compute() const;

    size_t size() const { return nodes_.size(); }
    double bound(size_t support_idx) const { return nodes_[support_idx].bound; }

    /// Recomputes every subtree aggregate from scratch and checks it against
    /// the maintained value (test hook; returns the max absolute deviation).
    double audit_aggregates() const;

private:
    struct Node {
        double key = 0.0;     // bound / weight
        double bound = 0.0;
        double weight = 0.0;
        double lq = 0.0, q2 = 0.0, l2 = 0.0;     // own contributions
        double s_lq = 0.0, s_q2 = 0.0, s_l2 = 0.0;  // subtree sums
        uint32_t count = 0;   // subtree size
        int32_t left = -1, right = -1;
        int32_t height = 1;
    };

    bool less(int32_t a, int32_t b) const;
    void pull(int32_t n);
    int32_t rotate_left(int32_t n);
    int32_t rotate_right(int32_t n);
    int32_t balance(int32_t n);
    int32_t insert(int32_t root, int32_t n);
    int32_t erase(int32_t root, int32_t n);
    int32_t detach_min(int32_t root, int32_t& min_out);

    std::vector<Node> nodes_;
    int32_t root_ = -1;
    double q2_total_ = 0.0;
    uint64_t zero_weight_dims_ = 0;
};

/// Tight-and-complete stopping condition: max-similarity below theta
/// (an infeasible frontier stops unconditionally).
bool tight_stop(const TauState& state, double theta);

}  // namespace ctq
