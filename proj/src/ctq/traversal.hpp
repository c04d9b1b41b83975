#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "ctq/index.hpp"
#include "ctq/stopping.hpp"

namespace ctq {

enum class Strategy { Lockstep, MaxReduction, Hull };
enum class StopKind { Baseline, Tight };

/// Coordinate-wise decomposable score with non-decreasing components.
/// Built-ins: inner product f_i(x) = q_i * x, and the capped cosine
/// approximation f_i(x) = min{q_i * tauTilde, x} * q_i.
struct DecomposableScore {
    enum class Kind { InnerProduct, CappedCosine };
    Kind kind = Kind::InnerProduct;
    double tau_tilde = 0.0;

    static DecomposableScore inner_product() { return {Kind::InnerProduct, 0.0}; }
    static DecomposableScore capped_cosine(double tau_tilde) {
        return {Kind::CappedCosine, tau_tilde};
    }

    double component(double weight, double x) const {
        if (kind == Kind::CappedCosine) {
            double cap = weight * tau_tilde;
            return (x < cap ? x : cap) * weight;
        }
        return weight * x;
    }
};

/// Query-time projection of a precomputed hull for the capped component
/// function: binary search for the first interior vertex that stays convex
/// under the cap q_i * tauTilde at position 0; the result is {0} followed by
/// the retained suffix (the last vertex is always kept).
std::vector<uint64_t> project_hull(const PostingList& list, const HullIndex& hull, double weight,
                                   double tau_tilde);

/// Per-segment reduction rates for one dim's hull: for consecutive vertices
/// v_k, v_{k+1}, the rate (f(L[v_k]) - f(L[v_{k+1}])) / (v_{k+1} - v_k)
/// applies to every position in [v_k, v_{k+1}).
std::vector<double> hull_deltas(const PostingList& list, std::span<const uint64_t> vertices,
                                double weight, const DecomposableScore& score);

/// Upper bound on the cosine approximation error given the max-similarity
/// and the decomposable approximation at the last hull-boundary position:
/// max{0, tauTilde - 1/ms} + (ms - fTilde), clamped below at 0.
double epsilon_bound(double ms_at_boundary, double f_tilde_at_boundary, double tau_tilde);

/// Chooses which support list the gathering loop advances next. Stateful and
/// per-query; decisions read only the partial observation plus precomputed
/// hulls.
class TraversalStrategy {
public:
    virtual ~TraversalStrategy() = default;

    /// Returns the support index to advance. Throws AllExhausted when no
    /// live dim remains.
    virtual size_t next(const Frontier& frontier) = 0;

    /// Hook invoked after the frontier advanced on support index i.
    virtual void advanced(const Frontier& frontier, size_t i) { (void)frontier; (void)i; }
};

/// Round-robin over non-exhausted support dims: nz[|b| mod m], advancing the
/// modulus scan past exhausted dims.
class LockstepStrategy : public TraversalStrategy {
public:
    size_t next(const Frontier& frontier) override;
};

/// Greedy one-step lookahead: the dim whose next move yields the maximal
/// component reduction; ties broken by ascending dim.
class MaxReductionStrategy : public TraversalStrategy {
public:
    explicit MaxReductionStrategy(DecomposableScore score) : score_(score) {}
    size_t next(const Frontier& frontier) override;

private:
    DecomposableScore score_;
};

/// Hull-rate strategy: a max-priority queue over support dims keyed by the
/// current segment's reduction rate (ties by ascending dim); O(log d) per
/// decision. Dims leave the queue permanently on exhaustion.
class HullStrategy : public TraversalStrategy {
public:
    /// hulls[i]/rates[i] describe support dim i (rates per segment).
    HullStrategy(const Frontier& frontier, std::vector<std::vector<uint64_t>> hulls,
                 std::vector<std::vector<double>> rates);

    size_t next(const Frontier& frontier) override;
    void advanced(const Frontier& frontier, size_t i) override;

private:
    struct QueueEntry {
        double rate;
        size_t idx;
        size_t segment;
    };
    struct Lower {
        bool operator()(const QueueEntry& a, const QueueEntry& b) const {
            if (a.rate != b.rate) return a.rate < b.rate;
            return a.idx > b.idx;
        }
    };

    std::vector<std::vector<uint64_t>> hulls_;
    std::vector<std::vector<double>> rates_;
    std::vector<size_t> segment_;
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, Lower> queue_;
};

}  // namespace ctq
