#include "ctq/traversal.hpp"

#include <algorithm>
#include <cmath>

namespace ctq {

std::vector<uint64_t> project_hull(const PostingList& list, const HullIndex& hull, double weight,
                                   double tau_tilde) {
    const auto& v = hull.vertices;
    if (v.size() <= 2) return v;
    double cap = weight * tau_tilde;
    // First interior vertex v_k with
    //   (cap - L[v_k]) / v_k >= (L[v_k] - L[v_{k+1}]) / (v_{k+1} - v_k),
    // cross-multiplied (gaps and positions are positive). The retained set is
    // a suffix, so a binary search finds the cut.
    auto keeps = [&](size_t k) {
        double val_k = list.value_at(v[k]);
        double val_next = list.value_at(v[k + 1]);
        double lhs = (cap - val_k) * static_cast<double>(v[k + 1] - v[k]);
        double rhs = (val_k - val_next) * static_cast<double>(v[k]);
        return lhs >= rhs;
    };
    size_t lo = 1, hi = v.size() - 1;  // interior vertices are [1, size-2]
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (mid == v.size() - 1 || keeps(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    std::vector<uint64_t> out;
    out.reserve(v.size() - lo + 1);
    out.push_back(0);
    out.insert(out.end(), v.begin() + static_cast<ptrdiff_t>(lo), v.end());
    return out;
}

std::vector<double> hull_deltas(const PostingList& list, std::span<const uint64_t> vertices,
                                double weight, const DecomposableScore& score) {
    std::vector<double> rates;
    if (vertices.size() < 2) return rates;
    rates.reserve(vertices.size() - 1);
    for (size_t k = 0; k + 1 < vertices.size(); ++k) {
        double drop = score.component(weight, list.value_at(vertices[k])) -
                      score.component(weight, list.value_at(vertices[k + 1]));
        rates.push_back(drop / static_cast<double>(vertices[k + 1] - vertices[k]));
    }
    return rates;
}

double epsilon_bound(double ms_at_boundary, double f_tilde_at_boundary, double tau_tilde) {
    double overshoot = std::max(0.0, tau_tilde - 1.0 / ms_at_boundary);
    return std::max(0.0, overshoot + (ms_at_boundary - f_tilde_at_boundary));
}

size_t LockstepStrategy::next(const Frontier& frontier) {
    const size_t m = frontier.size();
    if (m == 0) throw Error(ErrorCode::AllExhausted, "no support dims");
    size_t j = static_cast<size_t>(frontier.total % m);
    for (size_t tried = 0; tried < m; ++tried) {
        size_t i = (j + tried) % m;
        if (!frontier.exhausted(i)) return i;
    }
    throw Error(ErrorCode::AllExhausted, "all support lists exhausted");
}

size_t MaxReductionStrategy::next(const Frontier& frontier) {
    size_t best = frontier.size();
    double best_drop = -1.0;
    for (size_t i = 0; i < frontier.size(); ++i) {
        if (frontier.exhausted(i)) continue;
        double w = frontier.weights[i];
        double current = score_.component(w, frontier.lists[i]->value_at(frontier.pos[i]));
        double after = score_.component(w, frontier.lists[i]->value_at(frontier.pos[i] + 1));
        double drop = current - after;
        if (drop > best_drop) {
            best_drop = drop;
            best = i;
        }
    }
    if (best == frontier.size())
        throw Error(ErrorCode::AllExhausted, "all support lists exhausted");
    return best;
}

HullStrategy::HullStrategy(const Frontier& frontier, std::vector<std::vector<uint64_t>> hulls,
                           std::vector<std::vector<double>> rates)
    : hulls_(std::move(hulls)), rates_(std::move(rates)), segment_(hulls_.size(), 0) {
    for (size_t i = 0; i < hulls_.size(); ++i) {
        if (frontier.exhausted(i) || rates_[i].empty()) continue;
        queue_.push({rates_[i][0], i, 0});
    }
}

size_t HullStrategy::next(const Frontier& frontier) {
    while (!queue_.empty()) {
        const QueueEntry& top = queue_.top();
        if (top.segment != segment_[top.idx] || frontier.exhausted(top.idx)) {
            queue_.pop();  // stale
            continue;
        }
        return top.idx;
    }
    throw Error(ErrorCode::AllExhausted, "all support lists exhausted");
}

void HullStrategy::advanced(const Frontier& frontier, size_t i) {
    const auto& vertices = hulls_[i];
    size_t seg = segment_[i];
    if (seg + 1 >= vertices.size()) return;
    if (frontier.pos[i] == vertices[seg + 1]) {
        segment_[i] = ++seg;
        if (!frontier.exhausted(i) && seg < rates_[i].size())
            queue_.push({rates_[i][seg], i, seg});
    }
}

}  // namespace ctq
