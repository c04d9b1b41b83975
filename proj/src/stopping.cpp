#include "ctq/stopping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace ctq {

Frontier Frontier::open(const InvertedIndex& index, const Query& q) {
    Frontier f;
    f.dims.reserve(q.support_size());
    f.weights.reserve(q.support_size());
    f.lists.reserve(q.support_size());
    for (const Entry& e : q.support()) {
        f.dims.push_back(e.dim);
        f.weights.push_back(e.value);
        f.lists.push_back(index.list(e.dim));
    }
    f.pos.assign(f.dims.size(), 0);
    return f;
}

bool Frontier::all_exhausted() const {
    for (size_t i = 0; i < size(); ++i)
        if (!exhausted(i)) return false;
    return true;
}

const Posting& Frontier::advance(size_t i) {
    ++pos[i];
    ++total;
    return lists[i]->postings[pos[i] - 1];
}

double baseline_value(const Frontier& frontier) {
    double s = 0.0;
    for (size_t i = 0; i < frontier.size(); ++i) s += frontier.weights[i] * frontier.bound(i);
    return s;
}

bool baseline_stop(const Frontier& frontier, double theta) {
    return baseline_value(frontier) < effective_theta(theta);
}

namespace {

// Shared tail of both solvers: finish from the constrained-prefix sums.
// count == m means every support dim is constrained.
TauResult finish(double lq, double q2, double l2, size_t count, size_t m, double q2_total,
                 uint64_t zero_weight_dims) {
    TauResult r;
    if (count == m) {
        // All support dims capped by their bounds. Any leftover norm has to
        // live on zero-weight dims (sentinel bound 1, objective contribution
        // zero); without such dims the frontier admits no unit vector.
        r.tau = TauResult::kInfiniteTau;
        if (zero_weight_dims == 0 && l2 < 1.0) {
            r.infeasible = true;
            r.ms = 0.0;
        } else {
            r.ms = lq;
        }
        return r;
    }
    double denom = q2_total - q2;
    r.tau = std::sqrt(std::max(0.0, 1.0 - l2) / denom);
    r.ms = lq + denom * r.tau;
    return r;
}

}  // namespace

TauResult solve_tau_direct(std::span<const double> weights, std::span<const double> bounds,
                           uint64_t zero_weight_dims) {
    const size_t m = weights.size();
    if (m == 0) return {TauResult::kInfiniteTau, 0.0, false};
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::vector<double> keys(m);
    double q2_total = 0.0;
    for (size_t i = 0; i < m; ++i) {
        keys[i] = bounds[i] / weights[i];
        q2_total += weights[i] * weights[i];
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return a < b;
    });

    // Largest prefix k (by key order) such that capping dims 1..k at their
    // bounds and the rest at q_i * key_k keeps the norm at most 1; tau then
    // lies between key_k and key_{k+1}.
    double lq = 0.0, q2 = 0.0, l2 = 0.0;
    double best_lq = 0.0, best_q2 = 0.0, best_l2 = 0.0;
    size_t best_count = 0;
    for (size_t k = 0; k < m; ++k) {
        size_t i = order[k];
        lq += bounds[i] * weights[i];
        q2 += weights[i] * weights[i];
        l2 += bounds[i] * bounds[i];
        double key = keys[i];
        if (l2 + (q2_total - q2) * key * key <= 1.0) {
            best_lq = lq;
            best_q2 = q2;
            best_l2 = l2;
            best_count = k + 1;
        }
    }
    if (best_count == 0) {
        TauResult r;
        r.tau = std::sqrt(1.0 / q2_total);
        r.ms = q2_total * r.tau;
        return r;
    }
    return finish(best_lq, best_q2, best_l2, best_count, m, q2_total, zero_weight_dims);
}

TauResult solve_tau_direct(const Frontier& frontier, uint64_t zero_weight_dims) {
    std::vector<double> bounds(frontier.size());
    for (size_t i = 0; i < frontier.size(); ++i) bounds[i] = frontier.bound(i);
    return solve_tau_direct(frontier.weights, bounds, zero_weight_dims);
}

TauState::TauState(std::span<const double> weights, std::span<const double> bounds,
                   uint64_t zero_weight_dims)
    : zero_weight_dims_(zero_weight_dims) {
    nodes_.resize(weights.size());
    for (size_t i = 0; i < weights.size(); ++i) {
        Node& n = nodes_[i];
        n.weight = weights[i];
        n.bound = bounds[i];
        n.key = n.bound / n.weight;
        n.lq = n.bound * n.weight;
        n.q2 = n.weight * n.weight;
        n.l2 = n.bound * n.bound;
        q2_total_ += n.q2;
    }
    for (int32_t i = 0; i < static_cast<int32_t>(nodes_.size()); ++i) root_ = insert(root_, i);
}

bool TauState::less(int32_t a, int32_t b) const {
    if (nodes_[a].key != nodes_[b].key) return nodes_[a].key < nodes_[b].key;
    return a < b;
}

void TauState::pull(int32_t n) {
    Node& x = nodes_[n];
    x.s_lq = x.lq;
    x.s_q2 = x.q2;
    x.s_l2 = x.l2;
    x.count = 1;
    x.height = 1;
    for (int32_t c : {x.left, x.right}) {
        if (c < 0) continue;
        const Node& y = nodes_[c];
        x.s_lq += y.s_lq;
        x.s_q2 += y.s_q2;
        x.s_l2 += y.s_l2;
        x.count += y.count;
        x.height = std::max(x.height, y.height + 1);
    }
}

int32_t TauState::rotate_left(int32_t n) {
    int32_t r = nodes_[n].right;
    nodes_[n].right = nodes_[r].left;
    nodes_[r].left = n;
    pull(n);
    pull(r);
    return r;
}

int32_t TauState::rotate_right(int32_t n) {
    int32_t l = nodes_[n].left;
    nodes_[n].left = nodes_[l].right;
    nodes_[l].right = n;
    pull(n);
    pull(l);
    return l;
}

int32_t TauState::balance(int32_t n) {
    pull(n);
    auto height = [&](int32_t c) { return c < 0 ? 0 : nodes_[c].height; };
    int bf = height(nodes_[n].left) - height(nodes_[n].right);
    if (bf > 1) {
        if (height(nodes_[nodes_[n].left].left) < height(nodes_[nodes_[n].left].right))
            nodes_[n].left = rotate_left(nodes_[n].left);
        return rotate_right(n);
    }
    if (bf < -1) {
        if (height(nodes_[nodes_[n].right].right) < height(nodes_[nodes_[n].right].left))
            nodes_[n].right = rotate_right(nodes_[n].right);
        return rotate_left(n);
    }
    return n;
}

int32_t TauState::insert(int32_t root, int32_t n) {
    if (root < 0) {
        nodes_[n].left = nodes_[n].right = -1;
        pull(n);
        return n;
    }
    if (less(n, root))
        nodes_[root].left = insert(nodes_[root].left, n);
    else
        nodes_[root].right = insert(nodes_[root].right, n);
    return balance(root);
}

int32_t TauState::detach_min(int32_t root, int32_t& min_out) {
    if (nodes_[root].left < 0) {
        min_out = root;
        return nodes_[root].right;
    }
    nodes_[root].left = detach_min(nodes_[root].left, min_out);
    return balance(root);
}

int32_t TauState::erase(int32_t root, int32_t n) {
    if (root == n) {
        if (nodes_[root].left < 0) return nodes_[root].right;
        if (nodes_[root].right < 0) return nodes_[root].left;
        int32_t successor = -1;
        int32_t right = detach_min(nodes_[root].right, successor);
        nodes_[successor].left = nodes_[root].left;
        nodes_[successor].right = right;
        return balance(successor);
    }
    if (less(n, root))
        nodes_[root].left = erase(nodes_[root].left, n);
    else
        nodes_[root].right = erase(nodes_[root].right, n);
    return balance(root);
}

void TauState::update(size_t support_idx, double new_bound) {
    if (support_idx >= nodes_.size())
        throw Error(ErrorCode::UnknownDim,
                    "support index " + std::to_string(support_idx) + " out of range");
    Node& n = nodes_[support_idx];
    if (new_bound > n.bound)
        throw Error(ErrorCode::InvalidBound, "bounds are non-increasing along a traversal");
    root_ = erase(root_, static_cast<int32_t>(support_idx));
    n.bound = new_bound;
    n.key = new_bound / n.weight;
    n.lq = new_bound * n.weight;
    n.l2 = new_bound * new_bound;
    root_ = insert(root_, static_cast<int32_t>(support_idx));
}

TauResult TauState::compute() const {
    if (nodes_.empty()) return {TauResult::kInfiniteTau, 0.0, false};
    // Find the largest key whose prefix (all dims with keys up to and
    // including it, capped at their bounds) still fits under norm 1; record
    // that prefix's sums and finish with the closed form.
    double lq_parent = 0.0, q2_parent = 0.0, l2_parent = 0.0;
    uint32_t count_parent = 0;
    double best_lq = 0.0, best_q2 = 0.0, best_l2 = 0.0;
    uint32_t best_count = 0;
    bool found = false;
    int32_t n = root_;
    while (n >= 0) {
        const Node& x = nodes_[n];
        double lq = lq_parent + x.lq, q2 = q2_parent + x.q2, l2 = l2_parent + x.l2;
        uint32_t count = count_parent + 1;
        if (x.left >= 0) {
            const Node& l = nodes_[x.left];
            lq += l.s_lq;
            q2 += l.s_q2;
            l2 += l.s_l2;
            count += l.count;
        }
        if (l2 + (q2_total_ - q2) * x.key * x.key <= 1.0) {
            found = true;
            best_lq = lq;
            best_q2 = q2;
            best_l2 = l2;
            best_count = count;
            lq_parent = lq;
            q2_parent = q2;
            l2_parent = l2;
            count_parent = count;
            n = x.right;
        } else {
            n = x.left;
        }
    }
    if (!found) {
        TauResult r;
        r.tau = std::sqrt(1.0 / q2_total_);
        r.ms = q2_total_ * r.tau;
        return r;
    }
    return finish(best_lq, best_q2, best_l2, best_count, nodes_.size(), q2_total_,
                  zero_weight_dims_);
}

double TauState::audit_aggregates() const {
    double worst = 0.0;
    auto walk = [&](auto&& self, int32_t n) -> std::array<double, 4> {
        if (n < 0) return {0.0, 0.0, 0.0, 0.0};
        const Node& x = nodes_[n];
        auto l = self(self, x.left);
        auto r = self(self, x.right);
        std::array<double, 4> sum = {l[0] + r[0] + x.lq, l[1] + r[1] + x.q2,
                                     l[2] + r[2] + x.l2, l[3] + r[3] + 1.0};
        worst = std::max({worst, std::abs(sum[0] - x.s_lq), std::abs(sum[1] - x.s_q2),
                          std::abs(sum[2] - x.s_l2), std::abs(sum[3] - x.count)});
        return sum;
    };
    walk(walk, root_);
    return worst;
}

bool tight_stop(const TauState& state, double theta) {
    TauResult r = state.compute();
    if (r.infeasible) return true;
    return r.ms < effective_theta(theta);
}

}  // namespace ctq
