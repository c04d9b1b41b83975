#include "ctq/index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctq {

uint64_t HullIndex::max_gap() const {
    uint64_t gap = 0;
    for (size_t k = 1; k < vertices.size(); ++k)
        gap = std::max(gap, vertices[k] - vertices[k - 1]);
    return gap;
}

std::vector<uint64_t> lower_hull(std::span<const double> values) {
    // Points are (0, 1), (1, values[0]), ..., (n, values[n-1]).
    const size_t n = values.size();
    std::vector<uint64_t> hull;
    hull.reserve(n + 1);
    hull.push_back(0);
    auto val = [&](uint64_t pos) { return pos == 0 ? 1.0 : values[pos - 1]; };
    for (uint64_t j = 1; j <= n; ++j) {
        // Keep slopes strictly increasing; pop also on collinear.
        while (hull.size() >= 2) {
            uint64_t a = hull[hull.size() - 2];
            uint64_t b = hull[hull.size() - 1];
            // slope(a,b) >= slope(b,j), cross-multiplied with positive gaps
            double lhs = (val(b) - val(a)) * static_cast<double>(j - b);
            double rhs = (val(j) - val(b)) * static_cast<double>(b - a);
            if (lhs >= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(j);
    }
    return hull;
}

InvertedIndex InvertedIndex::build(std::vector<SparseVector> db, bool normalize_vectors,
                                   uint32_t dims) {
    InvertedIndex index;
    index.store_.reserve(db.size());
    uint32_t max_dim_bound = 0;
    for (auto& v : db) {
        SparseVector sv = normalize_vectors ? normalize(v) : std::move(v);
        if (dims != 0 && sv.dim_bound() > dims)
            throw Error(ErrorCode::DimensionOutOfRange,
                        "vector '" + sv.id() + "' has dim " +
                            std::to_string(sv.dim_bound() - 1) + " >= " + std::to_string(dims));
        max_dim_bound = std::max(max_dim_bound, sv.dim_bound());
        index.store_.push_back({std::move(sv), {}});
    }
    index.dims_ = dims != 0 ? dims : max_dim_bound;

    std::unordered_map<uint32_t, std::vector<Posting>> buckets;
    for (uint64_t ref = 0; ref < index.store_.size(); ++ref) {
        for (const Entry& e : index.store_[ref].vector.entries())
            buckets[e.dim].push_back({ref, e.value});
    }

    std::vector<uint32_t> present;
    present.reserve(buckets.size());
    for (const auto& [dim, _] : buckets) present.push_back(dim);
    std::sort(present.begin(), present.end());

    index.lists_.reserve(present.size());
    index.hulls_.reserve(present.size());
    uint64_t gap = 0;
    for (uint32_t dim : present) {
        PostingList list;
        list.dim = dim;
        list.postings = std::move(buckets[dim]);
        std::sort(list.postings.begin(), list.postings.end(),
                  [&](const Posting& a, const Posting& b) {
                      if (a.value != b.value) return a.value > b.value;
                      return index.store_[a.ref].vector.id() < index.store_[b.ref].vector.id();
                  });
        std::vector<double> values(list.postings.size());
        for (size_t i = 0; i < values.size(); ++i) values[i] = list.postings[i].value;
        HullIndex hull;
        hull.dim = dim;
        hull.vertices = lower_hull(values);
        gap = std::max(gap, hull.max_gap());
        index.lists_.push_back(std::move(list));
        index.hulls_.push_back(std::move(hull));
    }
    index.hull_gap_ = static_cast<uint32_t>(gap);
    index.finalize();
    return index;
}

void InvertedIndex::finalize() {
    dim_to_list_.clear();
    dim_to_list_.reserve(lists_.size());
    for (uint32_t i = 0; i < lists_.size(); ++i) dim_to_list_[lists_[i].dim] = i;

    id_to_ref_.clear();
    id_to_ref_.reserve(store_.size());
    for (uint64_t ref = 0; ref < store_.size(); ++ref) {
        const std::string& id = store_[ref].vector.id();
        if (!id_to_ref_.emplace(id, ref).second)
            throw Error(ErrorCode::DuplicateId, "duplicate vector id '" + id + "'");
    }

    for (StoredVector& sv : store_) {
        sv.norm = sv.vector.norm();
        const auto& entries = sv.vector.entries();
        sv.value_order.resize(entries.size());
        std::iota(sv.value_order.begin(), sv.value_order.end(), 0u);
        std::sort(sv.value_order.begin(), sv.value_order.end(), [&](uint32_t a, uint32_t b) {
            if (entries[a].value != entries[b].value) return entries[a].value > entries[b].value;
            return entries[a].dim < entries[b].dim;
        });
    }
}

uint64_t InvertedIndex::hull_vertex_count() const {
    uint64_t total = 0;
    for (const HullIndex& h : hulls_) total += h.vertices.size();
    return total;
}

const PostingList* InvertedIndex::list(uint32_t dim) const {
    auto it = dim_to_list_.find(dim);
    return it == dim_to_list_.end() ? nullptr : &lists_[it->second];
}

const HullIndex* InvertedIndex::hull(uint32_t dim) const {
    auto it = dim_to_list_.find(dim);
    return it == dim_to_list_.end() ? nullptr : &hulls_[it->second];
}

std::optional<uint64_t> InvertedIndex::find(const std::string& id) const {
    auto it = id_to_ref_.find(id);
    if (it == id_to_ref_.end()) return std::nullopt;
    return it->second;
}

}  // namespace ctq
