#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctq/vectors.hpp"

namespace ctq {

/// One posting: reference into the vector store plus the coordinate value.
struct Posting {
    uint64_t ref;
    double value;
};

/// Per-dimension list of postings sorted by value descending (ties by
/// ascending vector id). Stored positions are 1-based; position 0 is the
/// synthesized sentinel with value 1.
struct PostingList {
    uint32_t dim = 0;
    std::vector<Posting> postings;

    size_t size() const { return postings.size(); }

    /// Value at a 1-based position; position 0 yields the sentinel 1.
    double value_at(uint64_t pos) const {
        return pos == 0 ? 1.0 : postings[pos - 1].value;
    }
};

/// Lower convex hull of {(j, L[j])} for one posting list, as a strictly
/// increasing list of positions starting at 0 and ending at |L|.
/// Collinear interior points are excluded.
struct HullIndex {
    uint32_t dim = 0;
    std::vector<uint64_t> vertices;

    /// Largest gap between consecutive vertices (0 for a trivial hull).
    uint64_t max_gap() const;
};

/// Computes lower-hull vertex positions for a non-increasing value sequence
/// with the sentinel 1 prepended at position 0. Single monotone-chain pass,
/// O(length). An empty sequence yields {0}.
std::vector<uint64_t> lower_hull(std::span<const double> values);

/// A stored vector: entries in dim order plus the permutation that lists
/// entries by descending value (ties by ascending dim), used by the
/// verification scan.
struct StoredVector {
    SparseVector vector;
    std::vector<uint32_t> value_order;  // indices into vector.entries()
    double norm = 0.0;                  // cached L2 norm
};

/// Immutable inverted index over a set of sparse vectors. Lists exist only
/// for dimensions with at least one posting. Sharing across concurrent query
/// sessions requires no coordination.
class InvertedIndex {
public:
    /// Builds the index. Ids must be distinct. When `dims` is nonzero every
    /// entry must have dim < dims; otherwise the dimensionality is inferred.
    static InvertedIndex build(std::vector<SparseVector> db, bool normalize_vectors,
                               uint32_t dims = 0);

    void save(const std::string& dir) const;
    static InvertedIndex load(const std::string& dir);

    uint32_t dims() const { return dims_; }
    uint64_t size() const { return store_.size(); }
    uint32_t hull_gap() const { return hull_gap_; }
    uint64_t hull_vertex_count() const;

    const PostingList* list(uint32_t dim) const;
    const HullIndex* hull(uint32_t dim) const;
    const std::vector<PostingList>& lists() const { return lists_; }
    const std::vector<HullIndex>& hulls() const { return hulls_; }

    const StoredVector& vector(uint64_t ref) const { return store_[ref]; }
    const std::vector<StoredVector>& store() const { return store_; }
    std::optional<uint64_t> find(const std::string& id) const;

private:
    void finalize();  // id map, value orders, dim lookup

    uint32_t dims_ = 0;
    uint32_t hull_gap_ = 0;
    std::vector<PostingList> lists_;   // ascending by dim
    std::vector<HullIndex> hulls_;     // parallel to lists_
    std::vector<StoredVector> store_;  // ref -> vector, input order
    std::unordered_map<uint32_t, uint32_t> dim_to_list_;
    std::unordered_map<std::string, uint64_t> id_to_ref_;
};

}  // namespace ctq
