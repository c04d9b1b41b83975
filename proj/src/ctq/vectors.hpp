#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctq/common.hpp"

namespace ctq {

/// One nonzero coordinate of a sparse vector.
struct Entry {
    uint32_t dim;
    double value;
};

/// Sparse non-negative vector: entries strictly increasing by dimension,
/// all values > 0. Immutable once constructed; safe to share across threads.
class SparseVector {
public:
    SparseVector() = default;

    /// Validates and canonicalizes raw (dim, value) pairs: sorts by dim,
    /// drops exact zeros, rejects negatives and duplicate dims.
    static SparseVector make(std::string id, std::span<const uint32_t> dims,
                             std::span<const double> values);

    const std::string& id() const { return id_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    size_t nnz() const { return entries_.size(); }

    /// Largest dimension index + 1, or 0 for the empty vector.
    uint32_t dim_bound() const;

    double norm() const;     // L2
    double norm_sq() const;

private:
    std::string id_;
    std::vector<Entry> entries_;

    friend SparseVector normalize(const SparseVector& v);
};

/// Scales v to unit L2 norm; entries below kMinEntryValue afterwards are
/// dropped. Throws EmptyVector for a vector with no entries.
SparseVector normalize(const SparseVector& v);

/// Sparse dot product over shared dimensions.
double dot(const SparseVector& a, const SparseVector& b);

/// dot(a, b) / (|a| * |b|). Throws EmptyVector on zero-norm input.
double cosine(const SparseVector& a, const SparseVector& b);

/// A threshold query: vector plus theta in (0, 1]. The support is exactly
/// the set of dims with a positive weight.
struct Query {
    SparseVector vector;
    double theta = 0.0;

    static Query make(SparseVector v, double theta);

    const std::vector<Entry>& support() const { return vector.entries(); }
    size_t support_size() const { return vector.nnz(); }
};

}  // namespace ctq
