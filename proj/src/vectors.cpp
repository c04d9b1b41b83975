#include "ctq/vectors.hpp"

#include <algorithm>
#include <cmath>

namespace ctq {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Ok: return "Ok";
        case ErrorCode::EmptyVector: return "EmptyVector";
        case ErrorCode::NegativeValue: return "NegativeValue";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::DimensionOutOfRange: return "DimensionOutOfRange";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
        case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
        case ErrorCode::UnknownDim: return "UnknownDim";
        case ErrorCode::InvalidBound: return "InvalidBound";
        case ErrorCode::AllExhausted: return "AllExhausted";
        case ErrorCode::UnknownStrategy: return "UnknownStrategy";
        case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
        case ErrorCode::BadArgument: return "BadArgument";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

SparseVector SparseVector::make(std::string id, std::span<const uint32_t> dims,
                                std::span<const double> values) {
    if (dims.size() != values.size())
        throw Error(ErrorCode::BadArgument, "dims/values length mismatch for vector '" + id + "'");
    SparseVector v;
    v.id_ = std::move(id);
    v.entries_.reserve(dims.size());
    for (size_t i = 0; i < dims.size(); ++i) {
        if (values[i] < 0.0)
            throw Error(ErrorCode::NegativeValue,
                        "negative value in vector '" + v.id_ + "' at dim " + std::to_string(dims[i]));
        if (values[i] == 0.0) continue;  // zero entries are omitted
        v.entries_.push_back({dims[i], values[i]});
    }
    std::sort(v.entries_.begin(), v.entries_.end(),
              [](const Entry& a, const Entry& b) { return a.dim < b.dim; });
    for (size_t i = 1; i < v.entries_.size(); ++i) {
        if (v.entries_[i].dim == v.entries_[i - 1].dim)
            throw Error(ErrorCode::BadArgument,
                        "duplicate dim " + std::to_string(v.entries_[i].dim) + " in vector '" + v.id_ + "'");
    }
    return v;
}

uint32_t SparseVector::dim_bound() const {
    return entries_.empty() ? 0 : entries_.back().dim + 1;
}

double SparseVector::norm_sq() const {
    double s = 0.0;
    for (const Entry& e : entries_) s += e.value * e.value;
    return s;
}

double SparseVector::norm() const { return std::sqrt(norm_sq()); }

SparseVector normalize(const SparseVector& v) {
    if (v.empty())
        throw Error(ErrorCode::EmptyVector, "cannot normalize empty vector '" + v.id() + "'");
    double inv = 1.0 / v.norm();
    SparseVector out;
    out.id_ = v.id();
    out.entries_.reserve(v.nnz());
    for (const Entry& e : v.entries()) {
        double value = e.value * inv;
        if (value < kMinEntryValue) continue;
        out.entries_.push_back({e.dim, value});
    }
    if (out.entries_.empty())
        throw Error(ErrorCode::EmptyVector, "vector '" + v.id() + "' vanished under normalization");
    return out;
}

double dot(const SparseVector& a, const SparseVector& b) {
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    double s = 0.0;
    size_t i = 0, j = 0;
    while (i < ea.size() && j < eb.size()) {
        if (ea[i].dim < eb[j].dim) {
            ++i;
        } else if (ea[i].dim > eb[j].dim) {
            ++j;
        } else {
            s += ea[i].value * eb[j].value;
            ++i;
            ++j;
        }
    }
    return s;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    if (a.empty() || b.empty())
        throw Error(ErrorCode::EmptyVector, "cosine of zero-norm vector");
    return dot(a, b) / (a.norm() * b.norm());
}

Query Query::make(SparseVector v, double theta) {
    if (v.empty())
        throw Error(ErrorCode::EmptyVector, "query vector has no entries");
    if (!(theta > 0.0) || theta > 1.0)
        throw Error(ErrorCode::BadArgument, "theta must be in (0, 1]");
    Query q;
    q.vector = std::move(v);
    q.theta = theta;
    return q;
}

}  // namespace ctq
