// Shared test oracles and instance generators. Each oracle is an independent
// computation path (bisection, exhaustive enumeration, dense arrays) kept
// deliberately free of the library's solver code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctq/index.hpp"
#include "ctq/vectors.hpp"

namespace ctq::testing {

// ---- dense-array dot/cosine oracle (d <= a few thousand) -----------------

inline std::vector<double> densify(const SparseVector& v, uint32_t d) {
    std::vector<double> out(d, 0.0);
    for (const Entry& e : v.entries()) out[e.dim] = e.value;
    return out;
}

inline double dense_dot(const SparseVector& a, const SparseVector& b, uint32_t d) {
    auto da = densify(a, d), db = densify(b, d);
    double s = 0.0;
    for (uint32_t i = 0; i < d; ++i) s += da[i] * db[i];
    return s;
}

// ---- bisection oracle for tau and the max-similarity ---------------------

struct OracleTau {
    double tau;
    double ms;
    bool infeasible;
};

inline OracleTau bisect_tau(std::span<const double> w, std::span<const double> L,
                            uint64_t zero_weight_dims) {
    auto norm_sq_at = [&](double t) {
        double s = 0.0;
        for (size_t i = 0; i < w.size(); ++i) {
            double v = std::min(w[i] * t, L[i]);
            s += v * v;
        }
        return s;
    };
    auto ms_at = [&](double t) {
        double s = 0.0;
        for (size_t i = 0; i < w.size(); ++i) s += std::min(w[i] * t, L[i]) * w[i];
        return s;
    };
    double hi = 1.0;
    while (norm_sq_at(hi) < 1.0 && hi < 1e18) hi *= 2.0;
    if (norm_sq_at(hi) < 1.0) {
        // No finite solution: every component capped with total norm below 1.
        double l2 = 0.0, lq = 0.0;
        for (size_t i = 0; i < w.size(); ++i) {
            l2 += L[i] * L[i];
            lq += L[i] * w[i];
        }
        if (zero_weight_dims == 0 && l2 < 1.0)
            return {std::numeric_limits<double>::infinity(), 0.0, true};
        return {std::numeric_limits<double>::infinity(), lq, false};
    }
    double lo = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (norm_sq_at(mid) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    double tau = 0.5 * (lo + hi);
    return {tau, ms_at(tau), false};
}

// ---- exhaustive lower-hull envelope oracle --------------------------------

// Lower convex envelope sampled at integer positions: at each j, the minimum
// over all chords (a <= j <= b) of the interpolated value. O(n^3); points are
// (0, 1), (1, values[0]), ...
inline std::vector<double> hull_envelope(std::span<const double> values) {
    size_t n = values.size();
    auto val = [&](size_t pos) { return pos == 0 ? 1.0 : values[pos - 1]; };
    std::vector<double> env(n + 1);
    for (size_t j = 0; j <= n; ++j) {
        double best = val(j);
        for (size_t a = 0; a <= j; ++a) {
            for (size_t b = j; b <= n; ++b) {
                if (a == b) continue;
                double t = static_cast<double>(j - a) / static_cast<double>(b - a);
                best = std::min(best, val(a) + t * (val(b) - val(a)));
            }
        }
        env[j] = best;
    }
    return env;
}

// Piecewise-linear function induced by hull vertex positions over the values.
inline std::vector<double> hull_function(std::span<const uint64_t> vertices,
                                         std::span<const double> values) {
    auto val = [&](uint64_t pos) { return pos == 0 ? 1.0 : values[pos - 1]; };
    std::vector<double> f(values.size() + 1, 0.0);
    for (size_t k = 0; k + 1 < vertices.size(); ++k) {
        uint64_t a = vertices[k], b = vertices[k + 1];
        for (uint64_t j = a; j <= b; ++j) {
            double t = static_cast<double>(j - a) / static_cast<double>(b - a);
            f[j] = val(a) + t * (val(b) - val(a));
        }
    }
    if (vertices.size() == 1) f[0] = val(0);
    return f;
}

// Generic variants over explicit point values y_0..y_n (no implied sentinel).
inline std::vector<double> envelope_of_points(std::span<const double> y) {
    size_t n = y.size();
    std::vector<double> env(n);
    for (size_t j = 0; j < n; ++j) {
        double best = y[j];
        for (size_t a = 0; a <= j; ++a)
            for (size_t b = j; b < n; ++b) {
                if (a == b) continue;
                double t = static_cast<double>(j - a) / static_cast<double>(b - a);
                best = std::min(best, y[a] + t * (y[b] - y[a]));
            }
        env[j] = best;
    }
    return env;
}

inline std::vector<double> function_of_vertices(std::span<const uint64_t> vertices,
                                                std::span<const double> y) {
    std::vector<double> f(y.size(), 0.0);
    if (vertices.size() == 1) {
        f[vertices[0]] = y[vertices[0]];
        return f;
    }
    for (size_t k = 0; k + 1 < vertices.size(); ++k) {
        uint64_t a = vertices[k], b = vertices[k + 1];
        for (uint64_t j = a; j <= b; ++j) {
            double t = static_cast<double>(j - a) / static_cast<double>(b - a);
            f[j] = y[a] + t * (y[b] - y[a]);
        }
    }
    return f;
}

// ---- random instances ------------------------------------------------------

inline SparseVector random_unit_vector(std::mt19937_64& rng, uint32_t d, size_t nnz,
                                       const std::string& id, double skew = 1.0) {
    std::vector<uint32_t> dims(d);
    for (uint32_t i = 0; i < d; ++i) dims[i] = i;
    std::shuffle(dims.begin(), dims.end(), rng);
    dims.resize(std::min<size_t>(nnz, d));
    std::sort(dims.begin(), dims.end());
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    std::vector<double> values(dims.size());
    for (double& v : values) v = std::pow(uni(rng), skew);
    SparseVector raw = SparseVector::make(id, dims, values);
    return normalize(raw);
}

inline std::vector<SparseVector> random_database(std::mt19937_64& rng, size_t n, uint32_t d,
                                                 size_t nnz, double skew = 1.0) {
    std::vector<SparseVector> db;
    db.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "v%05zu", i);
        std::uniform_int_distribution<size_t> jitter(nnz / 2 + 1, nnz + nnz / 2);
        db.push_back(random_unit_vector(rng, d, jitter(rng), id, skew));
    }
    return db;
}

// Builds an index whose posting list for dim i is exactly lists[i] (values
// non-increasing, in (0, 1]); each posting becomes its own single-entry
// vector, so the build runs unnormalized. ambient_dims > lists.size() leaves
// zero-weight dimensions available to absorb leftover norm.
inline InvertedIndex index_from_lists(const std::vector<std::vector<double>>& lists,
                                      uint32_t ambient_dims = 0) {
    std::vector<SparseVector> db;
    size_t counter = 0;
    for (uint32_t dim = 0; dim < lists.size(); ++dim) {
        for (double value : lists[dim]) {
            char id[32];
            std::snprintf(id, sizeof id, "p%06zu", counter++);
            uint32_t dims[1] = {dim};
            double values[1] = {value};
            db.push_back(SparseVector::make(id, dims, values));
        }
    }
    uint32_t d = std::max<uint32_t>(ambient_dims, static_cast<uint32_t>(lists.size()));
    return InvertedIndex::build(std::move(db), /*normalize=*/false, d);
}

// Non-increasing value sequence in (0,1) whose drop sequence, including the
// sentinel drop 1 -> L[1], is non-increasing (ideal convexity for any linear
// component). Values stay well above zero so list ends are never load-bearing.
inline std::vector<double> ideally_convex_list(std::mt19937_64& rng, size_t len) {
    std::uniform_real_distribution<double> uni(0.01, 1.0);
    // drops d_0 >= d_1 >= ... > 0 scaled so the tail stays positive
    std::vector<double> drops(len);
    double first = uni(rng) * 0.5 + 0.2;  // sentinel drop
    drops[0] = first;
    for (size_t i = 1; i < len; ++i) drops[i] = drops[i - 1] * (0.35 + 0.6 * uni(rng));
    double total = 0.0;
    for (double dr : drops) total += dr;
    double budget = 0.9;  // keep the last value >= 0.1
    double scale = total > budget ? budget / total : 1.0;
    // keep the first drop dominant after scaling
    std::vector<double> values(len);
    double cur = 1.0;
    for (size_t i = 0; i < len; ++i) {
        cur -= drops[i] * scale;
        values[i] = cur;
    }
    return values;
}

}  // namespace ctq::testing
