#include <random>

#include "ctq/vectors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctq;
using namespace ctq::testing;

TEST_CASE("normalize scales to unit norm") {
    uint32_t dims[] = {0, 1};
    double values[] = {3.0, 4.0};
    SparseVector v = normalize(SparseVector::make("a", dims, values));
    REQUIRE(v.nnz() == 2);
    CHECK(v.entries()[0].value == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(v.entries()[1].value == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(std::abs(v.norm_sq() - 1.0) < 1e-9);

    SparseVector again = normalize(v);
    CHECK(again.entries()[0].value == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(again.entries()[1].value == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("normalize rejects the empty vector") {
    SparseVector v;
    CHECK_THROWS_WITH_AS(normalize(v), doctest::Contains("empty"), Error);
}

TEST_CASE("construction rejects negatives, omits zeros, sorts dims") {
    uint32_t dims[] = {5, 2, 9};
    double values[] = {0.5, 0.0, 0.25};
    SparseVector v = SparseVector::make("a", dims, values);
    REQUIRE(v.nnz() == 2);
    CHECK(v.entries()[0].dim == 5);
    CHECK(v.entries()[1].dim == 9);

    double bad[] = {0.5, -0.1, 0.25};
    CHECK_THROWS_AS((void)SparseVector::make("a", dims, bad), Error);
}

TEST_CASE("dot basics") {
    uint32_t d01[] = {0, 1};
    double unit[] = {0.6, 0.8};
    SparseVector a = SparseVector::make("a", d01, unit);
    CHECK(dot(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    uint32_t d0[] = {0};
    uint32_t d1[] = {1};
    double one[] = {1.0};
    CHECK(dot(SparseVector::make("x", d0, one), SparseVector::make("y", d1, one)) == 0.0);

    // query weights against a frontier bound vector on shared dims
    uint32_t qd[] = {1, 3, 4};
    double qv[] = {0.8, 0.3, 0.5};
    double bv[] = {0.3, 0.3, 0.2};
    double s = dot(SparseVector::make("q", qd, qv), SparseVector::make("b", qd, bv));
    CHECK(std::abs(s - 0.43) < 1e-12);
}

TEST_CASE("cosine: self similarity and scale invariance") {
    uint32_t dims[] = {2, 7, 11};
    double values[] = {1.5, 0.25, 3.0};
    SparseVector v = SparseVector::make("v", dims, values);
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-12));

    uint32_t d01[] = {0, 1};
    double raw[] = {3.0, 4.0};
    double unit[] = {0.6, 0.8};
    CHECK(cosine(SparseVector::make("a", d01, raw), SparseVector::make("b", d01, unit)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine matches the dense-array oracle") {
    std::mt19937_64 rng(7);
    const uint32_t d = 64;
    for (int round = 0; round < 200; ++round) {
        SparseVector a = random_unit_vector(rng, d, 1 + round % 12, "a");
        SparseVector b = random_unit_vector(rng, d, 1 + (round * 3) % 12, "b");
        double expected = dense_dot(a, b, d) / (std::sqrt(dense_dot(a, a, d)) *
                                                std::sqrt(dense_dot(b, b, d)));
        CHECK(std::abs(cosine(a, b) - expected) < 1e-12);
        CHECK(std::abs(dot(a, b) - dense_dot(a, b, d)) < 1e-12);
        // unit, non-negative vectors stay inside [0, 1]
        CHECK(dot(a, b) >= 0.0);
        CHECK(dot(a, b) <= 1.0 + 1e-12);
    }
}

TEST_CASE("cosine is normalization-invariant") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 100; ++round) {
        std::uniform_real_distribution<double> scale(0.1, 20.0);
        SparseVector a = random_unit_vector(rng, 32, 6, "a");
        SparseVector b = random_unit_vector(rng, 32, 6, "b");
        std::vector<uint32_t> dims;
        std::vector<double> values;
        double s = scale(rng);
        for (const Entry& e : a.entries()) {
            dims.push_back(e.dim);
            values.push_back(e.value * s);
        }
        SparseVector scaled = SparseVector::make("a2", dims, values);
        CHECK(std::abs(cosine(scaled, b) - cosine(normalize(scaled), normalize(b))) < 1e-9);
    }
}

TEST_CASE("query validation") {
    uint32_t dims[] = {0};
    double values[] = {1.0};
    SparseVector v = SparseVector::make("q", dims, values);
    CHECK_THROWS_AS((void)Query::make(v, 0.0), Error);
    CHECK_THROWS_AS((void)Query::make(v, 1.5), Error);
    Query q = Query::make(v, 0.5);
    CHECK(q.support_size() == 1);
}
