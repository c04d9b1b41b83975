#include <cmath>

#include "ctq/io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctq;

TEST_CASE("parses records, comments and blank lines") {
    std::string text =
        "# header comment\n"
        "a\t0:0.5 3:1.25\n"
        "\n"
        "b\t7:2\n";
    auto vectors = parse_vector_text(text, "mem");
    REQUIRE(vectors.size() == 2);
    CHECK(vectors[0].id() == "a");
    REQUIRE(vectors[0].nnz() == 2);
    CHECK(vectors[0].entries()[1].dim == 3);
    CHECK(vectors[0].entries()[1].value == 1.25);
    CHECK(vectors[1].id() == "b");
}

TEST_CASE("parse errors carry the offending line number") {
    auto expect_error = [](const std::string& text, const char* needle, int line) {
        try {
            (void)parse_vector_text(text, "mem");
            FAIL_CHECK("expected ParseError for: " << text);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            std::string what = e.what();
            CHECK(what.find("mem:" + std::to_string(line)) != std::string::npos);
            CHECK(what.find(needle) != std::string::npos);
        }
    };
    expect_error("x\t3:abc\n", "bad value", 1);
    expect_error("# ok\nx\t3:abc\n", "bad value", 2);
    expect_error("x 3:0.5\n", "expected", 1);
    expect_error("x\t3:0.5 3:0.7\n", "duplicate dim", 1);
    expect_error("x\t3:-0.5\n", "positive", 1);
    expect_error("x\t3:0\n", "positive", 1);
    expect_error("x\t:0.5\n", "malformed", 1);
    expect_error("x\t\n", "no entries", 1);
}

TEST_CASE("text round trip preserves values exactly") {
    auto vectors = builtin_fixture_vectors();
    std::string text = format_vector_text(vectors);
    auto parsed = parse_vector_text(text, "mem");
    REQUIRE(parsed.size() == vectors.size());
    for (size_t i = 0; i < vectors.size(); ++i) {
        CHECK(parsed[i].id() == vectors[i].id());
        REQUIRE(parsed[i].nnz() == vectors[i].nnz());
        for (size_t k = 0; k < vectors[i].nnz(); ++k) {
            CHECK(parsed[i].entries()[k].dim == vectors[i].entries()[k].dim);
            CHECK(parsed[i].entries()[k].value == vectors[i].entries()[k].value);
        }
    }
}

TEST_CASE("builtin fixture is consistent") {
    auto vectors = builtin_fixture_vectors();
    REQUIRE(vectors.size() == 6);
    for (const auto& v : vectors) CHECK(std::abs(v.norm_sq() - 1.0) < 1e-12);
    SparseVector q = builtin_fixture_query();
    CHECK(q.nnz() == 3);
    CHECK(std::abs(q.norm_sq() - 0.98) < 1e-12);
}

TEST_CASE("missing file raises IoError") {
    try {
        (void)parse_vector_file("/nonexistent/path/vectors.tsv");
        FAIL("expected IoError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
}
