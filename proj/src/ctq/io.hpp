#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ctq/vectors.hpp"

namespace ctq {

/// Parses the text vector format, one vector per line:
///   id<TAB>dim:value dim:value ...
/// Lines starting with '#' are comments; blank lines are skipped. Dims are
/// non-negative integers, values positive decimals. Vectors are returned as
/// given (normalization is the caller's policy). Throws ParseError naming
/// the 1-based line of the first malformed record.
std::vector<SparseVector> parse_vector_text(std::string_view text, const std::string& origin);

/// parse_vector_text over a file's contents; throws IoError if unreadable.
std::vector<SparseVector> parse_vector_file(const std::string& path);

/// Serializes vectors back to the text format (one line per vector,
/// round-trippable at full double precision).
std::string format_vector_text(const std::vector<SparseVector>& vectors);

/// Built-in demo database: six 10-dimensional unit vectors ("s1".."s6")
/// whose posting lists on dims 1, 3 and 4 exercise a complete
/// gathering/verification walkthrough against the companion query.
std::vector<SparseVector> builtin_fixture_vectors();

/// The companion query: weights (0.8, 0.3, 0.5) on dims 1, 3, 4 (unnormalized).
SparseVector builtin_fixture_query();

}  // namespace ctq
