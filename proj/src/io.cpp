#include "ctq/io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace ctq {

namespace {

[[noreturn]] void bad_line(const std::string& origin, size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError,
                origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<SparseVector> parse_vector_text(std::string_view text, const std::string& origin) {
    std::vector<SparseVector> out;
    size_t line_no = 0;
    size_t begin = 0;
    while (begin <= text.size()) {
        size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(begin, end - begin);
        begin = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') {
            if (begin > text.size()) break;
            continue;
        }

        size_t tab = line.find('\t');
        if (tab == std::string_view::npos || tab == 0)
            bad_line(origin, line_no, "expected 'id<TAB>dim:value ...'");
        std::string id(line.substr(0, tab));
        std::string_view rest = line.substr(tab + 1);

        std::vector<uint32_t> dims;
        std::vector<double> values;
        size_t p = 0;
        while (p < rest.size()) {
            while (p < rest.size() && (rest[p] == ' ' || rest[p] == '\t')) ++p;
            if (p >= rest.size()) break;
            size_t q = p;
            while (q < rest.size() && rest[q] != ' ' && rest[q] != '\t') ++q;
            std::string token(rest.substr(p, q - p));
            p = q;

            size_t colon = token.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
                bad_line(origin, line_no, "malformed entry '" + token + "'");
            errno = 0;
            char* dim_end = nullptr;
            unsigned long dim = std::strtoul(token.c_str(), &dim_end, 10);
            if (errno != 0 || dim_end != token.c_str() + colon || dim > UINT32_MAX)
                bad_line(origin, line_no, "bad dimension in '" + token + "'");
            errno = 0;
            char* val_end = nullptr;
            double value = std::strtod(token.c_str() + colon + 1, &val_end);
            if (errno != 0 || val_end != token.c_str() + token.size() || !std::isfinite(value))
                bad_line(origin, line_no, "bad value in '" + token + "'");
            if (value <= 0.0)
                bad_line(origin, line_no, "values must be positive in '" + token + "'");
            dims.push_back(static_cast<uint32_t>(dim));
            values.push_back(value);
        }
        if (dims.empty()) bad_line(origin, line_no, "vector '" + id + "' has no entries");

        try {
            out.push_back(SparseVector::make(std::move(id), dims, values));
        } catch (const Error& e) {
            bad_line(origin, line_no, e.what());
        }
        if (begin > text.size()) break;
    }
    return out;
}

std::vector<SparseVector> parse_vector_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::IoError, "read failed: " + path);
    return parse_vector_text(text, path);
}

std::string format_vector_text(const std::vector<SparseVector>& vectors) {
    std::string out;
    char buf[64];
    for (const SparseVector& v : vectors) {
        out += v.id();
        char sep = '\t';
        for (const Entry& e : v.entries()) {
            std::snprintf(buf, sizeof buf, "%c%u:%.17g", sep, e.dim, e.value);
            out += buf;
            sep = ' ';
        }
        out += '\n';
    }
    return out;
}

std::vector<SparseVector> builtin_fixture_vectors() {
    auto vec = [](const char* id, std::vector<uint32_t> dims, std::vector<double> values) {
        return SparseVector::make(id, dims, values);
    };
    return {
        vec("s1", {1, 3, 4, 7}, {0.8, 0.4, 0.2, 0.4}),
        vec("s2", {3, 4}, {0.8, 0.6}),
        vec("s3", {1, 4, 8}, {0.3, 0.6, std::sqrt(0.55)}),
        vec("s4", {1, 3, 5}, {0.2, 0.1, std::sqrt(0.95)}),
        vec("s5", {1, 3, 9}, {0.7, 0.3, std::sqrt(0.42)}),
        vec("s6", {0, 2, 4}, {0.6, std::sqrt(0.63), 0.1}),
    };
}

SparseVector builtin_fixture_query() {
    return SparseVector::make("q", std::vector<uint32_t>{1, 3, 4},
                              std::vector<double>{0.8, 0.3, 0.5});
}

}  // namespace ctq
