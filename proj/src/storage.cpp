// On-disk index layout ("CTQ1"): a directory holding manifest.bin,
// postings.bin, hulls.bin and vectors.bin. All integers little-endian fixed
// width, values IEEE 754 doubles. The manifest carries an FNV-1a checksum
// of each data file and of itself; see README for the exact byte layout.

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ctq/index.hpp"

static_assert(std::endian::native == std::endian::little,
              "index persistence assumes a little-endian host");

namespace ctq {
namespace {

constexpr char kMagic[4] = {'C', 'T', 'Q', '1'};
constexpr uint32_t kVersion = 1;

uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class Writer {
public:
    void u32(uint32_t v) { raw(&v, sizeof v); }
    void u64(uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void bytes(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    const std::string& buffer() const { return buf_; }

    void flush(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open for write: " + path.string());
        out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
    }

private:
    void raw(const void* p, size_t n) { buf_.append(static_cast<const char*>(p), n); }
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string bytes) : buf_(std::move(bytes)) {}

    uint32_t u32() { return get<uint32_t>(); }
    uint64_t u64() { return get<uint64_t>(); }
    double f64() { return get<double>(); }
    std::string bytes() {
        uint32_t n = u32();
        need(n);
        std::string s(buf_.data() + pos_, n);
        pos_ += n;
        return s;
    }
    bool exhausted() const { return pos_ == buf_.size(); }
    const std::string& buffer() const { return buf_; }
    size_t position() const { return pos_; }

private:
    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, buf_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void need(size_t n) {
        if (pos_ + n > buf_.size())
            throw Error(ErrorCode::ChecksumMismatch, "index file truncated");
    }
    std::string buf_;
    size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::IoError, "read failed: " + path.string());
    return bytes;
}

}  // namespace

void InvertedIndex::save(const std::string& dir) const {
    std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create directory: " + dir);

    Writer postings;
    for (const PostingList& list : lists_) {
        for (const Posting& p : list.postings) {
            postings.u64(p.ref);
            postings.f64(p.value);
        }
    }
    Writer hulls;
    for (const HullIndex& h : hulls_)
        for (uint64_t v : h.vertices) hulls.u64(v);
    Writer vectors;
    for (const StoredVector& sv : store_) {
        vectors.bytes(sv.vector.id());
        vectors.u32(static_cast<uint32_t>(sv.vector.nnz()));
        for (const Entry& e : sv.vector.entries()) {
            vectors.u32(e.dim);
            vectors.f64(e.value);
        }
    }

    Writer manifest;
    manifest.u32(std::bit_cast<uint32_t>(kMagic));
    manifest.u32(kVersion);
    manifest.u32(dims_);
    manifest.u64(store_.size());
    manifest.u32(hull_gap_);
    manifest.u64(lists_.size());
    for (size_t i = 0; i < lists_.size(); ++i) {
        manifest.u32(lists_[i].dim);
        manifest.u64(lists_[i].postings.size());
        manifest.u64(hulls_[i].vertices.size());
    }
    manifest.u64(fnv1a(postings.buffer()));
    manifest.u64(fnv1a(hulls.buffer()));
    manifest.u64(fnv1a(vectors.buffer()));
    manifest.u64(fnv1a(manifest.buffer()));

    postings.flush(root / "postings.bin");
    hulls.flush(root / "hulls.bin");
    vectors.flush(root / "vectors.bin");
    manifest.flush(root / "manifest.bin");
}

InvertedIndex InvertedIndex::load(const std::string& dir) {
    std::filesystem::path root(dir);
    Reader manifest(slurp(root / "manifest.bin"));

    uint32_t magic = manifest.u32();
    if (magic != std::bit_cast<uint32_t>(kMagic))
        throw Error(ErrorCode::FormatVersionMismatch, "bad magic in " + dir);
    uint32_t version = manifest.u32();
    if (version != kVersion)
        throw Error(ErrorCode::FormatVersionMismatch,
                    "unsupported index version " + std::to_string(version));

    InvertedIndex index;
    index.dims_ = manifest.u32();
    uint64_t n = manifest.u64();
    index.hull_gap_ = manifest.u32();
    uint64_t list_count = manifest.u64();
    std::vector<std::pair<uint64_t, uint64_t>> lengths;  // postings, hull
    index.lists_.resize(list_count);
    index.hulls_.resize(list_count);
    lengths.reserve(list_count);
    for (uint64_t i = 0; i < list_count; ++i) {
        uint32_t dim = manifest.u32();
        index.lists_[i].dim = dim;
        index.hulls_[i].dim = dim;
        uint64_t plen = manifest.u64();
        uint64_t hlen = manifest.u64();
        lengths.emplace_back(plen, hlen);
    }
    uint64_t postings_sum = manifest.u64();
    uint64_t hulls_sum = manifest.u64();
    uint64_t vectors_sum = manifest.u64();
    size_t self_sum_at = manifest.position();
    uint64_t manifest_sum = manifest.u64();
    if (fnv1a(manifest.buffer().substr(0, self_sum_at)) != manifest_sum || !manifest.exhausted())
        throw Error(ErrorCode::ChecksumMismatch, "manifest checksum mismatch in " + dir);

    Reader postings(slurp(root / "postings.bin"));
    if (fnv1a(postings.buffer()) != postings_sum)
        throw Error(ErrorCode::ChecksumMismatch, "postings checksum mismatch in " + dir);
    Reader hulls(slurp(root / "hulls.bin"));
    if (fnv1a(hulls.buffer()) != hulls_sum)
        throw Error(ErrorCode::ChecksumMismatch, "hulls checksum mismatch in " + dir);
    Reader vectors(slurp(root / "vectors.bin"));
    if (fnv1a(vectors.buffer()) != vectors_sum)
        throw Error(ErrorCode::ChecksumMismatch, "vectors checksum mismatch in " + dir);

    for (uint64_t i = 0; i < list_count; ++i) {
        auto& list = index.lists_[i];
        list.postings.resize(lengths[i].first);
        for (Posting& p : list.postings) {
            p.ref = postings.u64();
            p.value = postings.f64();
        }
        auto& hull = index.hulls_[i];
        hull.vertices.resize(lengths[i].second);
        for (uint64_t& v : hull.vertices) v = hulls.u64();
    }
    index.store_.reserve(n);
    for (uint64_t ref = 0; ref < n; ++ref) {
        std::string id = vectors.bytes();
        uint32_t nnz = vectors.u32();
        std::vector<uint32_t> dims(nnz);
        std::vector<double> values(nnz);
        for (uint32_t k = 0; k < nnz; ++k) {
            dims[k] = vectors.u32();
            values[k] = vectors.f64();
        }
        index.store_.push_back({SparseVector::make(std::move(id), dims, values), {}});
    }
    if (!postings.exhausted() || !hulls.exhausted() || !vectors.exhausted())
        throw Error(ErrorCode::ChecksumMismatch, "trailing bytes in index files in " + dir);

    index.finalize();
    return index;
}

}  // namespace ctq
