#include "binio.hpp"

#include <array>
#include <iterator>

namespace crown::binio {

namespace {
constexpr std::size_t kMagicLen = 8;

std::array<char, kMagicLen> pad_magic(std::string_view magic) {
    std::array<char, kMagicLen> m{};
    std::memcpy(m.data(), magic.data(), std::min(magic.size(), kMagicLen));
    return m;
}
} // namespace

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::uint64_t h = kFnvOffset;
    std::array<char, 1 << 16> chunk{};
    while (in) {
        in.read(chunk.data(), chunk.size());
        h = fnv1a(chunk.data(), static_cast<std::size_t>(in.gcount()), h);
    }
    return h;
}

Writer::Writer(const std::string& path, std::string_view magic, std::uint32_t version)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot create " + path);
    auto m = pad_magic(magic);
    out_.write(m.data(), m.size());
    out_.write(reinterpret_cast<const char*>(&version), sizeof version);
}

void Writer::raw(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    hash_ = fnv1a(data, n, hash_);
    written_ += n;
}

void Writer::finish() {
    out_.write(reinterpret_cast<const char*>(&hash_), sizeof hash_);
    out_.flush();
    if (!out_) throw Error("write failed: " + path_);
    out_.close();
}

Reader::Reader(const std::string& path, std::string_view magic, std::uint32_t version)
    : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());

    constexpr std::size_t header = kMagicLen + sizeof(std::uint32_t);
    if (buf_.size() < header + sizeof(std::uint64_t))
        throw FormatError(path + ": file too short to be a store");
    auto m = pad_magic(magic);
    if (std::memcmp(buf_.data(), m.data(), kMagicLen) != 0)
        throw FormatError(path + ": bad magic header");
    std::uint32_t v;
    std::memcpy(&v, buf_.data() + kMagicLen, sizeof v);
    if (v != version)
        throw FormatError(path + ": unsupported format version " + std::to_string(v) +
                          " (expected " + std::to_string(version) + ")");

    end_ = buf_.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, buf_.data() + end_, sizeof stored);
    if (fnv1a(buf_.data() + header, end_ - header) != stored)
        throw FormatError(path + ": checksum mismatch (corrupt file)");
    pos_ = header;
}

void Reader::need(std::size_t n) const {
    if (end_ - pos_ < n) throw FormatError(path_ + ": truncated payload");
}

void Reader::expect_end() const {
    if (!at_end()) throw FormatError(path_ + ": trailing bytes in payload");
}

} // namespace crown::binio
