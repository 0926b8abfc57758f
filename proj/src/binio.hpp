#pragma once

// Little-endian binary framing shared by the corpus, index and WPN stores.
// Layout: 8-byte magic, u32 version, payload, u64 FNV-1a checksum of payload.

#include <crown/error.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace crown::binio {

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = kFnvOffset) {
    auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t file_checksum(const std::string& path);

class Writer {
public:
    Writer(const std::string& path, std::string_view magic, std::uint32_t version);

    template <typename T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        raw(&v, sizeof v);
    }
    void put_string(std::string_view s) {
        put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void raw(const void* data, std::size_t n);
    std::uint64_t bytes_written() const noexcept { return written_; }

    /// Appends the checksum and flushes. Must be called exactly once.
    void finish();

private:
    std::string path_;
    std::ofstream out_;
    std::uint64_t hash_ = kFnvOffset;
    std::uint64_t written_ = 0;
};

/// Reads a whole store into memory and verifies magic, version and checksum
/// before any field is decoded.
class Reader {
public:
    Reader(const std::string& path, std::string_view magic, std::uint32_t version);

    template <typename T>
    T get() {
        static_assert(std::is_trivially_copyable_v<T>);
        T v;
        raw(&v, sizeof v);
        return v;
    }
    std::string get_string() {
        auto n = get<std::uint32_t>();
        need(n);
        std::string s(buf_.data() + pos_, n);
        pos_ += n;
        return s;
    }
    void raw(void* out, std::size_t n) {
        need(n);
        std::memcpy(out, buf_.data() + pos_, n);
        pos_ += n;
    }
    bool at_end() const noexcept { return pos_ == end_; }
    void expect_end() const;

private:
    void need(std::size_t n) const;

    std::string path_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
};

} // namespace crown::binio
