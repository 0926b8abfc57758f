#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crown::embed {

/// Word vectors, L2-normalized at load so cosine similarity is a dot product.
/// Words are case-folded on load to match token norms.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

    /// word2vec text format: header "<count> <dim>", then "word v1 ... vdim".
    /// Duplicate words keep the first vector and record a warning.
    static EmbeddingStore load(const std::string& path);
    static EmbeddingStore parse(std::istream& in, const std::string& source = "<stream>");

    /// Adds (and normalizes) a vector. Returns false if the word is present.
    bool add(std::string_view word, std::span<const double> vec);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool contains(std::string_view word) const;
    /// Unit vector for the word, empty span when out of vocabulary.
    std::span<const double> vector(std::string_view word) const;
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };

    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::vector<double> data_;
    std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
    std::vector<std::string> warnings_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Cosine similarity. Identical strings are 1.0 even when out of vocabulary;
/// otherwise both words must be in vocabulary, else none.
std::optional<double> sim(const EmbeddingStore& store, std::string_view a, std::string_view b);

} // namespace crown::embed
