#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crown::corpus {
class CorpusStore;
}

namespace crown::wpn {

using NodeId = std::uint32_t;

/// Transparent hash so maps keyed by std::string accept string_view lookups.
struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

struct BuildOptions {
    /// Pairs at token distance 1..window within a passage are counted.
    std::size_t window = 3;
    /// Pairs observed fewer times are dropped after counting.
    std::uint64_t min_cooc = 1;
};

/// Word Proximity Network: unigram counts, windowed co-occurrence counts of
/// distinct-word pairs, and NPMI edge weights derived from them.
///
/// p(x) = unigram(x) / total_tokens, p(x,y) = cooc(x,y) / total_pairs, with
/// total_pairs counted before min_cooc pruning so retained edge weights do
/// not depend on the pruning level. Node ids follow lexicographic word order.
class Wpn {
public:
    Wpn() = default;

    std::size_t window() const noexcept { return window_; }
    std::uint64_t min_cooc() const noexcept { return min_cooc_; }
    std::uint64_t total_tokens() const noexcept { return total_tokens_; }
    std::uint64_t total_pairs() const noexcept { return total_pairs_; }
    std::size_t vocab_size() const noexcept { return words_.size(); }
    std::size_t edge_count() const noexcept { return cooc_.size(); }

    std::optional<NodeId> node(std::string_view word) const;
    const std::string& word(NodeId id) const { return words_.at(id); }
    std::uint64_t unigram_count(NodeId id) const { return unigram_.at(id); }
    std::uint64_t unigram_count(std::string_view word) const;
    std::uint64_t cooc_count(NodeId a, NodeId b) const;
    std::uint64_t cooc_count(std::string_view x, std::string_view y) const;

    /// None when either word is unknown or the pair has no edge.
    std::optional<double> npmi(NodeId a, NodeId b) const;
    std::optional<double> npmi(std::string_view x, std::string_view y) const;
    /// True iff the edge exists and its NPMI is strictly greater than beta.
    bool has_edge(std::string_view x, std::string_view y, double beta) const;

    struct Edge {
        NodeId a;
        NodeId b;
        std::uint64_t count;
    };
    /// All edges with a < b, sorted by (a, b).
    std::vector<Edge> edges() const;

    void save(const std::string& path) const;
    static Wpn load(const std::string& path);
    /// TSV lines "word1 \t word2 \t cooc \t npmi", word1 < word2, sorted.
    void export_tsv(std::ostream& out) const;

    friend Wpn build_wpn(std::span<const std::vector<std::string>>, const BuildOptions&);
    friend Wpn build_wpn_serial(std::span<const std::vector<std::string>>, const BuildOptions&);

private:
    static std::uint64_t key(NodeId a, NodeId b) noexcept {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }
    void index_words();

    std::size_t window_ = 0;
    std::uint64_t min_cooc_ = 1;
    std::uint64_t total_tokens_ = 0;
    std::uint64_t total_pairs_ = 0;
    std::vector<std::string> words_;
    std::vector<std::uint64_t> unigram_;
    std::unordered_map<std::string, NodeId, StringHash, std::equal_to<>> vocab_;
    std::unordered_map<std::uint64_t, std::uint64_t> cooc_;
};

/// NPMI from raw counts; the analytic limit 1 is returned when the pair
/// accounts for every counted pair. Values are clamped to [-1, 1].
double npmi_from_counts(std::uint64_t cooc, std::uint64_t total_pairs, std::uint64_t count_x,
                        std::uint64_t count_y, std::uint64_t total_tokens);

/// Parallel build (OpenMP). Each inner vector is one passage's scoring-token
/// norms. The result does not depend on the thread count.
Wpn build_wpn(std::span<const std::vector<std::string>> passages, const BuildOptions& options);
/// Single-threaded reference build, kept for equivalence tests and benchmarks.
Wpn build_wpn_serial(std::span<const std::vector<std::string>> passages, const BuildOptions& options);
/// Builds from the scoring tokens of every passage in the store.
Wpn build_wpn(const corpus::CorpusStore& store, const BuildOptions& options);

} // namespace crown::wpn
