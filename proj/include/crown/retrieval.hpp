#pragma once

#include <crown/conversation.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crown::corpus {
class CorpusStore;
}

namespace crown::retrieval {

/// Okapi BM25 free parameters.
struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

/// idf = ln(1 + (N - df + 0.5) / (df + 0.5)); never negative.
double bm25_idf(std::size_t doc_count, std::size_t df);
double bm25_tf(std::uint32_t tf, std::uint32_t doc_len, double avg_len, const Bm25Params& p);

/// Inverted index over scoring tokens. Documents are numbered in ascending
/// passage-id order, so postings sorted by document number are also sorted
/// by passage id. Passages without scoring tokens are not indexed.
class InvertedIndex {
public:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    static InvertedIndex build(const corpus::CorpusStore& store);
    static InvertedIndex build(std::span<const std::string> ids, std::span<const std::vector<std::string>> sequences);

    std::size_t doc_count() const noexcept { return ids_.size(); }
    double avg_len() const noexcept { return avg_len_; }
    std::size_t vocab_size() const noexcept { return postings_.size(); }
    const std::string& doc_id(std::uint32_t doc) const { return ids_.at(doc); }
    std::uint32_t doc_len(std::uint32_t doc) const { return doc_len_.at(doc); }
    /// Empty span for unknown terms.
    std::span<const Posting> postings(std::string_view term) const;

    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };
    void finish();

    std::vector<std::string> ids_;
    std::vector<std::uint32_t> doc_len_;
    double avg_len_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>, Hash, std::equal_to<>> postings_;
};

struct Candidate {
    std::string id;
    double score = 0.0;
    /// 1-based position in the baseline ranking.
    std::size_t rank = 0;
};

/// Baseline candidates. When `has_prior` is false (union mode) the entries
/// are ordered by passage id and their score and rank carry no meaning.
struct CandidateList {
    std::vector<Candidate> entries;
    bool has_prior = true;

    std::size_t size() const noexcept { return entries.size(); }
    bool empty() const noexcept { return entries.empty(); }
};

/// Top-k passages by BM25 where each query item contributes with its turn
/// weight. Ties go to the smaller passage id.
CandidateList retrieve(const InvertedIndex& index, const conversation::ConversationalQuery& cq, std::size_t k,
                       const Bm25Params& params = {});

/// Union of the top-k sets of every query, ordered by passage id.
CandidateList retrieve_union(const InvertedIndex& index, std::span<const conversation::ConversationalQuery> queries,
                             std::size_t k, const Bm25Params& params = {});

} // namespace crown::retrieval
