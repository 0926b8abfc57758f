#pragma once

#include <crown/text.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace crown::corpus {

/// A passage with its derived token and sentence structure. `tokens` is the
/// full display sequence; `scoring` indexes the non-stopword subset that all
/// scoring components operate on.
struct Passage {
    std::string id;
    std::string text;
    std::vector<text::Token> tokens;
    std::vector<text::SentenceSpan> sentences;
    std::vector<std::uint32_t> scoring;

    std::vector<std::string> scoring_norms() const;
    /// Sentence index (into `sentences`) of each scoring token.
    std::vector<std::uint32_t> scoring_sentences() const;
};

Passage make_passage(std::string id, std::string text,
                     const text::StopwordList& stop = text::StopwordList::english());

enum class InputFormat { tsv, jsonl };

InputFormat parse_format(const std::string& name);

struct CorpusStats {
    std::size_t doc_count = 0;
    std::size_t token_count = 0;
    double avg_passage_len = 0.0;
};

/// Immutable passage collection keyed by id. Either file-backed (ingest/open)
/// or held in memory (from_records). Passage order is ingestion order.
class CorpusStore {
public:
    static constexpr const char* kRecordFile = "corpus.rec";
    static constexpr const char* kIndexFile = "corpus.idx";

    CorpusStore();

    /// Streams `in` into `dir` (created if missing). Duplicate ids, empty
    /// fields and malformed lines are errors; nothing is left half-written.
    static CorpusStore ingest(std::istream& in, InputFormat format, const std::filesystem::path& dir);
    static CorpusStore open(const std::filesystem::path& dir);
    static CorpusStore from_records(const std::vector<std::pair<std::string, std::string>>& records);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::string& id_at(std::size_t i) const { return entries_.at(i).id; }
    std::string text_at(std::size_t i) const;
    Passage get_at(std::size_t i) const;
    /// Throws NotFound.
    Passage get(const std::string& id) const;
    std::string text(const std::string& id) const;
    bool contains(const std::string& id) const { return by_id_.count(id) != 0; }
    std::size_t position(const std::string& id) const;
    /// Number of scoring tokens in passage i.
    std::uint32_t scoring_length_at(std::size_t i) const { return entries_.at(i).scoring_len; }
    CorpusStats stats() const;

    /// One JSON object per line: {"id": ..., "text": ...}.
    void dump(std::ostream& out) const;

private:
    struct Entry {
        std::string id;
        std::uint64_t offset = 0;
        std::uint32_t length = 0;
        std::uint32_t scoring_len = 0;
    };
    class File;

    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::uint32_t> by_id_;
    std::size_t token_count_ = 0;
    std::shared_ptr<const File> file_;
    std::vector<std::string> texts_;
};

/// Scoring-token norms of every passage in store order, tokenized in parallel.
std::vector<std::vector<std::string>> scoring_sequences(const CorpusStore& store);

} // namespace crown::corpus
