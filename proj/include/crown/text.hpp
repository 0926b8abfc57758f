#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace crown::text {

/// A word as it appears in the source text plus its normalized form.
/// `offset` is the byte offset of `surface` within the tokenized string.
struct Token {
    std::string surface;
    std::string norm;
    std::size_t offset = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

/// Half-open token range [start, end) forming one sentence.
struct SentenceSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
};

class StopwordList {
public:
    StopwordList() = default;
    explicit StopwordList(std::unordered_set<std::string> words);

    /// The list shipped in data/stopwords_en.txt, compiled in.
    static const StopwordList& english();
    /// One word per line; blank lines and lines starting with '#' are skipped.
    /// Entries are normalized on load.
    static StopwordList load(const std::string& path);

    bool contains(std::string_view norm) const;
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }

private:
    std::unordered_set<std::string> words_;
};

/// Lowercases ASCII, Latin-1, Latin Extended-A, basic Greek and Cyrillic
/// capitals; other code points pass through unchanged.
std::string fold_case(std::string_view word);

/// Splits on every code point that is not a letter or digit. Apostrophes are
/// separators, so "nolan's" yields "nolan" and a discarded "s". Single-letter
/// alphabetic tokens are dropped; digits are kept.
std::vector<Token> tokenize(std::string_view text);

std::vector<Token> remove_stopwords(std::span<const Token> tokens, const StopwordList& stop);

struct SplitText {
    std::vector<Token> tokens;
    std::vector<SentenceSpan> spans;
};

/// Tokenizes and groups tokens into sentences. A sentence ends at '.', '!' or
/// '?' followed by whitespace, and at end of text. Abbreviations are not
/// special-cased. Sentences without tokens are not emitted.
SplitText split_sentences(std::string_view text);

} // namespace crown::text
