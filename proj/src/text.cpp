#include <crown/text.hpp>

#include <crown/error.hpp>

#include <fstream>
#include <sstream>

#include "stopwords_data.hpp"

namespace crown::text {

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one UTF-8 code point at s[i]; advances i. Malformed input yields
// kInvalid and consumes one byte.
char32_t decode(std::string_view s, std::size_t& i) {
    auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : (b0 & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || i + len > s.size()) {
        ++i;
        return kInvalid;
    }
    char32_t cp = b0 & (0x7F >> len);
    for (int k = 1; k < len; ++k) {
        auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kInvalid;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_ascii_digit(char32_t cp) { return in(cp, '0', '9'); }

// Letters and digits. Outside ASCII everything counts as a word character
// except the punctuation and symbol blocks listed here.
bool is_word_char(char32_t cp) {
    if (cp == kInvalid) return false;
    if (cp < 0x80) return is_ascii_digit(cp) || in(cp, 'a', 'z') || in(cp, 'A', 'Z');
    if (in(cp, 0x80, 0xBF)) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF)) return false;
    if (in(cp, 0x2190, 0x2BFF) || in(cp, 0x2E00, 0x2E7F)) return false;
    if (in(cp, 0x3000, 0x303F) || in(cp, 0xFE30, 0xFE4F)) return false;
    if (in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) ||
        in(cp, 0xFF5B, 0xFF65))
        return false;
    if (in(cp, 0xFFF0, 0xFFFF) || in(cp, 0x1F000, 0x1FAFF)) return false;
    return true;
}

char32_t lower(char32_t cp) {
    if (in(cp, 'A', 'Z')) return cp + 0x20;
    if (cp < 0x80) return cp;
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
    if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return cp % 2 == 0 ? cp + 1 : cp;
    if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return cp % 2 == 1 ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
    if (in(cp, 0x410, 0x42F)) return cp + 0x20;
    if (in(cp, 0x400, 0x40F)) return cp + 0x50;
    return cp;
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Walks `text`, calling on_token(Token) for every kept token and
// on_boundary() at every sentence terminator.
template <typename OnToken, typename OnBoundary>
void scan(std::string_view text, OnToken&& on_token, OnBoundary&& on_boundary) {
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i;
        char32_t cp = decode(text, i);
        if (!is_word_char(cp)) {
            if ((cp == '.' || cp == '!' || cp == '?') && (i == text.size() || is_space(text[i])))
                on_boundary();
            continue;
        }
        Token tok;
        tok.offset = start;
        std::size_t code_points = 1;
        bool alpha = !is_ascii_digit(cp);
        encode(lower(cp), tok.norm);
        std::size_t end = i;
        while (i < text.size()) {
            std::size_t j = i;
            char32_t next = decode(text, j);
            if (!is_word_char(next)) break;
            encode(lower(next), tok.norm);
            ++code_points;
            i = end = j;
        }
        if (code_points == 1 && alpha) continue;
        tok.surface.assign(text.substr(start, end - start));
        on_token(std::move(tok));
    }
}

} // namespace

StopwordList::StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

namespace {
StopwordList parse_stopwords(std::istream& in) {
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (auto& tok : tokenize(line)) words.insert(std::move(tok.norm));
    }
    return StopwordList(std::move(words));
}
} // namespace

const StopwordList& StopwordList::english() {
    static const StopwordList list = [] {
        std::istringstream in{std::string(kEnglishStopwords)};
        return parse_stopwords(in);
    }();
    return list;
}

StopwordList StopwordList::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open stopword list " + path);
    return parse_stopwords(in);
}

bool StopwordList::contains(std::string_view norm) const {
    return words_.find(std::string(norm)) != words_.end();
}

std::string fold_case(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    std::size_t i = 0;
    while (i < word.size()) {
        std::size_t start = i;
        char32_t cp = decode(word, i);
        if (cp == kInvalid)
            out.append(word.substr(start, i - start));
        else
            encode(lower(cp), out);
    }
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    scan(text, [&](Token&& t) { out.push_back(std::move(t)); }, [] {});
    return out;
}

std::vector<Token> remove_stopwords(std::span<const Token> tokens, const StopwordList& stop) {
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stop.contains(t.norm)) out.push_back(t);
    return out;
}

SplitText split_sentences(std::string_view text) {
    SplitText out;
    std::size_t open = 0;
    auto close = [&] {
        if (out.tokens.size() > open) {
            out.spans.push_back({open, out.tokens.size()});
            open = out.tokens.size();
        }
    };
    scan(text, [&](Token&& t) { out.tokens.push_back(std::move(t)); }, close);
    close();
    return out;
}

} // namespace crown::text
