#include <doctest.h>

#include <crown/error.hpp>
#include <crown/text.hpp>

#include "support/temp_dir.hpp"

#include <fstream>
#include <random>

using namespace crown::text;

namespace {

std::vector<std::string> norms(std::string_view s) {
    std::vector<std::string> out;
    for (const auto& t : tokenize(s)) out.push_back(t.norm);
    return out;
}

using V = std::vector<std::string>;

} // namespace

TEST_CASE("tokenize golden cases") {
    CHECK(norms("Hello, World!") == V{"hello", "world"});
    CHECK(norms("Nolan's Batman") == V{"nolan", "batman"});
    CHECK(norms("a cat is a cat") == V{"cat", "is", "cat"});
    CHECK(norms("in 2005 and 7 years") == V{"in", "2005", "and", "7", "years"});
    CHECK(norms("well-known e-mail") == V{"well", "known", "mail"});
    CHECK(norms("3.5 million") == V{"3", "5", "million"});
    CHECK(norms("") == V{});
    CHECK(norms("  ...  !? ") == V{});
    CHECK(norms("x2 B52") == V{"x2", "b52"});
}

TEST_CASE("tokenize folds case beyond ASCII") {
    CHECK(norms("ÉCOLE Ærø") == V{"école", "ærø"});
    CHECK(norms("ŁÓDŹ") == V{"łódź"});
    CHECK(norms("ΑΘΗΝΑ") == V{"αθηνα"});
    CHECK(norms("МОСКВА Ёж") == V{"москва", "ёж"});
    CHECK(norms("東京タワー") == V{"東京タワー"});
}

TEST_CASE("tokenize separates on non-word code points") {
    CHECK(norms("rock—paper“scissors”") == V{"rock", "paper", "scissors"});
    CHECK(norms("price: 5€ total") == V{"price", "5", "total"});
    CHECK(norms("café’s menu") == V{"café", "menu"});
}

TEST_CASE("token offsets point at the surface text") {
    const std::string text = "Michael Caine played Alfred, the butler. Ça va?";
    for (const auto& t : tokenize(text)) CHECK(text.substr(t.offset, t.surface.size()) == t.surface);
    auto toks = tokenize(text);
    REQUIRE(toks.size() == 8);
    CHECK(toks[2].surface == "played");
    CHECK(toks[2].offset == 14);
    CHECK(toks[6].surface == "Ça");
    CHECK(toks[6].norm == "ça");
}

TEST_CASE("malformed UTF-8 acts as a separator") {
    CHECK(norms(std::string("ab\xff" "cd")) == V{"ab", "cd"});
    CHECK(norms(std::string("ab\xc3")) == V{"ab"});
}

TEST_CASE("fold_case") {
    CHECK(fold_case("BATMAN") == "batman");
    CHECK(fold_case("Ÿ") == "ÿ");
    CHECK(fold_case("Ĳ") == "ĳ");
    CHECK(fold_case("already") == "already");
}

TEST_CASE("english stopwords") {
    const auto& stop = StopwordList::english();
    std::ifstream file(CROWN_DATA_DIR "/stopwords_en.txt");
    std::string line;
    std::size_t lines = 0;
    while (std::getline(file, line)) {
        ++lines;
        // single letters never survive tokenization
        if (line.size() > 1) CHECK(stop.contains(line));
    }
    CHECK(lines == 187);
    for (const char* w : {"the", "of", "who", "what", "when", "did", "his", "about", "me"}) CHECK(stop.contains(w));
    for (const char* w : {"batman", "alfred", "played", "role", "nolan"}) CHECK_FALSE(stop.contains(w));
}

TEST_CASE("stopword file loading normalizes entries") {
    fixtures::TempDir dir;
    {
        std::ofstream f(dir / "stop.txt");
        f << "# comment\nThe\n\nAND\n";
    }
    auto list = StopwordList::load(dir / "stop.txt");
    CHECK(list.size() == 2);
    CHECK(list.contains("the"));
    CHECK(list.contains("and"));
    CHECK_THROWS_AS(StopwordList::load(dir / "missing.txt"), crown::Error);
}

TEST_CASE("remove_stopwords keeps order") {
    auto toks = tokenize("who played the role of alfred");
    auto kept = remove_stopwords(toks, StopwordList::english());
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].norm == "played");
    CHECK(kept[1].norm == "role");
    CHECK(kept[2].norm == "alfred");
}

TEST_CASE("split_sentences") {
    auto s = split_sentences("Batman Begins came first. Then The Dark Knight! Was it good? Yes");
    REQUIRE(s.spans.size() == 4);
    CHECK(s.spans[0] == SentenceSpan{0, 4});
    CHECK(s.spans[1] == SentenceSpan{4, 8});
    CHECK(s.spans[3].size() == 1);

    SUBCASE("terminator needs trailing whitespace or end of text") {
        auto t = split_sentences("Version 3.5 shipped.Next line. End.");
        REQUIRE(t.spans.size() == 2);
        CHECK(t.tokens[t.spans[0].end - 1].norm == "line");
    }
    SUBCASE("empty sentences are skipped") {
        auto t = split_sentences("... ! ? Word. . . Other");
        REQUIRE(t.spans.size() == 2);
    }
    SUBCASE("abbreviations split") {
        CHECK(split_sentences("Dr. Smith arrived.").spans.size() == 2);
    }
    SUBCASE("no tokens") {
        CHECK(split_sentences(".!?").spans.empty());
    }
}

TEST_CASE("split_sentences spans partition the tokens") {
    std::mt19937_64 rng(7);
    const char* pieces[] = {"word", "Other", ".", " ", "!", "?", "a", "42", "\n", "é", ",", "x."};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(pieces) - 1), len(0, 40);
    for (int iter = 0; iter < 300; ++iter) {
        std::string text;
        for (auto n = len(rng); n > 0; --n) text += pieces[pick(rng)];
        auto s = split_sentences(text);
        CHECK(s.tokens == tokenize(text));
        std::size_t expect = 0;
        for (const auto& span : s.spans) {
            CHECK(span.start == expect);
            CHECK(span.end > span.start);
            expect = span.end;
        }
        CHECK(expect == s.tokens.size());
    }
}
