#include <doctest.h>

#include <crown/corpus.hpp>
#include <crown/error.hpp>

#include "support/temp_dir.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crown;
using corpus::CorpusStore;
using corpus::InputFormat;

namespace {

CorpusStore ingest_string(const std::string& s, InputFormat f, const std::filesystem::path& dir) {
    std::istringstream in(s);
    return CorpusStore::ingest(in, f, dir);
}

} // namespace

TEST_CASE("make_passage") {
    auto p = corpus::make_passage("p1", "hello world.");
    CHECK(p.id == "p1");
    CHECK(p.tokens.size() == 2);
    CHECK(p.sentences.size() == 1);

    auto q = corpus::make_passage("p2", "Who played the role of Alfred? Michael Caine did.");
    CHECK(q.scoring_norms() == std::vector<std::string>{"played", "role", "alfred", "michael", "caine"});
    CHECK(q.scoring_sentences() == std::vector<std::uint32_t>{0, 0, 0, 1, 1});
}

TEST_CASE("ingest TSV and reopen") {
    fixtures::TempDir dir;
    auto store = ingest_string("p1\thello world.\np2\tsecond passage here\r\n\np3\tthird\n", InputFormat::tsv,
                               dir.path() / "store");
    CHECK(store.size() == 3);
    CHECK(store.stats().doc_count == 3);
    CHECK(store.text("p2") == "second passage here");
    CHECK(store.id_at(2) == "p3");
    CHECK(store.position("p3") == 2);

    auto reopened = CorpusStore::open(dir.path() / "store");
    REQUIRE(reopened.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(reopened.id_at(i) == store.id_at(i));
        CHECK(reopened.text_at(i) == store.text_at(i));
        CHECK(reopened.scoring_length_at(i) == store.scoring_length_at(i));
    }
    CHECK(reopened.stats().token_count == store.stats().token_count);
    CHECK_THROWS_AS(reopened.get("nope"), NotFound);
    CHECK_FALSE(reopened.contains("nope"));
}

TEST_CASE("ingest JSONL with unicode and newlines") {
    fixtures::TempDir dir;
    auto store = ingest_string("{\"id\":\"a\",\"text\":\"Ça va.\\nOui!\"}\n{\"id\":\"b\",\"text\":\"x y\"}\n",
                               InputFormat::jsonl, dir.path());
    CHECK(store.text("a") == "Ça va.\nOui!");
    auto p = store.get("a");
    CHECK(p.sentences.size() == 2);
    std::ostringstream out;
    store.dump(out);
    CHECK(out.str() == "{\"id\":\"a\",\"text\":\"Ça va.\\nOui!\"}\n{\"id\":\"b\",\"text\":\"x y\"}\n");
}

TEST_CASE("ingest errors carry line numbers and leave nothing behind") {
    fixtures::TempDir dir;
    const auto target = dir.path() / "s";
    auto expect_line = [&](const std::string& input, InputFormat f, std::size_t line) {
        try {
            ingest_string(input, f, target);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
        }
        CHECK_FALSE(std::filesystem::exists(target / CorpusStore::kIndexFile));
    };
    expect_line("p1\tok\nbroken line\n", InputFormat::tsv, 2);
    expect_line("p1\tok\np1\tagain\n", InputFormat::tsv, 2);
    expect_line("\tno id\n", InputFormat::tsv, 1);
    expect_line("p1\t\n", InputFormat::tsv, 1);
    expect_line("{\"id\":\"a\",\"text\":\"t\"}\n{bad\n", InputFormat::jsonl, 2);
    expect_line("{\"id\":1,\"text\":\"t\"}\n", InputFormat::jsonl, 1);
}

TEST_CASE("parse_format") {
    CHECK(corpus::parse_format("tsv") == InputFormat::tsv);
    CHECK(corpus::parse_format("jsonl") == InputFormat::jsonl);
    CHECK_THROWS_AS(corpus::parse_format("csv"), InvalidArgument);
}

TEST_CASE("open detects corruption") {
    fixtures::TempDir dir;
    ingest_string("p1\thello world\np2\tanother one\n", InputFormat::tsv, dir.path());
    CHECK_NOTHROW(CorpusStore::open(dir.path()));

    SUBCASE("flipped byte") {
        const auto idx = dir.path() / CorpusStore::kIndexFile;
        std::fstream f(idx, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(14);
        f.put('\x7f');
        f.close();
        CHECK_THROWS_AS(CorpusStore::open(dir.path()), FormatError);
    }
    SUBCASE("empty index") {
        std::ofstream(dir.path() / CorpusStore::kIndexFile, std::ios::trunc).close();
        CHECK_THROWS_AS(CorpusStore::open(dir.path()), FormatError);
    }
    SUBCASE("truncated records") {
        std::filesystem::resize_file(dir.path() / CorpusStore::kRecordFile, 5);
        CHECK_THROWS_AS(CorpusStore::open(dir.path()), FormatError);
    }
    SUBCASE("missing directory") {
        CHECK_THROWS_AS(CorpusStore::open(dir.path() / "none"), Error);
    }
}

TEST_CASE("from_records") {
    auto store = CorpusStore::from_records({{"b", "beta text"}, {"a", "alpha text"}});
    CHECK(store.id_at(0) == "b");
    CHECK(store.get("a").text == "alpha text");
    CHECK_THROWS_AS(CorpusStore::from_records({{"a", "x"}, {"a", "y"}}), InvalidArgument);
    CHECK_THROWS_AS(CorpusStore::from_records({{"", "x"}}), InvalidArgument);
}

TEST_CASE("scoring_sequences matches per-passage tokenization") {
    std::vector<std::pair<std::string, std::string>> recs;
    for (int i = 0; i < 300; ++i)
        recs.emplace_back("p" + std::to_string(i), "Passage number " + std::to_string(i) + " about batman and gotham.");
    auto store = CorpusStore::from_records(recs);
    auto seqs = corpus::scoring_sequences(store);
    REQUIRE(seqs.size() == 300);
    for (std::size_t i = 0; i < seqs.size(); ++i) CHECK(seqs[i] == store.get_at(i).scoring_norms());
}
