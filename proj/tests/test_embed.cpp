#include <doctest.h>

#include <crown/embed.hpp>
#include <crown/error.hpp>

#include "support/temp_dir.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace crown;
using embed::EmbeddingStore;

namespace {

EmbeddingStore parse(const std::string& s) {
    std::istringstream in(s);
    return EmbeddingStore::parse(in);
}

std::size_t parse_error_line(const std::string& s) {
    try {
        parse(s);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST_CASE("parse normalizes and folds case") {
    auto e = parse("3 2\nBatman 3 4\nrobin 1 0\njoker 0 -2\n");
    CHECK(e.dim() == 2);
    CHECK(e.size() == 3);
    CHECK(e.contains("batman"));
    CHECK_FALSE(e.contains("Batman"));
    auto v = e.vector("batman");
    REQUIRE(v.size() == 2);
    CHECK(v[0] == doctest::Approx(0.6));
    CHECK(v[1] == doctest::Approx(0.8));
    CHECK(e.vector("bane").empty());
}

TEST_CASE("sim") {
    auto e = parse("3 2\nbatman 3 4\nrobin 1 0\njoker 0 -2\n");
    CHECK(*embed::sim(e, "batman", "robin") == doctest::Approx(0.6));
    CHECK(*embed::sim(e, "robin", "joker") == doctest::Approx(0.0));
    CHECK(*embed::sim(e, "batman", "joker") == doctest::Approx(-0.8));
    CHECK(*embed::sim(e, "batman", "batman") == 1.0);
    CHECK(*embed::sim(e, "bane", "bane") == 1.0);
    CHECK_FALSE(embed::sim(e, "bane", "batman").has_value());
}

TEST_CASE("cosine is within [-1, 1] and symmetric") {
    std::ostringstream s;
    s << "40 5\n";
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int i = 0; i < 40; ++i) {
        s << "w" << i << "x";
        for (int d = 0; d < 5; ++d) s << ' ' << g(rng);
        s << '\n';
    }
    auto e = parse(s.str());
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) {
            auto a = "w" + std::to_string(i) + "x", b = "w" + std::to_string(j) + "x";
            double v = *embed::sim(e, a, b);
            CHECK(std::abs(v) <= 1.0);
            CHECK(v == *embed::sim(e, b, a));
        }
}

TEST_CASE("parse errors") {
    CHECK(parse_error_line("2 3\naa 1 2 3\nbb 1 2\n") == 3);
    CHECK(parse_error_line("2 3\naa 1 2 3\nbb 1 zz 3\n") == 3);
    CHECK(parse_error_line("2 x\n") == 1);
    CHECK(parse_error_line("1 2\naa 0 0\n") == 2);
    CHECK(parse_error_line("") == 1);
    CHECK_THROWS_AS(parse("3 2\naa 1 2\n"), ParseError);
}

TEST_CASE("duplicates keep the first vector") {
    auto e = parse("2 2\naa 1 0\nAA 0 1\n");
    CHECK(e.size() == 1);
    CHECK(e.vector("aa")[0] == 1.0);
    CHECK(e.warnings().size() == 1);
}

TEST_CASE("load from file") {
    fixtures::TempDir dir;
    {
        std::ofstream f(dir / "e.txt");
        f << "1 2\naa 1 1\n";
    }
    CHECK(EmbeddingStore::load(dir / "e.txt").size() == 1);
    CHECK_THROWS_AS(EmbeddingStore::load(dir / "missing.txt"), Error);
}

TEST_CASE("toy embeddings load") {
    auto e = EmbeddingStore::load(CROWN_DATA_DIR "/toy/embeddings.txt");
    CHECK(e.dim() == 16);
    CHECK(*embed::sim(e, "alfred", "butler") > 0.7);
    CHECK(*embed::sim(e, "alfred", "bats") < 0.7);
}
