#include <doctest.h>

#include <crown/config.hpp>
#include <crown/error.hpp>

#include <sstream>

using namespace crown;
using namespace crown::config;

namespace {

Settings parse(const std::string& s) {
    std::istringstream in(s);
    return parse_settings(in);
}

} // namespace

TEST_CASE("parse_settings") {
    auto s = parse("# comment\ncorpus = /data/store\n\n  alpha=0.8  # inline\nstrategy = cq2\n");
    CHECK(s.size() == 3);
    CHECK(s["corpus"] == "/data/store");
    CHECK(s["alpha"] == "0.8");
    try {
        parse("alpha = 1\nbroken\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse(" = 3\n"), ParseError);
}

TEST_CASE("resolve precedence: preset, then file, then flags") {
    auto c = resolve({}, {});
    CHECK(c.run.name == "run1");
    CHECK(c.run.params == ranker::preset("run1").params);

    c = resolve({{"preset", "run4"}}, {});
    CHECK(c.run.params.alpha == 0.85);
    CHECK(c.run.strategy == conversation::CqStrategy::cq2);

    c = resolve({{"preset", "run4"}, {"alpha", "0.9"}}, {{"preset", "run2"}});
    CHECK(c.run.name == "run2");
    CHECK(c.run.params.alpha == 0.9);
    CHECK(c.run.params.h1 == 0.9);

    c = resolve({{"alpha", "0.9"}, {"corpus", "a"}}, {{"alpha", "0.75"}, {"wpn", "w"}, {"strategy", "cq3"}});
    CHECK(c.run.params.alpha == 0.75);
    CHECK(c.paths.corpus == "a");
    CHECK(c.paths.wpn == "w");
    CHECK(c.run.strategy == conversation::CqStrategy::cq3);

    c = resolve({}, {{"h1", "0.5"}, {"h4", "0.1"}, {"display_k", "10"}, {"retrieval", "single"}});
    CHECK(c.run.params.h4 == 0.1);
    CHECK(c.run.params.display_k == 10);
}

TEST_CASE("resolve rejects bad input") {
    CHECK_THROWS_AS(resolve({{"colour", "red"}}, {}), InvalidArgument);
    CHECK_THROWS_AS(resolve({}, {{"alpha", "high"}}), InvalidArgument);
    CHECK_THROWS_AS(resolve({}, {{"h1", "0.9"}}), InvalidArgument);
    CHECK_THROWS_AS(resolve({}, {{"preset", "run9"}}), InvalidArgument);
    CHECK_THROWS_AS(resolve({}, {{"strategy", "cq7"}}), InvalidArgument);
    CHECK_THROWS_AS(resolve({}, {{"window", "-1"}}), InvalidArgument);
    CHECK_THROWS_AS(resolve({}, {{"retrieval", "union"}}), InvalidArgument);
    CHECK_NOTHROW(resolve({}, {{"preset", "run3"}}));
}

TEST_CASE("known keys and describe") {
    for (const auto& k : known_keys()) {
        if (k == "preset") continue;
        Settings s{{k, k == "strategy" ? "cq1" : k == "retrieval" ? "single" : "0.6"}};
        if (k == "window" || k == "pool_k" || k == "display_k") s[k] = "5";
        if (k == "h1") s["h2"] = "0.3", s["h3"] = "0.1";
        if (k == "h2" || k == "h3" || k == "h4") continue;
        CHECK_NOTHROW(resolve({}, s));
    }
    auto text = describe(ranker::preset("run3"));
    CHECK(text.find("preset = run3") != std::string::npos);
    CHECK(text.find("h2 = 0.6") != std::string::npos);
    CHECK(text.find("retrieval = union") != std::string::npos);
}
