#include <doctest.h>

#include "commands.hpp"

#include "oracle/oracle.hpp"
#include "support/temp_dir.hpp"
#include "support/toy.hpp"

#include <crown/eval.hpp>

#include <fstream>
#include <sstream>

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), "crown");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = crown::cli::run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

/// Builds the toy artifacts under `dir` through the CLI.
void build_toy(const fixtures::TempDir& dir) {
    REQUIRE(run({"ingest", "-i", fixtures::toy_path("batman.tsv"), "-o", dir / "store"}).code == 0);
    REQUIRE(run({"build-index", "-s", dir / "store", "-o", dir / "index.bin"}).code == 0);
    REQUIRE(run({"build-wpn", "-s", dir / "store", "-o", dir / "wpn.bin"}).code == 0);
}

std::vector<std::string> artifact_flags(const fixtures::TempDir& dir) {
    return {"--corpus", dir / "store", "--index", dir / "index.bin", "--wpn", dir / "wpn.bin", "--embeddings",
            fixtures::toy_path("embeddings.txt")};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace

TEST_CASE("ingest") {
    fixtures::TempDir dir;
    {
        std::ofstream f(dir / "three.tsv");
        f << "p1\tfirst passage\np2\tsecond passage\np3\tthird passage\n";
    }
    auto r = run({"ingest", "-i", dir / "three.tsv", "-o", dir / "store"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "3 passages ingested"));

    CHECK(run({"ingest", "-i", dir / "missing.tsv", "-o", dir / "s2"}).code == 2);
    {
        std::ofstream f(dir / "bad.tsv");
        f << "p1\tok\nnot a record\n";
    }
    r = run({"ingest", "-i", dir / "bad.tsv", "-o", dir / "s3"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "line 2"));
    CHECK(run({"ingest", "-i", dir / "three.tsv", "-o", dir / "s4", "--format", "xml"}).code == 2);
}

TEST_CASE("build and inspect artifacts") {
    fixtures::TempDir dir;
    build_toy(dir);

    std::vector<std::vector<std::string>> seqs;
    for (const auto& [id, text] : fixtures::toy_records()) seqs.push_back(oracle::passage_data(id, text).norms);
    const auto counts = oracle::count_pairs(seqs, 3);
    auto r = run({"build-wpn", "-s", dir / "store", "-o", dir / "wpn.bin", "-w", "3"});
    CHECK(contains(r.out, "edges=" + std::to_string(counts.cooc.size())));
    CHECK(contains(r.out, "pairs=" + std::to_string(counts.pairs)));

    auto stats = run({"index", "stats", dir / "index.bin"});
    CHECK(stats.code == 0);
    CHECK(contains(stats.out, "N\t14\n"));

    auto exported = run({"wpn", "export", dir / "wpn.bin"});
    CHECK(exported.code == 0);
    CHECK(static_cast<std::size_t>(std::count(exported.out.begin(), exported.out.end(), '\n')) == counts.cooc.size());

    auto dump = run({"dump", "-s", dir / "store"});
    CHECK(contains(dump.out, "{\"id\":\"b02\",\"text\":\"Michael Caine played Alfred"));

    CHECK(run({"build-wpn", "-s", dir / "store", "-o", dir / "w.bin", "-w", "0"}).code == 2);
    CHECK(run({"build-index", "-s", dir / "nostore", "-o", dir / "i.bin"}).code == 2);
    CHECK(run({"index", "stats", dir / "wpn.bin"}).code == 1);
}

TEST_CASE("answer loop") {
    fixtures::TempDir dir;
    build_toy(dir);
    auto r = run(concat({"answer"}, artifact_flags(dir)),
                 "when did nolan make his batman movies\nwho played the role of alfred\n:clear-last\n:params\n"
                 ":bogus\nwhat is it\n:clear-all\n:quit\nnever read\n");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "#1 b01"));
    CHECK(contains(r.out, "[turn 2]"));
    CHECK(contains(r.out, "#1 b02"));
    CHECK(contains(r.out, "history: 1 turn(s)"));
    CHECK(contains(r.out, "alpha = 0.7"));
    CHECK(contains(r.out, "unknown command :bogus"));
    CHECK(contains(r.out, "no content words"));
    CHECK(contains(r.out, "history: 0 turn(s)"));
    CHECK(contains(r.out, "[[Christopher *Nolan* *made* three *Batman* *movies*]]"));
    CHECK_FALSE(contains(r.out, "never read"));

    auto missing = run({"answer", "--corpus", dir / "nothing"});
    CHECK(missing.code == 2);
    CHECK(run(concat({"answer", "--preset", "run7"}, artifact_flags(dir))).code == 2);
    CHECK(run(concat({"answer", "--h1", "0.9"}, artifact_flags(dir))).code == 2);
}

TEST_CASE("trec-run and eval") {
    fixtures::TempDir dir;
    build_toy(dir);
    auto args = concat({"trec-run", "--topics", fixtures::toy_path("topics.json"), "-o", dir / "a.run"},
                       artifact_flags(dir));
    auto r = run(args);
    REQUIRE(r.code == 0);
    CHECK(contains(r.err, "8 queries"));
    args[4] = dir / "b.run";
    REQUIRE(run(args).code == 0);
    const auto a = slurp(dir / "a.run");
    CHECK(a == slurp(dir / "b.run"));
    CHECK(contains(a, "1_2 Q0 b02 1 "));
    CHECK(contains(a, " run1\n"));

    auto records = crown::eval::read_run_file(dir / "a.run");
    std::set<std::string> qids;
    for (const auto& rec : records) qids.insert(rec.qid);
    CHECK(qids.size() == 8);

    auto tagged = concat({"trec-run", "--topics", fixtures::toy_path("topics.json"), "-o", dir / "c.run", "--tag",
                          "mine", "--preset", "run3"},
                         artifact_flags(dir));
    REQUIRE(run(tagged).code == 0);
    CHECK(contains(slurp(dir / "c.run"), " mine\n"));

    {
        std::ofstream q(dir / "partial.qrels");
        q << "1_1 0 b01 2\n1_2 0 b02 2\n";
    }
    auto e = run({"eval", "-r", dir / "a.run", "-q", dir / "partial.qrels", "-m", "ndcg@3,ap@5", "-o", dir / "r.tsv"});
    CHECK(e.code == 0);
    CHECK(contains(e.out, "ndcg@3"));
    CHECK(contains(e.err, "6 run queries have no judgments"));
    auto tsv = slurp(dir / "r.tsv");
    CHECK(tsv.rfind("turn\tqueries\tndcg@3\tap@5\n", 0) == 0);
    CHECK(contains(tsv, "\nAll\t8\t"));

    CHECK(run({"eval", "-r", dir / "a.run", "-q", dir / "partial.qrels", "-m", "bogus@3"}).code == 2);
    {
        std::ofstream bad(dir / "bad.run");
        bad << "1_1 Q0 b01 2 1.0 t\n";
    }
    CHECK(run({"eval", "-r", dir / "bad.run", "-q", dir / "partial.qrels"}).code == 1);
    {
        std::ofstream bad(dir / "bad.json");
        bad << "[{\"number\": 1,\n \"turns\": [}]";
    }
    auto tr = run(concat({"trec-run", "--topics", dir / "bad.json", "-o", dir / "x.run"}, artifact_flags(dir)));
    CHECK(tr.code == 1);
    CHECK(contains(tr.err, "line 2"));
}

TEST_CASE("config file") {
    fixtures::TempDir dir;
    build_toy(dir);
    {
        std::ofstream c(dir / "crown.conf");
        c << "corpus = " << (dir / "store") << "\nindex = " << (dir / "index.bin") << "\nwpn = " << (dir / "wpn.bin")
          << "\nembeddings = " << fixtures::toy_path("embeddings.txt") << "\npreset = run4\n";
    }
    auto r = run({"answer", "--config", dir / "crown.conf", "--alpha", "0.9"}, ":params\n");
    CHECK(r.code == 0);
    CHECK(contains(r.out, "preset = run4"));
    CHECK(contains(r.out, "alpha = 0.9"));
    CHECK(contains(r.out, "strategy = cq2"));
    {
        std::ofstream c(dir / "bad.conf");
        c << "colour = red\n";
    }
    CHECK(run({"answer", "--config", dir / "bad.conf"}).code == 2);
}

TEST_CASE("usage") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"ingest"}).code == 2);
    CHECK(run({"wpn"}).code == 2);
}
