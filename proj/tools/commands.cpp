#include "commands.hpp"

#include <crown/corpus.hpp>
#include <crown/eval.hpp>
#include <crown/pipeline.hpp>
#include <crown/retrieval.hpp>
#include <crown/service.hpp>
#include <crown/topics.hpp>
#include <crown/wpn.hpp>

#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <tuple>

namespace crown::cli {

namespace fs = std::filesystem;

namespace {

void require_exists(const std::string& what, const std::string& path) {
    if (path.empty()) throw UsageError(what + " path is not set");
    if (!fs::exists(path)) throw UsageError(what + " not found: " + path);
}

void require_artifacts(const ArtifactPaths& p) {
    require_exists("corpus store", p.corpus);
    require_exists("index", p.index);
    require_exists("wpn", p.wpn);
    require_exists("embeddings", p.embeddings);
}

Engine load_engine(const config::Config& config, std::ostream& log) {
    require_artifacts(config.paths);
    auto engine = Engine::load(config.paths);
    for (const auto& w : engine.embeddings().warnings()) log << "warning: " << w << '\n';
    return engine;
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// Passage text with highlighted sentences in [[...]] and top-node words in *...*.
std::string render(const corpus::Passage& p, const ranker::ScoredPassage& s) {
    std::set<std::string> bold;
    for (const auto& n : s.top_nodes) bold.insert(n.word);
    // (offset, order, marker): at one offset, closers go before openers and
    // word marks nest inside sentence marks.
    std::vector<std::tuple<std::size_t, int, const char*>> marks;
    for (auto idx : s.highlight) {
        const auto& span = p.sentences[idx];
        const auto& last = p.tokens[span.end - 1];
        marks.emplace_back(p.tokens[span.start].offset, 2, "[[");
        marks.emplace_back(last.offset + last.surface.size(), 1, "]]");
    }
    for (const auto& t : p.tokens) {
        if (!bold.count(t.norm)) continue;
        marks.emplace_back(t.offset, 3, "*");
        marks.emplace_back(t.offset + t.surface.size(), 0, "*");
    }
    std::sort(marks.begin(), marks.end());
    std::string out;
    std::size_t at = 0;
    for (const auto& [off, order, m] : marks) {
        out.append(p.text, at, off - at);
        out += m;
        at = off;
    }
    out.append(p.text, at, std::string::npos);
    return out;
}

void print_results(const Engine& engine, const std::vector<ranker::ScoredPassage>& ranked, std::size_t display_k,
                   std::ostream& out) {
    if (ranked.empty()) {
        out << "no passages matched\n";
        return;
    }
    for (std::size_t i = 0; i < ranked.size() && i < display_k; ++i) {
        const auto& s = ranked[i];
        out << '#' << (i + 1) << ' ' << s.id << "  total=" << fixed(s.total) << "  prior=" << fixed(s.prior)
            << " node=" << fixed(s.node) << " edge=" << fixed(s.edge) << " pos=" << fixed(s.pos) << '\n';
        out << "   nodes:";
        for (const auto& n : s.top_nodes) out << ' ' << n.word << '~' << n.query_token << '(' << fixed(n.similarity, 2) << ')';
        out << "\n   edges:";
        for (const auto& e : s.top_edges) out << " (" << e.first << ", " << e.second << ")=" << fixed(e.npmi, 2);
        out << "\n   " << render(engine.corpus().get(s.id), s) << "\n";
    }
}

} // namespace

void cmd_ingest(const std::string& input, const std::string& format, const std::string& out_dir, std::ostream& log) {
    require_exists("input", input);
    corpus::InputFormat fmt;
    try {
        fmt = corpus::parse_format(format);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    std::ifstream in(input);
    if (!in) throw Error("cannot open " + input);
    auto store = corpus::CorpusStore::ingest(in, fmt, out_dir);
    auto st = store.stats();
    log << st.doc_count << " passages ingested (" << st.token_count << " scoring tokens, avg length "
        << fixed(st.avg_passage_len, 2) << ")\n";
}

void cmd_build_index(const std::string& store_dir, const std::string& out, std::ostream& log) {
    require_exists("corpus store", store_dir);
    auto store = corpus::CorpusStore::open(store_dir);
    auto index = retrieval::InvertedIndex::build(store);
    index.save(out);
    log << "indexed " << index.doc_count() << " passages, " << index.vocab_size() << " terms, avg_len "
        << fixed(index.avg_len(), 4) << '\n';
}

void cmd_build_wpn(const std::string& store_dir, std::size_t window, std::uint64_t min_cooc, const std::string& out,
                   std::ostream& log) {
    require_exists("corpus store", store_dir);
    auto store = corpus::CorpusStore::open(store_dir);
    auto graph = wpn::build_wpn(store, {window, min_cooc});
    graph.save(out);
    log << "wpn: window=" << graph.window() << " nodes=" << graph.vocab_size() << " edges=" << graph.edge_count()
        << " tokens=" << graph.total_tokens() << " pairs=" << graph.total_pairs() << '\n';
}

void cmd_dump(const std::string& store_dir, std::ostream& out) {
    require_exists("corpus store", store_dir);
    corpus::CorpusStore::open(store_dir).dump(out);
}

void cmd_index_stats(const std::string& index_path, std::ostream& out) {
    require_exists("index", index_path);
    auto index = retrieval::InvertedIndex::load(index_path);
    out << "N\t" << index.doc_count() << "\navg_len\t" << fixed(index.avg_len(), 4) << "\nvocabulary\t"
        << index.vocab_size() << '\n';
}

void cmd_wpn_export(const std::string& wpn_path, std::ostream& out) {
    require_exists("wpn", wpn_path);
    wpn::Wpn::load(wpn_path).export_tsv(out);
}

void cmd_answer(const config::Config& config, std::istream& in, std::ostream& out) {
    auto engine = load_engine(config, out);
    conversation::ConversationState state;
    std::string line;
    out << "> " << std::flush;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        line = b == std::string::npos ? std::string() : line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
        if (line.empty()) {
        } else if (line == ":quit") {
            break;
        } else if (line == ":clear-last") {
            if (state.empty())
                out << "history is empty\n";
            else
                state.clear_last();
            out << "history: " << state.size() << " turn(s)\n";
        } else if (line == ":clear-all") {
            state.clear_all();
            out << "history: 0 turn(s)\n";
        } else if (line == ":params") {
            out << config::describe(config.run);
        } else if (line[0] == ':') {
            out << "unknown command " << line << " (use :clear-last, :clear-all, :params, :quit)\n";
        } else {
            try {
                state.append(line);
            } catch (const InvalidArgument& e) {
                out << e.what() << '\n';
                out << "> " << std::flush;
                continue;
            }
            auto cq = conversation::formulate_cq(state.turns(), config.run.strategy);
            out << "[turn " << state.size() << "] query:";
            for (const auto& item : cq.items) out << ' ' << item.norm << '/' << fixed(item.weight, 2);
            out << '\n';
            print_results(engine, engine.answer(state.turns(), config.run), config.run.params.display_k, out);
        }
        out << "> " << std::flush;
    }
    out << '\n';
}

void cmd_trec_run(const config::Config& config, const std::string& topics_path, const std::string& out_path,
                  const std::string& tag, std::ostream& log) {
    require_exists("topics", topics_path);
    auto all_topics = topics::load_topics(topics_path);
    auto engine = load_engine(config, log);
    const std::string run_tag = tag.empty() ? config.run.name : tag;

    std::vector<eval::RunRecord> records;
    std::size_t queries = 0;
    for (const auto& topic : all_topics) {
        std::vector<conversation::Turn> history;
        for (const auto& turn : topic.turns) {
            const auto qid = topics::query_id(topic, turn);
            try {
                history.push_back(conversation::make_turn(history.size() + 1, turn.utterance));
            } catch (const InvalidArgument& e) {
                log << "warning: " << qid << " skipped: " << e.what() << '\n';
                continue;
            }
            auto ranked = engine.answer(history, config.run);
            const auto n = std::min<std::size_t>(ranked.size(), 1000);
            for (std::size_t i = 0; i < n; ++i) records.push_back({qid, ranked[i].id, i + 1, ranked[i].total, run_tag});
            ++queries;
        }
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path);
    eval::write_run(out, records);
    log << "wrote " << records.size() << " records for " << queries << " queries to " << out_path << '\n';
}

void cmd_eval(const std::string& run_path, const std::string& qrels_path, const std::string& metrics,
              const std::string& out_tsv, int rel_threshold, std::ostream& out, std::ostream& log) {
    require_exists("run file", run_path);
    require_exists("qrels", qrels_path);
    std::vector<eval::MetricSpec> specs;
    try {
        specs = eval::parse_metrics(metrics);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    auto run = eval::read_run_file(run_path);
    auto qrels = eval::Qrels::load(qrels_path);
    auto report = eval::turnwise_report(run, qrels, specs, rel_threshold);
    if (!report.unjudged.empty()) {
        log << "warning: " << report.unjudged.size() << " run queries have no judgments:";
        for (const auto& q : report.unjudged) log << ' ' << q;
        log << '\n';
    }
    report.write_text(out);
    if (!out_tsv.empty()) {
        std::ofstream tsv(out_tsv);
        if (!tsv) throw Error("cannot write " + out_tsv);
        report.write_tsv(tsv);
    }
}

void cmd_serve(const config::Config& config, const std::string& host, int port, const std::string& ui_dir,
               std::ostream& log) {
    auto engine = load_engine(config, log);
    service::Service svc(engine);
    httplib::Server server;
    service::mount(server, svc, ui_dir);
    if (!server.bind_to_port(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
    log << "serving " << engine.corpus().size() << " passages on http://" << host << ':' << port << std::endl;
    server.listen_after_bind();
}

namespace {

// Registers the run-configuration flags shared by answer, trec-run and serve.
void add_run_options(CLI::App* cmd, config::Settings& flags, std::string& config_path) {
    cmd->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    struct Opt {
        const char* flag;
        const char* key;
        const char* help;
    };
    static const Opt opts[] = {
        {"--preset", "preset", "run1, run2, run3 or run4"},
        {"--corpus", "corpus", "corpus store directory"},
        {"--index", "index", "inverted index file"},
        {"--wpn", "wpn", "word proximity network file"},
        {"--embeddings", "embeddings", "word2vec text file"},
        {"--alpha", "alpha", "node similarity threshold"},
        {"--beta", "beta", "edge NPMI threshold"},
        {"--window", "window", "edge window in tokens"},
        {"--h1", "h1", "weight of the retrieval prior"},
        {"--h2", "h2", "weight of the node score"},
        {"--h3", "h3", "weight of the edge score"},
        {"--h4", "h4", "weight of the position score"},
        {"--pool-k", "pool_k", "candidates fetched from the baseline retriever"},
        {"--display-k", "display_k", "passages shown per answer"},
        {"--strategy", "strategy", "conversational query: cq1, cq2 or cq3"},
        {"--retrieval", "retrieval", "single or union"},
    };
    for (const auto& o : opts) {
        std::string key = o.key;
        cmd->add_option_function<std::string>(o.flag, [&flags, key](const std::string& v) { flags[key] = v; }, o.help);
    }
}

config::Config resolve_config(const std::string& config_path, const config::Settings& flags) {
    try {
        auto file = config_path.empty() ? config::Settings{} : config::load_settings(config_path);
        return config::resolve(file, flags);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
}

} // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conversational passage ranking over word proximity networks", "crown"};
    app.require_subcommand(1);

    std::string input, format = "tsv", out_path, store_dir, index_path, wpn_path, config_path, topics_path, tag,
                run_path, qrels_path, metrics = "ap@5,ndcg@1000", tsv_path, host = "127.0.0.1", ui_dir;
    std::size_t window = 3;
    std::uint64_t min_cooc = 1;
    int port = 8080;
    int rel_threshold = 1;
    config::Settings flags;

    auto* ingest = app.add_subcommand("ingest", "Ingest a TSV or JSONL passage collection");
    ingest->add_option("--input,-i", input, "passage file")->required()->check(CLI::ExistingFile);
    ingest->add_option("--format,-f", format, "tsv or jsonl")->check(CLI::IsMember({"tsv", "jsonl"}));
    ingest->add_option("--out,-o", out_path, "store directory")->required();

    auto* build_index = app.add_subcommand("build-index", "Build the BM25 inverted index");
    build_index->add_option("--store,-s", store_dir, "corpus store directory")->required()->check(CLI::ExistingDirectory);
    build_index->add_option("--out,-o", out_path, "index file")->required();

    auto* build_wpn = app.add_subcommand("build-wpn", "Build the word proximity network");
    build_wpn->add_option("--store,-s", store_dir, "corpus store directory")->required()->check(CLI::ExistingDirectory);
    build_wpn->add_option("--window,-w", window, "co-occurrence window")->check(CLI::PositiveNumber);
    build_wpn->add_option("--min-cooc", min_cooc, "drop pairs seen fewer times")->check(CLI::PositiveNumber);
    build_wpn->add_option("--out,-o", out_path, "wpn file")->required();

    auto* dump = app.add_subcommand("dump", "Print a corpus store as JSONL");
    dump->add_option("--store,-s", store_dir, "corpus store directory")->required()->check(CLI::ExistingDirectory);

    auto* index_cmd = app.add_subcommand("index", "Inspect an inverted index");
    index_cmd->require_subcommand(1);
    auto* index_stats = index_cmd->add_subcommand("stats", "Print N, avg_len and vocabulary size");
    index_stats->add_option("index", index_path, "index file")->required()->check(CLI::ExistingFile);

    auto* wpn_cmd = app.add_subcommand("wpn", "Inspect a word proximity network");
    wpn_cmd->require_subcommand(1);
    auto* wpn_export = wpn_cmd->add_subcommand("export", "Print edges as TSV");
    wpn_export->add_option("wpn", wpn_path, "wpn file")->required()->check(CLI::ExistingFile);

    auto* answer = app.add_subcommand("answer", "Interactive conversational answering");
    add_run_options(answer, flags, config_path);

    auto* trec_run = app.add_subcommand("trec-run", "Rank every turn of a topics file into a TREC run");
    add_run_options(trec_run, flags, config_path);
    trec_run->add_option("--topics,-t", topics_path, "topics JSON")->required()->check(CLI::ExistingFile);
    trec_run->add_option("--out,-o", out_path, "run file")->required();
    trec_run->add_option("--tag", tag, "run tag (default: preset name)");

    auto* eval_cmd = app.add_subcommand("eval", "Turn-wise evaluation of a run file");
    eval_cmd->add_option("--run,-r", run_path, "run file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--qrels,-q", qrels_path, "qrels file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--metrics,-m", metrics, "comma-separated, e.g. ap@5,ndcg@1000,err@20");
    eval_cmd->add_option("--out,-o", tsv_path, "write the report as TSV");
    eval_cmd->add_option("--rel-threshold", rel_threshold, "minimum grade counted relevant by AP")
        ->check(CLI::PositiveNumber);

    auto* serve = app.add_subcommand("serve", "Run the JSON HTTP service");
    add_run_options(serve, flags, config_path);
    serve->add_option("--host", host, "listen address");
    serve->add_option("--port", port, "listen port")->check(CLI::Range(0, 65535));
    serve->add_option("--ui", ui_dir, "static UI directory served at /")->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*ingest) cmd_ingest(input, format, out_path, out);
        else if (*build_index) cmd_build_index(store_dir, out_path, out);
        else if (*build_wpn) cmd_build_wpn(store_dir, window, min_cooc, out_path, out);
        else if (*dump) cmd_dump(store_dir, out);
        else if (*index_stats) cmd_index_stats(index_path, out);
        else if (*wpn_export) cmd_wpn_export(wpn_path, out);
        else if (*answer) cmd_answer(resolve_config(config_path, flags), in, out);
        else if (*trec_run) cmd_trec_run(resolve_config(config_path, flags), topics_path, out_path, tag, err);
        else if (*eval_cmd) cmd_eval(run_path, qrels_path, metrics, tsv_path, rel_threshold, out, err);
        else if (*serve) cmd_serve(resolve_config(config_path, flags), host, port, ui_dir, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace crown::cli
