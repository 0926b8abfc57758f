#include <crown/service.hpp>

#include <crown/error.hpp>

#include <chrono>
#include <cmath>
#include <set>

#include <httplib.h>

namespace crown::service {

using nlohmann::json;

namespace {

// Field-level request validation failure.
struct BadRequest {
    std::string field;
    std::string message;
};

double number_field(const json& params, const char* key, double fallback) {
    if (!params.contains(key)) return fallback;
    const auto& v = params[key];
    if (!v.is_number()) throw BadRequest{std::string("params.") + key, "must be a number"};
    return v.get<double>();
}

std::size_t count_field(const json& params, const char* key, std::size_t fallback) {
    if (!params.contains(key)) return fallback;
    const auto& v = params[key];
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw BadRequest{std::string("params.") + key, "must be a positive integer"};
    return static_cast<std::size_t>(v.get<long long>());
}

std::string field_of(const std::string& message) {
    for (const char* f : {"alpha", "beta", "window", "pool_k", "display_k", "h1", "h2", "h3", "h4"})
        if (message.rfind(f, 0) == 0) return std::string("params.") + f;
    if (message.rfind("weights", 0) == 0) return "params.h";
    return "params";
}

ranker::RunConfig parse_params(const json& req) {
    auto run = ranker::preset("run1");
    if (!req.contains("params") || req["params"].is_null()) return run;
    const auto& p = req["params"];
    if (!p.is_object()) throw BadRequest{"params", "must be an object"};
    auto& rp = run.params;
    rp.alpha = number_field(p, "alpha", rp.alpha);
    rp.beta = number_field(p, "beta", rp.beta);
    rp.window = count_field(p, "window", rp.window);
    rp.h1 = number_field(p, "h1", rp.h1);
    rp.h2 = number_field(p, "h2", rp.h2);
    rp.h3 = number_field(p, "h3", rp.h3);
    rp.h4 = number_field(p, "h4", rp.h4);
    rp.pool_k = count_field(p, "pool_k", rp.pool_k);
    rp.display_k = count_field(p, "display_k", rp.display_k);
    if (p.contains("strategy")) {
        if (!p["strategy"].is_string()) throw BadRequest{"params.strategy", "must be a string"};
        try {
            run.strategy = conversation::parse_strategy(p["strategy"].get<std::string>());
        } catch (const InvalidArgument& e) {
            throw BadRequest{"params.strategy", e.what()};
        }
    }
    if (p.contains("retrieval")) {
        if (!p["retrieval"].is_string()) throw BadRequest{"params.retrieval", "must be a string"};
        try {
            run.mode = ranker::parse_retrieval_mode(p["retrieval"].get<std::string>());
        } catch (const InvalidArgument& e) {
            throw BadRequest{"params.retrieval", e.what()};
        }
    }
    try {
        ranker::validate(rp, ranker::ParamRange::interface, 1e-6);
    } catch (const InvalidArgument& e) {
        throw BadRequest{field_of(e.what()), e.what()};
    }
    // Within tolerance; make the sum exact for the library check.
    const double sum = rp.h1 + rp.h2 + rp.h3 + rp.h4;
    rp.h1 /= sum, rp.h2 /= sum, rp.h3 /= sum, rp.h4 /= sum;
    if (run.mode == ranker::RetrievalMode::union_of_queries && rp.h1 != 0.0)
        throw BadRequest{"params.h1", "h1 must be 0 with union retrieval"};
    return run;
}

std::vector<conversation::Turn> parse_history(const json& req) {
    if (!req.is_object()) throw BadRequest{"", "request body must be a JSON object"};
    if (!req.contains("question") || !req["question"].is_string())
        throw BadRequest{"question", "must be a non-empty string"};
    auto question = req["question"].get<std::string>();
    if (question.find_first_not_of(" \t\r\n") == std::string::npos)
        throw BadRequest{"question", "must be a non-empty string"};

    std::vector<std::string> raw;
    if (req.contains("history") && !req["history"].is_null()) {
        if (!req["history"].is_array()) throw BadRequest{"history", "must be a list of strings"};
        for (const auto& h : req["history"]) {
            if (!h.is_string()) throw BadRequest{"history", "must be a list of strings"};
            raw.push_back(h.get<std::string>());
        }
    }
    raw.push_back(std::move(question));

    std::vector<conversation::Turn> turns;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        try {
            turns.push_back(conversation::make_turn(i + 1, raw[i]));
        } catch (const InvalidArgument& e) {
            throw BadRequest{i + 1 == raw.size() ? "question" : "history[" + std::to_string(i) + "]", e.what()};
        }
    }
    return turns;
}

json result_json(const ranker::ScoredPassage& s, const corpus::Passage& p) {
    json nodes = json::array();
    std::set<std::string> bold_words;
    for (const auto& n : s.top_nodes) {
        nodes.push_back({{"word", n.word}, {"query_token", n.query_token}, {"similarity", n.similarity}});
        bold_words.insert(n.word);
    }
    json edges = json::array();
    for (const auto& e : s.top_edges) edges.push_back({{"words", {e.first, e.second}}, {"npmi", e.npmi}});

    json sentences = json::array();
    for (const auto& span : p.sentences) {
        const auto& first = p.tokens[span.start];
        const auto& last = p.tokens[span.end - 1];
        sentences.push_back({first.offset, last.offset + last.surface.size()});
    }
    json bold = json::array();
    for (const auto& t : p.tokens)
        if (bold_words.count(t.norm)) bold.push_back({t.offset, t.surface.size()});

    return {{"id", s.id},
            {"text", p.text},
            {"total", s.total},
            {"components", {{"prior", s.prior}, {"node", s.node}, {"edge", s.edge}, {"pos", s.pos}}},
            {"baseline_rank", s.baseline_rank},
            {"top_nodes", nodes},
            {"top_edges", edges},
            {"highlight", s.highlight},
            {"sentences", sentences},
            {"bold", bold}};
}

json error_body(const std::string& field, const std::string& message) {
    return {{"error", message}, {"field", field}};
}

} // namespace

Service::Service(const Engine& engine, std::string version) : engine_(engine), version_(std::move(version)) {}

Response Service::answer(const std::string& request_body) const {
    const auto start = std::chrono::steady_clock::now();
    json req;
    try {
        req = json::parse(request_body);
    } catch (const json::parse_error& e) {
        return {400, error_body("", std::string("invalid JSON: ") + e.what())};
    }
    std::vector<conversation::Turn> turns;
    ranker::RunConfig run;
    try {
        turns = parse_history(req);
        run = parse_params(req);
    } catch (const BadRequest& b) {
        return {400, error_body(b.field, b.message)};
    }

    try {
        auto ranked = engine_.answer(turns, run);
        json results = json::array();
        const auto shown = std::min(ranked.size(), run.params.display_k);
        for (std::size_t i = 0; i < shown; ++i)
            results.push_back(result_json(ranked[i], engine_.corpus().get(ranked[i].id)));
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return {200, {{"results", results}, {"timing_ms", ms}}};
    } catch (const std::exception& e) {
        return {500, error_body("", e.what())};
    }
}

json Service::defaults() const {
    const auto run = ranker::preset("run1");
    const auto& p = run.params;
    json strategies = json::array();
    for (auto s : {conversation::CqStrategy::cq1, conversation::CqStrategy::cq2, conversation::CqStrategy::cq3})
        strategies.push_back({{"name", conversation::strategy_name(s)}, {"label", conversation::strategy_label(s)}});
    return {{"alpha", p.alpha},
            {"beta", p.beta},
            {"window", p.window},
            {"h1", p.h1},
            {"h2", p.h2},
            {"h3", p.h3},
            {"h4", p.h4},
            {"pool_k", p.pool_k},
            {"display_k", p.display_k},
            {"strategy", conversation::strategy_name(run.strategy)},
            {"retrieval", ranker::retrieval_mode_name(run.mode)},
            {"strategies", strategies},
            {"ranges", {{"alpha", {0.5, 1.0}}, {"beta", {0.0, 0.1}}, {"h", {0.0, 1.0}}}}};
}

json Service::health() const {
    json artifacts = json::object();
    char hex[17];
    for (const auto& a : engine_.artifacts()) {
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(a.checksum));
        artifacts[a.name] = {{"path", a.path}, {"checksum", hex}};
    }
    return {{"status", "ok"},
            {"version", version_},
            {"passages", engine_.corpus().size()},
            {"artifacts", artifacts}};
}

void mount(httplib::Server& server, const Service& service, const std::string& ui_dir) {
    server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Post("/answer", [&service](const httplib::Request& req, httplib::Response& res) {
        auto r = service.answer(req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json; charset=utf-8");
    });
    server.Get("/defaults", [&service](const httplib::Request&, httplib::Response& res) {
        res.set_content(service.defaults().dump(), "application/json; charset=utf-8");
    });
    server.Get("/health", [&service](const httplib::Request&, httplib::Response& res) {
        res.set_content(service.health().dump(), "application/json; charset=utf-8");
    });
    if (!ui_dir.empty() && !server.set_mount_point("/", ui_dir))
        throw Error("cannot serve UI directory " + ui_dir);
}

} // namespace crown::service
