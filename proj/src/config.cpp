#include <crown/config.hpp>

#include <crown/error.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace crown::config {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw InvalidArgument(key + ": expected a number, got '" + v + "'");
    return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw InvalidArgument(key + ": expected a non-negative integer, got '" + v + "'");
    return out;
}

void apply(Config& c, const std::string& key, const std::string& v) {
    auto& p = c.run.params;
    if (key == "preset") return;
    if (key == "corpus") c.paths.corpus = v;
    else if (key == "index") c.paths.index = v;
    else if (key == "wpn") c.paths.wpn = v;
    else if (key == "embeddings") c.paths.embeddings = v;
    else if (key == "alpha") p.alpha = to_double(key, v);
    else if (key == "beta") p.beta = to_double(key, v);
    else if (key == "window") p.window = to_count(key, v);
    else if (key == "h1") p.h1 = to_double(key, v);
    else if (key == "h2") p.h2 = to_double(key, v);
    else if (key == "h3") p.h3 = to_double(key, v);
    else if (key == "h4") p.h4 = to_double(key, v);
    else if (key == "pool_k") p.pool_k = to_count(key, v);
    else if (key == "display_k") p.display_k = to_count(key, v);
    else if (key == "strategy") c.run.strategy = conversation::parse_strategy(v);
    else if (key == "retrieval") c.run.mode = ranker::parse_retrieval_mode(v);
    else throw InvalidArgument("unknown configuration key '" + key + "'");
}

} // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{"preset", "corpus", "index", "wpn", "embeddings", "alpha",
                                               "beta", "window", "h1", "h2", "h3", "h4",
                                               "pool_k", "display_k", "strategy", "retrieval"};
    return keys;
}

Settings parse_settings(std::istream& in) {
    Settings out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", line_no);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

Settings load_settings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    try {
        return parse_settings(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Config resolve(const Settings& file, const Settings& flags) {
    std::string name = "run1";
    if (auto it = file.find("preset"); it != file.end()) name = it->second;
    if (auto it = flags.find("preset"); it != flags.end()) name = it->second;
    Config c;
    c.run = ranker::preset(name);
    for (const auto& [k, v] : file) apply(c, k, v);
    for (const auto& [k, v] : flags) apply(c, k, v);
    ranker::validate(c.run.params);
    if (c.run.mode == ranker::RetrievalMode::union_of_queries && c.run.params.h1 != 0.0)
        throw InvalidArgument("h1 must be 0 with union retrieval");
    return c;
}

std::string describe(const ranker::RunConfig& run) {
    std::ostringstream out;
    const auto& p = run.params;
    out << "preset = " << run.name << '\n'
        << "alpha = " << p.alpha << '\n'
        << "beta = " << p.beta << '\n'
        << "window = " << p.window << '\n'
        << "h1 = " << p.h1 << '\n'
        << "h2 = " << p.h2 << '\n'
        << "h3 = " << p.h3 << '\n'
        << "h4 = " << p.h4 << '\n'
        << "pool_k = " << p.pool_k << '\n'
        << "display_k = " << p.display_k << '\n'
        << "strategy = " << conversation::strategy_name(run.strategy) << '\n'
        << "retrieval = " << ranker::retrieval_mode_name(run.mode) << '\n';
    return out.str();
}

} // namespace crown::config
