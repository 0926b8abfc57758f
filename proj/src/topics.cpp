#include <crown/topics.hpp>

#include <crown/error.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

namespace crown::topics {

using nlohmann::json;

namespace {

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::string number_string(const json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw ParseError(where + ": \"number\" must be a string or integer");
}

} // namespace

std::vector<Topic> parse_topics(std::istream& in, const std::string& source) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source + ": invalid JSON: " + e.what(), line_of(text, e.byte));
    }
    if (!doc.is_array()) throw ParseError(source + ": expected a JSON list of topics");

    std::vector<Topic> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& t = doc[i];
        const std::string where = source + ": topic #" + std::to_string(i + 1);
        if (!t.is_object() || !t.contains("number") || !t.contains("turns") || !t["turns"].is_array())
            throw ParseError(where + ": expected {\"number\", \"turns\": [...]}");
        Topic topic;
        topic.number = number_string(t["number"], where);
        if (!seen.insert(topic.number).second) throw ParseError(where + ": duplicate topic number " + topic.number);
        for (const auto& turn : t["turns"]) {
            if (!turn.is_object() || !turn.contains("number") || !turn.contains("raw_utterance") ||
                !turn["number"].is_number_integer() || !turn["raw_utterance"].is_string())
                throw ParseError(where + ": each turn needs an integer \"number\" and a string \"raw_utterance\"");
            auto n = turn["number"].get<long long>();
            if (n < 1) throw ParseError(where + ": turn numbers start at 1");
            topic.turns.push_back({static_cast<std::size_t>(n), turn["raw_utterance"].get<std::string>()});
        }
        std::stable_sort(topic.turns.begin(), topic.turns.end(),
                         [](const TopicTurn& a, const TopicTurn& b) { return a.number < b.number; });
        for (std::size_t k = 1; k < topic.turns.size(); ++k)
            if (topic.turns[k].number == topic.turns[k - 1].number)
                throw ParseError(where + ": duplicate turn number " + std::to_string(topic.turns[k].number));
        out.push_back(std::move(topic));
    }
    return out;
}

std::vector<Topic> load_topics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open topics " + path);
    return parse_topics(in, path);
}

std::string query_id(const Topic& topic, const TopicTurn& turn) {
    return topic.number + "_" + std::to_string(turn.number);
}

} // namespace crown::topics
