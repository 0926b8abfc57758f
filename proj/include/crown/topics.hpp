#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crown::topics {

struct TopicTurn {
    std::size_t number = 0;
    std::string utterance;
};

struct Topic {
    std::string number;
    std::vector<TopicTurn> turns;
};

/// CAsT-style topics: [{"number": 31, "turns": [{"number": 1, "raw_utterance": "..."}]}].
/// Topic numbers may be strings or integers. Turns are returned in turn order.
std::vector<Topic> parse_topics(std::istream& in, const std::string& source = "<stream>");
std::vector<Topic> load_topics(const std::string& path);

/// "<topic>_<turn>"
std::string query_id(const Topic& topic, const TopicTurn& turn);

} // namespace crown::topics
