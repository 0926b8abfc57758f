#include <crown/conversation.hpp>

#include <crown/error.hpp>

namespace crown::conversation {

Turn make_turn(std::size_t index, std::string raw, const text::StopwordList& stop) {
    if (index < 1) throw InvalidArgument("turn index must be >= 1");
    Turn t;
    t.index = index;
    t.tokens = text::remove_stopwords(text::tokenize(raw), stop);
    if (t.tokens.empty())
        throw InvalidArgument("turn " + std::to_string(index) + " has no content words: '" + raw + "'");
    t.raw = std::move(raw);
    return t;
}

const char* strategy_name(CqStrategy s) {
    switch (s) {
    case CqStrategy::cq1: return "cq1";
    case CqStrategy::cq2: return "cq2";
    case CqStrategy::cq3: return "cq3";
    }
    return "?";
}

const char* strategy_label(CqStrategy s) {
    switch (s) {
    case CqStrategy::cq1: return "current+first turns";
    case CqStrategy::cq2: return "current+previous+first turns";
    case CqStrategy::cq3: return "all turns proportionate weights";
    }
    return "?";
}

CqStrategy parse_strategy(const std::string& name) {
    if (name == "cq1") return CqStrategy::cq1;
    if (name == "cq2") return CqStrategy::cq2;
    if (name == "cq3") return CqStrategy::cq3;
    throw InvalidArgument("unknown conversational query strategy '" + name + "' (expected cq1, cq2 or cq3)");
}

namespace {
void add_turn(ConversationalQuery& cq, const Turn& turn, double weight) {
    for (const auto& tok : turn.tokens) cq.items.push_back({tok.norm, turn.index, weight});
}
} // namespace

ConversationalQuery single_turn_query(const Turn& turn) {
    ConversationalQuery cq;
    add_turn(cq, turn, 1.0);
    return cq;
}

ConversationalQuery formulate_cq(std::span<const Turn> history, CqStrategy strategy) {
    if (history.empty()) throw InvalidArgument("cannot formulate a conversational query from an empty history");
    const std::size_t n = history.size();
    const double T = static_cast<double>(n);
    ConversationalQuery cq;
    add_turn(cq, history[0], 1.0);
    if (n == 1) return cq;

    switch (strategy) {
    case CqStrategy::cq1:
        break;
    case CqStrategy::cq2:
        if (n >= 3) add_turn(cq, history[n - 2], (T - 1.0) / T);
        break;
    case CqStrategy::cq3:
        for (std::size_t t = 2; t < n; ++t) add_turn(cq, history[t - 1], static_cast<double>(t) / T);
        break;
    }
    add_turn(cq, history[n - 1], 1.0);
    return cq;
}

const Turn& ConversationState::append(std::string raw) {
    turns_.push_back(make_turn(turns_.size() + 1, std::move(raw)));
    return turns_.back();
}

void ConversationState::clear_last() {
    if (turns_.empty()) throw InvalidArgument("clear_last on an empty conversation");
    turns_.pop_back();
}

} // namespace crown::conversation
