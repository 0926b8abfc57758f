#pragma once

#include <crown/text.hpp>

#include <span>
#include <string>
#include <vector>

namespace crown::conversation {

struct Turn {
    std::size_t index = 1;
    std::string raw;
    std::vector<text::Token> tokens;
};

/// Builds turn `index` from a raw question. Throws InvalidArgument when no
/// token survives stopword removal.
Turn make_turn(std::size_t index, std::string raw,
               const text::StopwordList& stop = text::StopwordList::english());

enum class CqStrategy { cq1, cq2, cq3 };

/// Wire name ("cq1", ...); parse_strategy throws InvalidArgument on others.
const char* strategy_name(CqStrategy s);
CqStrategy parse_strategy(const std::string& name);
/// Label shown in the options panel.
const char* strategy_label(CqStrategy s);

struct CqItem {
    std::string norm;
    std::size_t turn = 1;
    double weight = 1.0;

    friend bool operator==(const CqItem&, const CqItem&) = default;
};

/// Query tokens in turn order, then token order, each with its turn weight.
struct ConversationalQuery {
    std::vector<CqItem> items;

    bool empty() const noexcept { return items.empty(); }
    std::size_t size() const noexcept { return items.size(); }
};

/// Unit-weight query from a single turn.
ConversationalQuery single_turn_query(const Turn& turn);

/// cq1: q_1 and q_T unweighted. cq2: q_1, q_{T-1} at (T-1)/T, q_T. cq3: every
/// turn at t/T with the first and current turns at 1. A turn appears at most
/// once; repeated words across turns are all kept.
ConversationalQuery formulate_cq(std::span<const Turn> history, CqStrategy strategy);

/// Single-session history with the clear-last / clear-all controls.
class ConversationState {
public:
    const Turn& append(std::string raw);
    void clear_last();
    void clear_all() noexcept { turns_.clear(); }

    std::span<const Turn> turns() const noexcept { return turns_; }
    std::size_t size() const noexcept { return turns_.size(); }
    bool empty() const noexcept { return turns_.empty(); }

private:
    std::vector<Turn> turns_;
};

} // namespace crown::conversation
