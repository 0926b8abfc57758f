#pragma once

#include <crown/conversation.hpp>
#include <crown/embed.hpp>
#include <crown/retrieval.hpp>
#include <crown/wpn.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crown::corpus {
class CorpusStore;
struct Passage;
} // namespace crown::corpus

namespace crown::ranker {

/// Tunable re-ranking surface. h1..h4 weight the prior, node, edge and
/// position scores and must sum to one.
struct RankerParams {
    double alpha = 0.7;
    double beta = 0.0;
    std::size_t window = 3;
    double h1 = 0.6;
    double h2 = 0.3;
    double h3 = 0.1;
    double h4 = 0.0;
    std::size_t pool_k = 1000;
    std::size_t display_k = 3;

    friend bool operator==(const RankerParams&, const RankerParams&) = default;
};

/// `library` accepts any alpha/beta in [-1, 1]; `interface` enforces the
/// option-panel ranges alpha in [0.5, 1] and beta in [0, 0.1].
enum class ParamRange { library, interface };

/// Throws InvalidArgument naming the offending field.
void validate(const RankerParams& p, ParamRange range = ParamRange::library, double sum_tolerance = 1e-9);

enum class RetrievalMode { single, union_of_queries };

const char* retrieval_mode_name(RetrievalMode m);
RetrievalMode parse_retrieval_mode(const std::string& name);

/// A complete run configuration: ranker parameters plus how the query is
/// formed and how candidates are fetched.
struct RunConfig {
    std::string name;
    RankerParams params;
    conversation::CqStrategy strategy = conversation::CqStrategy::cq1;
    RetrievalMode mode = RetrievalMode::single;
};

/// run1..run4. Throws InvalidArgument for other names.
RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// One qualifying passage token and its best query match.
struct TokenMatch {
    std::size_t position = 0;
    /// Index into the conversational query of the most similar item
    /// (earliest item on ties).
    std::size_t query_item = 0;
    double similarity = 0.0;
    double weight = 1.0;
    /// max over query items of similarity * turn weight.
    double contribution = 0.0;
};

struct NodeScore {
    double score = 0.0;
    std::vector<TokenMatch> matches;
};

struct EdgeHit {
    std::size_t first = 0;
    std::size_t second = 0;
    double npmi = 0.0;
};

struct EdgeScore {
    double score = 0.0;
    std::vector<EdgeHit> edges;
};

/// Best-match lookups of passage words against one conversational query.
/// Results are cached per word; not thread-safe, use one per thread.
class QueryMatcher {
public:
    struct WordMatch {
        bool any = false;
        std::size_t best_item = 0;
        double best_sim = 0.0;
        double contribution = 0.0;
    };

    QueryMatcher(const conversation::ConversationalQuery& cq, const embed::EmbeddingStore& store);

    const WordMatch& match(const std::string& word);
    const conversation::ConversationalQuery& query() const noexcept { return cq_; }

private:
    const conversation::ConversationalQuery& cq_;
    const embed::EmbeddingStore& store_;
    std::vector<std::span<const double>> item_vectors_;
    std::unordered_map<std::string, WordMatch> cache_;
};

/// Sum over passage token occurrences that have some query item with
/// similarity above alpha of the best similarity * turn weight.
NodeScore score_node(std::span<const std::string> tokens, const conversation::ConversationalQuery& cq,
                     const embed::EmbeddingStore& store, double alpha);

/// Sum of NPMI over token pairs at distance 1..window whose WPN edge exceeds
/// beta and whose best query matches (both above alpha) are distinct words.
EdgeScore score_edge(std::span<const std::string> tokens, const conversation::ConversationalQuery& cq,
                     const wpn::Wpn& graph, const embed::EmbeddingStore& store, double alpha, double beta,
                     std::size_t window);

/// max over 1-based sentence j of (node[j] + edge[j]) / j; 0 without sentences.
double score_pos(std::span<const double> node_per_sentence, std::span<const double> edge_per_sentence);

/// 1 / rank; throws InvalidArgument for rank < 1.
double score_prior(std::size_t rank);

struct TopNode {
    std::string word;
    std::string query_token;
    double similarity = 0.0;
    double contribution = 0.0;
};

struct TopEdge {
    std::string first;
    std::string second;
    double npmi = 0.0;
};

struct ScoredPassage {
    std::string id;
    std::size_t baseline_rank = 0;
    double total = 0.0;
    double prior = 0.0;
    double node = 0.0;
    double edge = 0.0;
    double pos = 0.0;
    std::vector<TopNode> top_nodes;
    std::vector<TopEdge> top_edges;
    /// Sentence indices (0-based, ascending) of the highlighted sentences.
    std::vector<std::size_t> highlight;
};

/// Number of highlighted sentences for a passage: min(3, max(1, ceil(n/3))).
std::size_t highlight_count(std::size_t sentence_count);

/// Scores one passage. `baseline_rank` 0 means no usable prior.
ScoredPassage score_passage(const corpus::Passage& passage, std::size_t baseline_rank, QueryMatcher& matcher,
                            const wpn::Wpn& graph, const RankerParams& params);

/// Scores every candidate in parallel and sorts by total (descending), ties
/// by passage id. Output is identical to rank_serial.
std::vector<ScoredPassage> rank(const retrieval::CandidateList& candidates,
                                const conversation::ConversationalQuery& cq, const RankerParams& params,
                                const wpn::Wpn& graph, const embed::EmbeddingStore& store,
                                const corpus::CorpusStore& corpus);

/// Single-threaded reference of rank().
std::vector<ScoredPassage> rank_serial(const retrieval::CandidateList& candidates,
                                       const conversation::ConversationalQuery& cq, const RankerParams& params,
                                       const wpn::Wpn& graph, const embed::EmbeddingStore& store,
                                       const corpus::CorpusStore& corpus);

} // namespace crown::ranker
