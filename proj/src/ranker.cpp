#include <crown/ranker.hpp>

#include <crown/corpus.hpp>
#include <crown/error.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>

namespace crown::ranker {

using conversation::ConversationalQuery;

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

} // namespace

void validate(const RankerParams& p, ParamRange range, double sum_tolerance) {
    const bool ui = range == ParamRange::interface;
    const double alpha_lo = ui ? 0.5 : -1.0;
    const double beta_lo = ui ? 0.0 : -1.0;
    const double beta_hi = ui ? 0.1 : 1.0;
    require(std::isfinite(p.alpha) && p.alpha >= alpha_lo && p.alpha <= 1.0,
            "alpha must be in [" + fmt_double(alpha_lo) + ", 1], got " + fmt_double(p.alpha));
    require(std::isfinite(p.beta) && p.beta >= beta_lo && p.beta <= beta_hi,
            "beta must be in [" + fmt_double(beta_lo) + ", " + fmt_double(beta_hi) + "], got " + fmt_double(p.beta));
    require(p.window >= 1, "window must be >= 1");
    require(p.pool_k >= 1, "pool_k must be >= 1");
    require(p.display_k >= 1, "display_k must be >= 1");
    const double h[] = {p.h1, p.h2, p.h3, p.h4};
    for (int i = 0; i < 4; ++i)
        require(std::isfinite(h[i]) && h[i] >= 0.0 && h[i] <= 1.0,
                "h" + std::to_string(i + 1) + " must be in [0, 1], got " + fmt_double(h[i]));
    const double sum = p.h1 + p.h2 + p.h3 + p.h4;
    require(std::abs(sum - 1.0) <= sum_tolerance, "weights must sum to 1 (h1+h2+h3+h4 = " + fmt_double(sum) + ")");
}

const char* retrieval_mode_name(RetrievalMode m) { return m == RetrievalMode::single ? "single" : "union"; }

RetrievalMode parse_retrieval_mode(const std::string& name) {
    if (name == "single") return RetrievalMode::single;
    if (name == "union") return RetrievalMode::union_of_queries;
    throw InvalidArgument("unknown retrieval mode '" + name + "' (expected single or union)");
}

RunConfig preset(std::string_view name) {
    RunConfig c;
    c.name = std::string(name);
    auto& p = c.params;
    p.alpha = 0.7;
    p.beta = 0.0;
    p.h4 = 0.0;
    if (name == "run1") {
        p.h1 = 0.6, p.h2 = 0.3, p.h3 = 0.1;
    } else if (name == "run2") {
        p.h1 = 0.9, p.h2 = 0.1, p.h3 = 0.0;
    } else if (name == "run3") {
        p.h1 = 0.0, p.h2 = 0.6, p.h3 = 0.4;
        c.mode = RetrievalMode::union_of_queries;
    } else if (name == "run4") {
        p.h1 = 0.6, p.h2 = 0.3, p.h3 = 0.1;
        p.alpha = 0.85;
        c.strategy = conversation::CqStrategy::cq2;
    } else {
        throw InvalidArgument("unknown preset '" + std::string(name) + "' (expected run1..run4)");
    }
    return c;
}

std::vector<std::string> preset_names() { return {"run1", "run2", "run3", "run4"}; }

QueryMatcher::QueryMatcher(const ConversationalQuery& cq, const embed::EmbeddingStore& store)
    : cq_(cq), store_(store) {
    item_vectors_.reserve(cq.items.size());
    for (const auto& item : cq.items) item_vectors_.push_back(store.vector(item.norm));
}

const QueryMatcher::WordMatch& QueryMatcher::match(const std::string& word) {
    auto it = cache_.find(word);
    if (it != cache_.end()) return it->second;

    WordMatch m;
    const auto vec = store_.vector(word);
    for (std::size_t i = 0; i < cq_.items.size(); ++i) {
        const auto& item = cq_.items[i];
        double s;
        if (item.norm == word) {
            s = 1.0;
        } else if (!vec.empty() && !item_vectors_[i].empty()) {
            s = std::clamp(embed::dot(vec, item_vectors_[i]), -1.0, 1.0);
        } else {
            continue;
        }
        const double c = s * item.weight;
        if (!m.any) {
            m.any = true;
            m.best_item = i;
            m.best_sim = s;
            m.contribution = c;
            continue;
        }
        if (s > m.best_sim) {
            m.best_sim = s;
            m.best_item = i;
        }
        m.contribution = std::max(m.contribution, c);
    }
    return cache_.emplace(word, m).first->second;
}

double score_prior(std::size_t rank) {
    if (rank < 1) throw InvalidArgument("rank must be >= 1");
    return 1.0 / static_cast<double>(rank);
}

double score_pos(std::span<const double> node_per_sentence, std::span<const double> edge_per_sentence) {
    if (node_per_sentence.size() != edge_per_sentence.size())
        throw InvalidArgument("per-sentence node and edge scores differ in length");
    if (node_per_sentence.empty()) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < node_per_sentence.size(); ++j)
        best = std::max(best, (node_per_sentence[j] + edge_per_sentence[j]) / static_cast<double>(j + 1));
    return best;
}

std::size_t highlight_count(std::size_t sentence_count) {
    if (sentence_count == 0) return 0;
    return std::min<std::size_t>(3, std::max<std::size_t>(1, (sentence_count + 2) / 3));
}

namespace {

struct Breakdown {
    NodeScore node;
    EdgeScore edge;
    std::vector<double> node_per_sentence;
    std::vector<double> edge_per_sentence;
};

// Shared kernel behind score_node, score_edge and score_passage. `sentence_of`
// may be empty, in which case every token belongs to sentence 0.
Breakdown analyze(std::span<const std::string> tokens, std::span<const std::uint32_t> sentence_of,
                  std::size_t sentence_count, QueryMatcher& matcher, const wpn::Wpn* graph, double alpha,
                  double beta, std::size_t window) {
    const auto n = tokens.size();
    auto sentence = [&](std::size_t j) -> std::size_t { return sentence_of.empty() ? 0 : sentence_of[j]; };
    Breakdown out;
    out.node_per_sentence.assign(sentence_count, 0.0);
    out.edge_per_sentence.assign(sentence_count, 0.0);

    std::vector<const QueryMatcher::WordMatch*> best(n, nullptr);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& m = matcher.match(tokens[j]);
        if (!m.any || !(m.best_sim > alpha)) continue;
        best[j] = &m;
        out.node.score += m.contribution;
        out.node_per_sentence[sentence(j)] += m.contribution;
        out.node.matches.push_back({j, m.best_item, m.best_sim, matcher.query().items[m.best_item].weight,
                                    m.contribution});
    }
    if (graph == nullptr) return out;

    const auto& items = matcher.query().items;
    std::vector<std::optional<wpn::NodeId>> ids(n);
    for (std::size_t j = 0; j < n; ++j)
        if (best[j]) ids[j] = graph->node(tokens[j]);

    for (std::size_t j = 0; j < n; ++j) {
        if (!best[j] || !ids[j]) continue;
        const auto last = std::min(n - 1, j + window);
        for (std::size_t k = j + 1; k <= last; ++k) {
            if (!best[k] || !ids[k]) continue;
            if (items[best[j]->best_item].norm == items[best[k]->best_item].norm) continue;
            const auto v = graph->npmi(*ids[j], *ids[k]);
            if (!v || !(*v > beta)) continue;
            out.edge.score += *v;
            out.edge.edges.push_back({j, k, *v});
            if (sentence(j) == sentence(k)) out.edge_per_sentence[sentence(j)] += *v;
        }
    }
    return out;
}

} // namespace

NodeScore score_node(std::span<const std::string> tokens, const ConversationalQuery& cq,
                     const embed::EmbeddingStore& store, double alpha) {
    QueryMatcher matcher(cq, store);
    return analyze(tokens, {}, 1, matcher, nullptr, alpha, 0.0, 1).node;
}

EdgeScore score_edge(std::span<const std::string> tokens, const ConversationalQuery& cq, const wpn::Wpn& graph,
                     const embed::EmbeddingStore& store, double alpha, double beta, std::size_t window) {
    if (window < 1) throw InvalidArgument("window must be >= 1");
    QueryMatcher matcher(cq, store);
    return analyze(tokens, {}, 1, matcher, &graph, alpha, beta, window).edge;
}

ScoredPassage score_passage(const corpus::Passage& passage, std::size_t baseline_rank, QueryMatcher& matcher,
                            const wpn::Wpn& graph, const RankerParams& params) {
    const auto norms = passage.scoring_norms();
    const auto sentence_of = passage.scoring_sentences();
    const auto sentence_count = passage.sentences.size();
    auto b = analyze(norms, sentence_of, std::max<std::size_t>(sentence_count, 1), matcher, &graph, params.alpha,
                     params.beta, params.window);
    if (sentence_count == 0) {
        b.node_per_sentence.clear();
        b.edge_per_sentence.clear();
    }

    ScoredPassage out;
    out.id = passage.id;
    out.baseline_rank = baseline_rank;
    out.prior = baseline_rank == 0 ? 0.0 : score_prior(baseline_rank);
    out.node = b.node.score;
    out.edge = b.edge.score;
    out.pos = score_pos(b.node_per_sentence, b.edge_per_sentence);
    out.total = params.h1 * out.prior + params.h2 * out.node + params.h3 * out.edge + params.h4 * out.pos;

    // Top nodes: best contribution per distinct passage word.
    const auto& items = matcher.query().items;
    std::vector<const TokenMatch*> firsts;
    std::map<std::string_view, std::size_t> seen;
    for (const auto& m : b.node.matches) {
        auto [it, inserted] = seen.emplace(norms[m.position], firsts.size());
        if (inserted) firsts.push_back(&m);
    }
    std::stable_sort(firsts.begin(), firsts.end(),
                     [](const TokenMatch* l, const TokenMatch* r) { return l->contribution > r->contribution; });
    for (std::size_t i = 0; i < firsts.size() && i < 5; ++i)
        out.top_nodes.push_back(
            {norms[firsts[i]->position], items[firsts[i]->query_item].norm, firsts[i]->similarity, firsts[i]->contribution});

    // Top edges: distinct word pairs by NPMI.
    std::vector<const EdgeHit*> edge_firsts;
    std::map<std::pair<std::string_view, std::string_view>, bool> seen_pairs;
    for (const auto& e : b.edge.edges) {
        std::string_view x = norms[e.first], y = norms[e.second];
        if (y < x) std::swap(x, y);
        if (seen_pairs.emplace(std::pair{x, y}, true).second) edge_firsts.push_back(&e);
    }
    std::stable_sort(edge_firsts.begin(), edge_firsts.end(),
                     [](const EdgeHit* l, const EdgeHit* r) { return l->npmi > r->npmi; });
    for (std::size_t i = 0; i < edge_firsts.size() && i < 5; ++i)
        out.top_edges.push_back({norms[edge_firsts[i]->first], norms[edge_firsts[i]->second], edge_firsts[i]->npmi});

    // Highlight: sentences with the largest node + edge mass.
    std::vector<std::size_t> order(sentence_count);
    for (std::size_t s = 0; s < sentence_count; ++s) order[s] = s;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return b.node_per_sentence[l] + b.edge_per_sentence[l] > b.node_per_sentence[r] + b.edge_per_sentence[r];
    });
    order.resize(highlight_count(sentence_count));
    std::sort(order.begin(), order.end());
    out.highlight = std::move(order);
    return out;
}

namespace {

std::vector<ScoredPassage> rank_impl(const retrieval::CandidateList& candidates, const ConversationalQuery& cq,
                                     const RankerParams& params, const wpn::Wpn& graph,
                                     const embed::EmbeddingStore& store, const corpus::CorpusStore& corpus,
                                     bool parallel) {
    validate(params);
    if (!candidates.has_prior && params.h1 != 0.0)
        throw InvalidArgument("h1 must be 0 when candidates carry no baseline ranking (union retrieval)");

    const auto n = static_cast<std::int64_t>(candidates.entries.size());
    std::vector<ScoredPassage> results(candidates.entries.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;

#pragma omp parallel if (parallel)
    {
        QueryMatcher matcher(cq, store);
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                const auto& c = candidates.entries[static_cast<std::size_t>(i)];
                results[static_cast<std::size_t>(i)] =
                    score_passage(corpus.get(c.id), candidates.has_prior ? c.rank : 0, matcher, graph, params);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::sort(results.begin(), results.end(), [](const ScoredPassage& l, const ScoredPassage& r) {
        return l.total != r.total ? l.total > r.total : l.id < r.id;
    });
    return results;
}

} // namespace

std::vector<ScoredPassage> rank(const retrieval::CandidateList& candidates, const ConversationalQuery& cq,
                                const RankerParams& params, const wpn::Wpn& graph,
                                const embed::EmbeddingStore& store, const corpus::CorpusStore& corpus) {
    return rank_impl(candidates, cq, params, graph, store, corpus, true);
}

std::vector<ScoredPassage> rank_serial(const retrieval::CandidateList& candidates, const ConversationalQuery& cq,
                                       const RankerParams& params, const wpn::Wpn& graph,
                                       const embed::EmbeddingStore& store, const corpus::CorpusStore& corpus) {
    return rank_impl(candidates, cq, params, graph, store, corpus, false);
}

} // namespace crown::ranker
