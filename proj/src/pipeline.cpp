#include <crown/pipeline.hpp>

#include <crown/error.hpp>

#include <filesystem>

#include "binio.hpp"

namespace crown {

Engine::Engine(corpus::CorpusStore corpus, retrieval::InvertedIndex index, wpn::Wpn graph, embed::EmbeddingStore store)
    : corpus_(std::move(corpus)), index_(std::move(index)), graph_(std::move(graph)), embed_(std::move(store)) {}

Engine Engine::load(const ArtifactPaths& paths) {
    Engine e(corpus::CorpusStore::open(paths.corpus), retrieval::InvertedIndex::load(paths.index),
             wpn::Wpn::load(paths.wpn), embed::EmbeddingStore::load(paths.embeddings));
    namespace fs = std::filesystem;
    auto info = [](std::string name, const std::string& path) {
        return ArtifactInfo{std::move(name), path, binio::file_checksum(path)};
    };
    e.artifacts_.push_back(info("corpus", (fs::path(paths.corpus) / corpus::CorpusStore::kIndexFile).string()));
    e.artifacts_.push_back(info("index", paths.index));
    e.artifacts_.push_back(info("wpn", paths.wpn));
    e.artifacts_.push_back(info("embeddings", paths.embeddings));
    return e;
}

retrieval::CandidateList Engine::candidates(std::span<const conversation::Turn> history,
                                            const ranker::RunConfig& config) const {
    auto cq = conversation::formulate_cq(history, config.strategy);
    if (config.mode == ranker::RetrievalMode::single) return retrieval::retrieve(index_, cq, config.params.pool_k);
    const std::vector<conversation::ConversationalQuery> queries{conversation::single_turn_query(history.front()),
                                                                 conversation::single_turn_query(history.back()),
                                                                 std::move(cq)};
    return retrieval::retrieve_union(index_, queries, config.params.pool_k);
}

std::vector<ranker::ScoredPassage> Engine::answer(std::span<const conversation::Turn> history,
                                                  const ranker::RunConfig& config) const {
    ranker::validate(config.params);
    auto cq = conversation::formulate_cq(history, config.strategy);
    auto pool = candidates(history, config);
    return ranker::rank(pool, cq, config.params, graph_, embed_, corpus_);
}

} // namespace crown
