#pragma once

#include <crown/conversation.hpp>
#include <crown/corpus.hpp>
#include <crown/embed.hpp>
#include <crown/ranker.hpp>
#include <crown/retrieval.hpp>
#include <crown/wpn.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crown {

struct ArtifactPaths {
    std::string corpus;
    std::string index;
    std::string wpn;
    std::string embeddings;
};

struct ArtifactInfo {
    std::string name;
    std::string path;
    std::uint64_t checksum = 0;
};

/// Loaded, immutable artifacts plus the formulate -> retrieve -> rank
/// pipeline. Safe to share between threads.
class Engine {
public:
    Engine(corpus::CorpusStore corpus, retrieval::InvertedIndex index, wpn::Wpn graph, embed::EmbeddingStore store);

    static Engine load(const ArtifactPaths& paths);

    const corpus::CorpusStore& corpus() const noexcept { return corpus_; }
    const retrieval::InvertedIndex& index() const noexcept { return index_; }
    const wpn::Wpn& graph() const noexcept { return graph_; }
    const embed::EmbeddingStore& embeddings() const noexcept { return embed_; }
    const std::vector<ArtifactInfo>& artifacts() const noexcept { return artifacts_; }

    /// Baseline candidates for the last turn of `history`. In union mode the
    /// pool is the union over the first-turn query, the current-turn query
    /// and the full conversational query.
    retrieval::CandidateList candidates(std::span<const conversation::Turn> history,
                                        const ranker::RunConfig& config) const;

    /// Full re-ranked candidate list (not truncated to display_k).
    std::vector<ranker::ScoredPassage> answer(std::span<const conversation::Turn> history,
                                              const ranker::RunConfig& config) const;

private:
    corpus::CorpusStore corpus_;
    retrieval::InvertedIndex index_;
    wpn::Wpn graph_;
    embed::EmbeddingStore embed_;
    std::vector<ArtifactInfo> artifacts_;
};

} // namespace crown
