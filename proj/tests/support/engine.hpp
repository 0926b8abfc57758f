#pragma once

#include "fixtures.hpp"

#include <crown/pipeline.hpp>

#include <sstream>

namespace fixtures {

/// In-memory engine over a random pipeline fixture.
inline crown::Engine make_engine(const PipelineFixture& f) {
    auto store = crown::corpus::CorpusStore::from_records(f.passages);
    auto index = crown::retrieval::InvertedIndex::build(store);
    auto graph = crown::wpn::build_wpn(store, {});
    std::istringstream vec(f.embeddings_text());
    auto emb = crown::embed::EmbeddingStore::parse(vec);
    return crown::Engine(std::move(store), std::move(index), std::move(graph), std::move(emb));
}

inline std::vector<crown::conversation::Turn> make_history(const std::vector<std::string>& raw) {
    std::vector<crown::conversation::Turn> out;
    for (const auto& r : raw) out.push_back(crown::conversation::make_turn(out.size() + 1, r));
    return out;
}

} // namespace fixtures
