// Parallel kernels against their serial references on a synthetic corpus.

#include <crown/pipeline.hpp>

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

namespace {

std::string word(std::size_t i) {
    std::string s = "zq";
    do {
        s += static_cast<char>('a' + i % 26);
        i /= 26;
    } while (i);
    return s;
}

struct Synthetic {
    std::vector<std::pair<std::string, std::string>> passages;
    std::string embeddings;
};

Synthetic synthetic(std::size_t n_passages, std::size_t vocab, std::size_t length) {
    std::mt19937_64 rng(7);
    std::vector<double> weights(vocab);
    for (std::size_t i = 0; i < vocab; ++i) weights[i] = 1.0 / double(i + 1);
    std::discrete_distribution<std::size_t> zipf(weights.begin(), weights.end());
    Synthetic s;
    for (std::size_t p = 0; p < n_passages; ++p) {
        std::string text;
        for (std::size_t t = 0; t < length; ++t) {
            text += word(zipf(rng));
            text += (t % 12 == 11) ? ". " : " ";
        }
        s.passages.emplace_back("p" + std::to_string(p), text);
    }
    std::normal_distribution<double> g;
    std::ostringstream e;
    const std::size_t dim = 50;
    e << vocab << ' ' << dim << '\n';
    for (std::size_t i = 0; i < vocab; ++i) {
        e << word(i);
        for (std::size_t d = 0; d < dim; ++d) e << ' ' << g(rng);
        e << '\n';
    }
    s.embeddings = e.str();
    return s;
}

const Synthetic& data() {
    static const Synthetic s = synthetic(20000, 5000, 60);
    return s;
}

const std::vector<std::vector<std::string>>& sequences() {
    static const auto seqs = [] {
        auto store = crown::corpus::CorpusStore::from_records(data().passages);
        std::vector<std::vector<std::string>> out;
        for (std::size_t i = 0; i < store.size(); ++i) out.push_back(store.get_at(i).scoring_norms());
        return out;
    }();
    return seqs;
}

const crown::Engine& engine() {
    static const crown::Engine e = [] {
        auto store = crown::corpus::CorpusStore::from_records(data().passages);
        auto index = crown::retrieval::InvertedIndex::build(store);
        auto graph = crown::wpn::build_wpn(store, {});
        std::istringstream in(data().embeddings);
        return crown::Engine(std::move(store), std::move(index), std::move(graph),
                             crown::embed::EmbeddingStore::parse(in));
    }();
    return e;
}

void BM_build_wpn(benchmark::State& state) {
    const auto& seqs = sequences();
    for (auto _ : state) benchmark::DoNotOptimize(crown::wpn::build_wpn(seqs, {3, 1}));
}

void BM_build_wpn_serial(benchmark::State& state) {
    const auto& seqs = sequences();
    for (auto _ : state) benchmark::DoNotOptimize(crown::wpn::build_wpn_serial(seqs, {3, 1}));
}

template <auto Rank>
void rank_kernel(benchmark::State& state) {
    const auto& e = engine();
    std::vector<crown::conversation::Turn> history{
        crown::conversation::make_turn(1, word(3) + " " + word(40) + " " + word(200)),
        crown::conversation::make_turn(2, word(7) + " " + word(90)),
    };
    auto config = crown::ranker::preset("run1");
    config.params.pool_k = static_cast<std::size_t>(state.range(0));
    const auto pool = e.candidates(history, config);
    const auto cq = crown::conversation::formulate_cq(history, config.strategy);
    for (auto _ : state)
        benchmark::DoNotOptimize(Rank(pool, cq, config.params, e.graph(), e.embeddings(), e.corpus()));
    state.counters["candidates"] = static_cast<double>(pool.size());
}

void BM_rank(benchmark::State& state) { rank_kernel<crown::ranker::rank>(state); }
void BM_rank_serial(benchmark::State& state) { rank_kernel<crown::ranker::rank_serial>(state); }

} // namespace

BENCHMARK(BM_build_wpn)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_build_wpn_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rank)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_rank_serial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
