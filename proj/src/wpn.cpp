#include <crown/wpn.hpp>

#include <crown/corpus.hpp>
#include <crown/error.hpp>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "binio.hpp"

namespace crown::wpn {

namespace {
constexpr std::string_view kMagic = "CRWNWPN";
constexpr std::uint32_t kVersion = 1;

using PairCounts = std::unordered_map<std::uint64_t, std::uint64_t>;

void check_options(std::span<const std::vector<std::string>> passages, const BuildOptions& options) {
    if (options.window < 1) throw InvalidArgument("window must be >= 1");
    if (options.min_cooc < 1) throw InvalidArgument("min_cooc must be >= 1");
    if (std::all_of(passages.begin(), passages.end(), [](const auto& p) { return p.empty(); }))
        throw InvalidArgument("cannot build a WPN from a corpus without scoring tokens");
}

// Counts one passage. Returns the number of pairs added.
std::uint64_t count_passage(std::span<const NodeId> ids, std::size_t window, std::vector<std::uint64_t>& unigram,
                            PairCounts& cooc) {
    std::uint64_t pairs = 0;
    for (std::size_t j = 0; j < ids.size(); ++j) {
        ++unigram[ids[j]];
        auto last = std::min(ids.size() - 1, j + window);
        for (std::size_t k = j + 1; k <= last; ++k) {
            if (ids[j] == ids[k]) continue;
            auto a = std::min(ids[j], ids[k]);
            auto b = std::max(ids[j], ids[k]);
            ++cooc[(static_cast<std::uint64_t>(a) << 32) | b];
            ++pairs;
        }
    }
    return pairs;
}

void prune(PairCounts& cooc, std::uint64_t min_cooc) {
    if (min_cooc <= 1) return;
    std::erase_if(cooc, [&](const auto& kv) { return kv.second < min_cooc; });
}

} // namespace

double npmi_from_counts(std::uint64_t cooc, std::uint64_t total_pairs, std::uint64_t count_x, std::uint64_t count_y,
                        std::uint64_t total_tokens) {
    if (cooc == total_pairs) return 1.0;
    const double log_pxy = std::log(static_cast<double>(cooc)) - std::log(static_cast<double>(total_pairs));
    const double log_n = std::log(static_cast<double>(total_tokens));
    const double log_px = std::log(static_cast<double>(count_x)) - log_n;
    const double log_py = std::log(static_cast<double>(count_y)) - log_n;
    const double v = (log_pxy - (log_px + log_py)) / -log_pxy;
    return std::clamp(v, -1.0, 1.0);
}

void Wpn::index_words() {
    vocab_.clear();
    vocab_.reserve(words_.size());
    for (NodeId i = 0; i < words_.size(); ++i) vocab_.emplace(words_[i], i);
}

std::optional<NodeId> Wpn::node(std::string_view word) const {
    auto it = vocab_.find(word);
    if (it == vocab_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Wpn::unigram_count(std::string_view word) const {
    auto id = node(word);
    return id ? unigram_[*id] : 0;
}

std::uint64_t Wpn::cooc_count(NodeId a, NodeId b) const {
    auto it = cooc_.find(key(a, b));
    return it == cooc_.end() ? 0 : it->second;
}

std::uint64_t Wpn::cooc_count(std::string_view x, std::string_view y) const {
    auto a = node(x);
    auto b = node(y);
    if (!a || !b || *a == *b) return 0;
    return cooc_count(*a, *b);
}

std::optional<double> Wpn::npmi(NodeId a, NodeId b) const {
    if (a == b) return std::nullopt;
    auto c = cooc_count(a, b);
    if (c == 0) return std::nullopt;
    return npmi_from_counts(c, total_pairs_, unigram_[a], unigram_[b], total_tokens_);
}

std::optional<double> Wpn::npmi(std::string_view x, std::string_view y) const {
    auto a = node(x);
    auto b = node(y);
    if (!a || !b) return std::nullopt;
    return npmi(*a, *b);
}

bool Wpn::has_edge(std::string_view x, std::string_view y, double beta) const {
    auto v = npmi(x, y);
    return v && *v > beta;
}

std::vector<Wpn::Edge> Wpn::edges() const {
    std::vector<Edge> out;
    out.reserve(cooc_.size());
    for (const auto& [k, c] : cooc_)
        out.push_back({static_cast<NodeId>(k >> 32), static_cast<NodeId>(k & 0xFFFFFFFFu), c});
    std::sort(out.begin(), out.end(), [](const Edge& l, const Edge& r) { return l.a != r.a ? l.a < r.a : l.b < r.b; });
    return out;
}

void Wpn::save(const std::string& path) const {
    binio::Writer w(path, kMagic, kVersion);
    w.put<std::uint64_t>(window_);
    w.put<std::uint64_t>(min_cooc_);
    w.put<std::uint64_t>(total_tokens_);
    w.put<std::uint64_t>(total_pairs_);
    w.put<std::uint64_t>(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        w.put_string(words_[i]);
        w.put<std::uint64_t>(unigram_[i]);
    }
    auto all = edges();
    w.put<std::uint64_t>(all.size());
    for (const auto& e : all) {
        w.put(e.a);
        w.put(e.b);
        w.put(e.count);
    }
    w.finish();
}

Wpn Wpn::load(const std::string& path) {
    binio::Reader r(path, kMagic, kVersion);
    Wpn g;
    g.window_ = r.get<std::uint64_t>();
    g.min_cooc_ = r.get<std::uint64_t>();
    g.total_tokens_ = r.get<std::uint64_t>();
    g.total_pairs_ = r.get<std::uint64_t>();
    auto n = r.get<std::uint64_t>();
    std::uint64_t token_sum = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        g.words_.push_back(r.get_string());
        g.unigram_.push_back(r.get<std::uint64_t>());
        token_sum += g.unigram_.back();
    }
    auto m = r.get<std::uint64_t>();
    std::uint64_t pair_sum = 0;
    g.cooc_.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        auto a = r.get<NodeId>();
        auto b = r.get<NodeId>();
        auto c = r.get<std::uint64_t>();
        if (a >= b || b >= n || c == 0) throw FormatError(path + ": invalid edge record");
        g.cooc_.emplace(key(a, b), c);
        pair_sum += c;
    }
    r.expect_end();
    if (token_sum != g.total_tokens_ || pair_sum > g.total_pairs_)
        throw FormatError(path + ": inconsistent totals");
    g.index_words();
    return g;
}

void Wpn::export_tsv(std::ostream& out) const {
    char buf[64];
    for (const auto& e : edges()) {
        std::snprintf(buf, sizeof buf, "%.6f", *npmi(e.a, e.b));
        out << words_[e.a] << '\t' << words_[e.b] << '\t' << e.count << '\t' << buf << '\n';
    }
}

Wpn build_wpn_serial(std::span<const std::vector<std::string>> passages, const BuildOptions& options) {
    check_options(passages, options);
    Wpn g;
    g.window_ = options.window;
    g.min_cooc_ = options.min_cooc;

    std::unordered_set<std::string_view> distinct;
    for (const auto& p : passages) distinct.insert(p.begin(), p.end());
    g.words_.assign(distinct.begin(), distinct.end());
    std::sort(g.words_.begin(), g.words_.end());
    g.index_words();
    g.unigram_.assign(g.words_.size(), 0);

    std::vector<NodeId> ids;
    for (const auto& p : passages) {
        ids.clear();
        for (const auto& w : p) ids.push_back(g.vocab_.find(w)->second);
        g.total_pairs_ += count_passage(ids, options.window, g.unigram_, g.cooc_);
    }
    for (auto c : g.unigram_) g.total_tokens_ += c;
    prune(g.cooc_, options.min_cooc);
    return g;
}

Wpn build_wpn(std::span<const std::vector<std::string>> passages, const BuildOptions& options) {
    check_options(passages, options);
    Wpn g;
    g.window_ = options.window;
    g.min_cooc_ = options.min_cooc;
    const auto n = static_cast<std::int64_t>(passages.size());

    // Vocabulary: per-thread distinct sets, merged and sorted.
    std::vector<std::unordered_set<std::string_view>> local_words(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
    {
        auto& mine = local_words[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) mine.insert(passages[i].begin(), passages[i].end());
    }
    std::unordered_set<std::string_view> distinct;
    for (auto& s : local_words) distinct.merge(s);
    g.words_.assign(distinct.begin(), distinct.end());
    std::sort(g.words_.begin(), g.words_.end());
    g.index_words();

    // Sharded counting with a final merge.
    const auto threads = static_cast<std::size_t>(omp_get_max_threads());
    std::vector<std::vector<std::uint64_t>> local_unigram(threads);
    std::vector<PairCounts> local_cooc(threads);
    std::vector<std::uint64_t> local_pairs(threads, 0);
#pragma omp parallel
    {
        const auto t = static_cast<std::size_t>(omp_get_thread_num());
        auto& unigram = local_unigram[t];
        unigram.assign(g.words_.size(), 0);
        std::vector<NodeId> ids;
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t i = 0; i < n; ++i) {
            ids.clear();
            for (const auto& w : passages[i]) ids.push_back(g.vocab_.find(w)->second);
            local_pairs[t] += count_passage(ids, options.window, unigram, local_cooc[t]);
        }
    }

    g.unigram_.assign(g.words_.size(), 0);
    for (std::size_t t = 0; t < threads; ++t) {
        if (local_unigram[t].empty()) continue;
        for (std::size_t i = 0; i < g.unigram_.size(); ++i) g.unigram_[i] += local_unigram[t][i];
        g.total_pairs_ += local_pairs[t];
        if (g.cooc_.empty()) {
            g.cooc_ = std::move(local_cooc[t]);
        } else {
            for (const auto& [k, c] : local_cooc[t]) g.cooc_[k] += c;
        }
    }
    for (auto c : g.unigram_) g.total_tokens_ += c;
    prune(g.cooc_, options.min_cooc);
    return g;
}

Wpn build_wpn(const corpus::CorpusStore& store, const BuildOptions& options) {
    if (store.empty()) throw InvalidArgument("cannot build a WPN from an empty corpus");
    auto seqs = corpus::scoring_sequences(store);
    return build_wpn(seqs, options);
}

} // namespace crown::wpn
