#include <crown/retrieval.hpp>

#include <crown/corpus.hpp>
#include <crown/error.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "binio.hpp"

namespace crown::retrieval {

namespace {
constexpr std::string_view kMagic = "CRWNINV";
constexpr std::uint32_t kVersion = 1;
} // namespace

double bm25_idf(std::size_t doc_count, std::size_t df) {
    const double n = static_cast<double>(doc_count);
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double bm25_tf(std::uint32_t tf, std::uint32_t doc_len, double avg_len, const Bm25Params& p) {
    const double f = static_cast<double>(tf);
    const double norm = 1.0 - p.b + p.b * static_cast<double>(doc_len) / avg_len;
    return f * (p.k1 + 1.0) / (f + p.k1 * norm);
}

InvertedIndex InvertedIndex::build(const corpus::CorpusStore& store) {
    if (store.empty()) throw InvalidArgument("cannot index an empty corpus");
    std::vector<std::string> ids(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) ids[i] = store.id_at(i);
    auto seqs = corpus::scoring_sequences(store);
    return build(ids, seqs);
}

InvertedIndex InvertedIndex::build(std::span<const std::string> ids, std::span<const std::vector<std::string>> sequences) {
    if (ids.size() != sequences.size()) throw InvalidArgument("ids and sequences differ in length");
    if (ids.empty()) throw InvalidArgument("cannot index an empty corpus");

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (!sequences[i].empty()) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

    InvertedIndex idx;
    std::map<std::string_view, std::uint32_t> tf;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto doc = static_cast<std::uint32_t>(pos);
        const auto& seq = sequences[order[pos]];
        if (pos > 0 && ids[order[pos]] == idx.ids_.back())
            throw InvalidArgument("duplicate passage id '" + ids[order[pos]] + "'");
        idx.ids_.push_back(ids[order[pos]]);
        idx.doc_len_.push_back(static_cast<std::uint32_t>(seq.size()));
        tf.clear();
        for (const auto& w : seq) ++tf[w];
        for (const auto& [term, count] : tf) {
            auto it = idx.postings_.find(term);
            if (it == idx.postings_.end()) it = idx.postings_.emplace(std::string(term), std::vector<Posting>{}).first;
            it->second.push_back({doc, count});
        }
    }
    idx.finish();
    return idx;
}

void InvertedIndex::finish() {
    const double total = std::accumulate(doc_len_.begin(), doc_len_.end(), 0.0);
    avg_len_ = ids_.empty() ? 0.0 : total / static_cast<double>(ids_.size());
}

std::span<const InvertedIndex::Posting> InvertedIndex::postings(std::string_view term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return {};
    return it->second;
}

void InvertedIndex::save(const std::string& path) const {
    binio::Writer w(path, kMagic, kVersion);
    w.put<std::uint64_t>(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        w.put_string(ids_[i]);
        w.put(doc_len_[i]);
    }
    std::vector<std::string_view> terms;
    terms.reserve(postings_.size());
    for (const auto& [t, _] : postings_) terms.push_back(t);
    std::sort(terms.begin(), terms.end());
    w.put<std::uint64_t>(terms.size());
    for (auto t : terms) {
        const auto& list = postings_.find(t)->second;
        w.put_string(t);
        w.put<std::uint64_t>(list.size());
        for (const auto& p : list) {
            w.put(p.doc);
            w.put(p.tf);
        }
    }
    w.finish();
}

InvertedIndex InvertedIndex::load(const std::string& path) {
    binio::Reader r(path, kMagic, kVersion);
    InvertedIndex idx;
    auto n = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
        idx.ids_.push_back(r.get_string());
        idx.doc_len_.push_back(r.get<std::uint32_t>());
        if (idx.doc_len_.back() == 0) throw FormatError(path + ": zero-length document");
    }
    auto terms = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < terms; ++i) {
        auto term = r.get_string();
        auto m = r.get<std::uint64_t>();
        std::vector<Posting> list;
        list.reserve(m);
        for (std::uint64_t j = 0; j < m; ++j) {
            Posting p{r.get<std::uint32_t>(), r.get<std::uint32_t>()};
            if (p.doc >= n || p.tf == 0 || (!list.empty() && list.back().doc >= p.doc))
                throw FormatError(path + ": invalid posting for '" + term + "'");
            list.push_back(p);
        }
        idx.postings_.emplace(std::move(term), std::move(list));
    }
    r.expect_end();
    idx.finish();
    return idx;
}

CandidateList retrieve(const InvertedIndex& index, const conversation::ConversationalQuery& cq, std::size_t k,
                       const Bm25Params& params) {
    if (k < 1) throw InvalidArgument("pool size k must be >= 1");
    CandidateList out;
    const auto n = index.doc_count();
    if (n == 0) return out;

    std::vector<double> acc(n, 0.0);
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> touched;
    for (const auto& item : cq.items) {
        auto list = index.postings(item.norm);
        if (list.empty()) continue;
        const double idf = bm25_idf(n, list.size());
        for (const auto& p : list) {
            acc[p.doc] += item.weight * idf * bm25_tf(p.tf, index.doc_len(p.doc), index.avg_len(), params);
            if (!seen[p.doc]) {
                seen[p.doc] = 1;
                touched.push_back(p.doc);
            }
        }
    }
    auto better = [&](std::uint32_t a, std::uint32_t b) { return acc[a] != acc[b] ? acc[a] > acc[b] : a < b; };
    const auto take = std::min(k, touched.size());
    std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(take), touched.end(), better);
    out.entries.reserve(take);
    for (std::size_t r = 0; r < take; ++r) out.entries.push_back({index.doc_id(touched[r]), acc[touched[r]], r + 1});
    return out;
}

CandidateList retrieve_union(const InvertedIndex& index, std::span<const conversation::ConversationalQuery> queries,
                             std::size_t k, const Bm25Params& params) {
    if (queries.empty()) throw InvalidArgument("retrieve_union needs at least one query");
    std::set<std::string> ids;
    for (const auto& q : queries)
        for (auto& c : retrieve(index, q, k, params).entries) ids.insert(std::move(c.id));
    CandidateList out;
    out.has_prior = false;
    std::size_t pos = 0;
    for (const auto& id : ids) out.entries.push_back({id, 0.0, ++pos});
    return out;
}

} // namespace crown::retrieval
