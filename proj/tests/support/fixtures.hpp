#pragma once

// Deterministic random fixtures shared by unit tests, oracles and the
// acceptance runner.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

/// Distinct letters-only word for index i ("ka", "kb", ..., "qab", ...).
inline std::string word(std::size_t i) {
    std::string s = i < 26 ? "k" : "q";
    do {
        s += static_cast<char>('a' + i % 26);
        i /= 26;
    } while (i > 0);
    return s;
}

/// Random token sequences for WPN checks, at most `max_tokens` in total.
inline std::vector<std::vector<std::string>> random_sequences(std::mt19937_64& rng, std::size_t max_tokens = 1000) {
    std::uniform_int_distribution<std::size_t> vocab_d(2, 40), passages_d(1, 30), len_d(0, 40);
    const auto vocab = vocab_d(rng);
    std::uniform_int_distribution<std::size_t> w(0, vocab - 1);
    std::vector<std::vector<std::string>> out;
    std::size_t total = 0;
    const auto n = passages_d(rng);
    for (std::size_t p = 0; p < n && total < max_tokens; ++p) {
        std::vector<std::string> seq;
        const auto len = std::min(len_d(rng), max_tokens - total);
        for (std::size_t i = 0; i < len; ++i) seq.push_back(word(w(rng)));
        total += seq.size();
        out.push_back(std::move(seq));
    }
    if (total == 0) out.push_back({word(0), word(1)});
    return out;
}

struct PipelineFixture {
    std::vector<std::pair<std::string, std::string>> passages;
    /// Raw (unnormalized) vectors.
    std::map<std::string, std::vector<double>> vectors;
    std::vector<std::string> turns;

    /// word2vec text rendering of `vectors`.
    std::string embeddings_text() const {
        std::ostringstream out;
        out.precision(17);
        out << vectors.size() << ' ' << (vectors.empty() ? 0 : vectors.begin()->second.size()) << '\n';
        for (const auto& [w, v] : vectors) {
            out << w;
            for (double x : v) out << ' ' << x;
            out << '\n';
        }
        return out.str();
    }
};

/// Up to 50 passages over up to 200 words. Words come in clusters whose
/// members are close in embedding space; about a tenth have no vector.
inline PipelineFixture random_pipeline(std::mt19937_64& rng) {
    static const char* const fillers[] = {"the", "of", "and", "a", "is", "in", "to", "was"};
    static const char* const enders[] = {".", "!", "?", ","};
    constexpr std::size_t dim = 8;

    PipelineFixture f;
    std::uniform_int_distribution<std::size_t> vocab_d(20, 200), passages_d(5, 50), sentences_d(1, 4),
        sentence_len_d(1, 9), turns_d(1, 4), turn_len_d(1, 3);
    const auto vocab = vocab_d(rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> centre(dim);
    for (std::size_t i = 0; i < vocab; ++i) {
        if (i % 6 == 0)
            for (auto& c : centre) c = gauss(rng);
        if (unit(rng) < 0.1) continue;
        std::vector<double> v(dim);
        const double noise = 0.15 + 0.5 * unit(rng);
        for (std::size_t d = 0; d < dim; ++d) v[d] = centre[d] + noise * gauss(rng);
        f.vectors.emplace(word(i), std::move(v));
    }

    std::uniform_int_distribution<std::size_t> w(0, vocab - 1);
    std::uniform_int_distribution<std::size_t> filler(0, std::size(fillers) - 1), ender(0, std::size(enders) - 1);
    const auto n = passages_d(rng);
    for (std::size_t p = 0; p < n; ++p) {
        std::string text;
        const auto sentences = sentences_d(rng);
        for (std::size_t s = 0; s < sentences; ++s) {
            const auto len = sentence_len_d(rng);
            for (std::size_t i = 0; i < len; ++i) {
                if (!text.empty()) text += ' ';
                text += unit(rng) < 0.25 ? fillers[filler(rng)] : word(w(rng));
            }
            text += enders[ender(rng)];
        }
        char id[32];
        std::snprintf(id, sizeof id, "p%03zu", p);
        f.passages.emplace_back(id, text);
    }

    const auto turns = turns_d(rng);
    for (std::size_t t = 0; t < turns; ++t) {
        std::string q = "what about";
        const auto len = turn_len_d(rng);
        for (std::size_t i = 0; i < len; ++i) q += ' ' + word(w(rng));
        f.turns.push_back(q + "?");
    }
    return f;
}

} // namespace fixtures
