#include <crown/embed.hpp>

#include <crown/error.hpp>
#include <crown/text.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace crown::embed {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        auto start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

} // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool EmbeddingStore::add(std::string_view word, std::span<const double> vec) {
    if (vec.size() != dim_)
        throw InvalidArgument("vector for '" + std::string(word) + "' has dimension " + std::to_string(vec.size()) +
                              ", expected " + std::to_string(dim_));
    auto key = text::fold_case(word);
    if (index_.find(key) != index_.end()) return false;
    double norm = std::sqrt(dot(vec, vec));
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw InvalidArgument("vector for '" + std::string(word) + "' cannot be normalized");
    index_.emplace(key, static_cast<std::uint32_t>(words_.size()));
    words_.push_back(std::move(key));
    for (double v : vec) data_.push_back(v / norm);
    return true;
}

EmbeddingStore EmbeddingStore::parse(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(source + ": missing header line", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_ws(line);
    std::size_t count = 0, dim = 0;
    if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) || dim == 0)
        throw ParseError(source + ": header must be '<count> <dim>'", 1);

    EmbeddingStore store(dim);
    std::vector<double> vec(dim);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != dim + 1)
            throw ParseError(source + ": expected " + std::to_string(dim) + " values, found " +
                                 std::to_string(fields.size() - 1),
                             line_no);
        for (std::size_t i = 0; i < dim; ++i) {
            double v = 0.0;
            if (!parse_number(fields[i + 1], v) || !std::isfinite(v))
                throw ParseError(source + ": cannot parse '" + std::string(fields[i + 1]) + "' as a number", line_no);
            vec[i] = v;
        }
        try {
            if (!store.add(fields[0], vec))
                store.warnings_.push_back(source + ":" + std::to_string(line_no) + ": duplicate word '" +
                                          std::string(fields[0]) + "', keeping first vector");
        } catch (const InvalidArgument& e) {
            throw ParseError(source + ": " + e.what(), line_no);
        }
        ++rows;
    }
    if (rows != count)
        throw ParseError(source + ": header declares " + std::to_string(count) + " vectors, file has " +
                         std::to_string(rows));
    return store;
}

EmbeddingStore EmbeddingStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open embeddings " + path);
    return parse(in, path);
}

bool EmbeddingStore::contains(std::string_view word) const { return index_.find(word) != index_.end(); }

std::span<const double> EmbeddingStore::vector(std::string_view word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return {};
    return {data_.data() + static_cast<std::size_t>(it->second) * dim_, dim_};
}

std::optional<double> sim(const EmbeddingStore& store, std::string_view a, std::string_view b) {
    if (a == b) return 1.0;
    auto va = store.vector(a);
    auto vb = store.vector(b);
    if (va.empty() || vb.empty()) return std::nullopt;
    return std::clamp(dot(va, vb), -1.0, 1.0);
}

} // namespace crown::embed
