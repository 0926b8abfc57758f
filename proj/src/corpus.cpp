#include <crown/corpus.hpp>

#include <crown/error.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "binio.hpp"

namespace crown::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr std::string_view kRecMagic = "CRWNREC";
constexpr std::string_view kIdxMagic = "CRWNIDX";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kRecHeader = 8 + sizeof(std::uint32_t);
} // namespace

std::vector<std::string> Passage::scoring_norms() const {
    std::vector<std::string> out;
    out.reserve(scoring.size());
    for (auto i : scoring) out.push_back(tokens[i].norm);
    return out;
}

std::vector<std::uint32_t> Passage::scoring_sentences() const {
    std::vector<std::uint32_t> out;
    out.reserve(scoring.size());
    std::uint32_t s = 0;
    for (auto i : scoring) {
        while (s + 1 < sentences.size() && i >= sentences[s].end) ++s;
        out.push_back(s);
    }
    return out;
}

Passage make_passage(std::string id, std::string text, const text::StopwordList& stop) {
    Passage p;
    p.id = std::move(id);
    p.text = std::move(text);
    auto split = text::split_sentences(p.text);
    p.tokens = std::move(split.tokens);
    p.sentences = std::move(split.spans);
    for (std::size_t i = 0; i < p.tokens.size(); ++i)
        if (!stop.contains(p.tokens[i].norm)) p.scoring.push_back(static_cast<std::uint32_t>(i));
    return p;
}

InputFormat parse_format(const std::string& name) {
    if (name == "tsv") return InputFormat::tsv;
    if (name == "jsonl") return InputFormat::jsonl;
    throw InvalidArgument("unknown input format '" + name + "' (expected tsv or jsonl)");
}

// Read-only handle on the record file; pread keeps concurrent readers independent.
class CorpusStore::File {
public:
    explicit File(const fs::path& path) : fd_(::open(path.c_str(), O_RDONLY)) {
        if (fd_ < 0) throw Error("cannot open " + path.string());
    }
    ~File() { ::close(fd_); }
    File(const File&) = delete;
    File& operator=(const File&) = delete;

    std::string read(std::uint64_t offset, std::uint32_t length) const {
        std::string s(length, '\0');
        std::size_t done = 0;
        while (done < length) {
            auto n = ::pread(fd_, s.data() + done, length - done, static_cast<off_t>(offset + done));
            if (n <= 0) throw FormatError("short read from corpus record file");
            done += static_cast<std::size_t>(n);
        }
        return s;
    }

private:
    int fd_;
};

CorpusStore::CorpusStore() = default;

namespace {

struct Record {
    std::string id;
    std::string text;
};

bool next_record(std::istream& in, InputFormat format, std::size_t& line_no, Record& rec) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (format == InputFormat::tsv) {
            auto tab = line.find('\t');
            if (tab == std::string::npos) throw ParseError("expected 'id<TAB>text'", line_no);
            rec.id = line.substr(0, tab);
            rec.text = line.substr(tab + 1);
        } else {
            json j;
            try {
                j = json::parse(line);
            } catch (const json::parse_error& e) {
                throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
            }
            if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j["id"].is_string() ||
                !j["text"].is_string())
                throw ParseError("expected an object with string fields \"id\" and \"text\"", line_no);
            rec.id = j["id"].get<std::string>();
            rec.text = j["text"].get<std::string>();
        }
        if (rec.id.empty()) throw ParseError("empty id", line_no);
        if (rec.text.empty()) throw ParseError("empty text for id '" + rec.id + "'", line_no);
        return true;
    }
    return false;
}

std::uint32_t scoring_length(const std::string& text) {
    const auto& stop = text::StopwordList::english();
    std::uint32_t n = 0;
    for (const auto& t : text::tokenize(text))
        if (!stop.contains(t.norm)) ++n;
    return n;
}

void verify_record_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    auto size = fs::file_size(path);
    if (size < kRecHeader + sizeof(std::uint64_t))
        throw FormatError(path.string() + ": file too short to be a store");
    std::array<char, 8> magic{};
    std::uint32_t version = 0;
    in.read(magic.data(), magic.size());
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    std::array<char, 8> expected{};
    std::copy(kRecMagic.begin(), kRecMagic.end(), expected.begin());
    if (magic != expected) throw FormatError(path.string() + ": bad magic header");
    if (version != kVersion)
        throw FormatError(path.string() + ": unsupported format version " + std::to_string(version));
    std::uint64_t remaining = size - kRecHeader - sizeof(std::uint64_t);
    std::uint64_t h = binio::kFnvOffset;
    std::array<char, 1 << 16> chunk{};
    while (remaining > 0) {
        auto n = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, chunk.size()));
        in.read(chunk.data(), static_cast<std::streamsize>(n));
        h = binio::fnv1a(chunk.data(), n, h);
        remaining -= n;
    }
    std::uint64_t stored = 0;
    in.read(reinterpret_cast<char*>(&stored), sizeof stored);
    if (!in || stored != h) throw FormatError(path.string() + ": checksum mismatch (corrupt file)");
}

} // namespace

CorpusStore CorpusStore::ingest(std::istream& in, InputFormat format, const fs::path& dir) {
    fs::create_directories(dir);
    auto rec_path = dir / kRecordFile;
    auto idx_path = dir / kIndexFile;
    auto rec_tmp = fs::path(rec_path.string() + ".tmp");
    auto idx_tmp = fs::path(idx_path.string() + ".tmp");

    CorpusStore store;
    try {
        binio::Writer rec(rec_tmp.string(), kRecMagic, kVersion);
        std::size_t line_no = 0;
        Record r;
        while (next_record(in, format, line_no, r)) {
            if (store.by_id_.count(r.id)) throw ParseError("duplicate passage id '" + r.id + "'", line_no);
            rec.put_string(r.id);
            rec.put<std::uint32_t>(static_cast<std::uint32_t>(r.text.size()));
            Entry e{r.id, kRecHeader + rec.bytes_written(), static_cast<std::uint32_t>(r.text.size()),
                    scoring_length(r.text)};
            rec.raw(r.text.data(), r.text.size());
            store.token_count_ += e.scoring_len;
            store.by_id_.emplace(r.id, static_cast<std::uint32_t>(store.entries_.size()));
            store.entries_.push_back(std::move(e));
        }
        rec.finish();

        binio::Writer idx(idx_tmp.string(), kIdxMagic, kVersion);
        idx.put<std::uint64_t>(store.entries_.size());
        idx.put<std::uint64_t>(store.token_count_);
        for (const auto& e : store.entries_) {
            idx.put_string(e.id);
            idx.put(e.offset);
            idx.put(e.length);
            idx.put(e.scoring_len);
        }
        idx.finish();
    } catch (...) {
        std::error_code ec;
        fs::remove(rec_tmp, ec);
        fs::remove(idx_tmp, ec);
        throw;
    }
    fs::rename(rec_tmp, rec_path);
    fs::rename(idx_tmp, idx_path);
    store.file_ = std::make_shared<const File>(rec_path);
    return store;
}

CorpusStore CorpusStore::open(const fs::path& dir) {
    auto rec_path = dir / kRecordFile;
    auto idx_path = dir / kIndexFile;
    CorpusStore store;
    binio::Reader idx(idx_path.string(), kIdxMagic, kVersion);
    auto n = idx.get<std::uint64_t>();
    store.token_count_ = idx.get<std::uint64_t>();
    store.entries_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Entry e;
        e.id = idx.get_string();
        e.offset = idx.get<std::uint64_t>();
        e.length = idx.get<std::uint32_t>();
        e.scoring_len = idx.get<std::uint32_t>();
        if (!store.by_id_.emplace(e.id, static_cast<std::uint32_t>(i)).second)
            throw FormatError(idx_path.string() + ": duplicate id in index");
        store.entries_.push_back(std::move(e));
    }
    idx.expect_end();
    verify_record_file(rec_path);
    auto rec_size = fs::file_size(rec_path);
    for (const auto& e : store.entries_)
        if (e.offset + e.length > rec_size) throw FormatError(idx_path.string() + ": offset out of range");
    store.file_ = std::make_shared<const File>(rec_path);
    return store;
}

CorpusStore CorpusStore::from_records(const std::vector<std::pair<std::string, std::string>>& records) {
    CorpusStore store;
    for (const auto& [id, text] : records) {
        if (id.empty()) throw InvalidArgument("empty passage id");
        if (text.empty()) throw InvalidArgument("empty text for id '" + id + "'");
        if (!store.by_id_.emplace(id, static_cast<std::uint32_t>(store.entries_.size())).second)
            throw InvalidArgument("duplicate passage id '" + id + "'");
        Entry e{id, store.texts_.size(), static_cast<std::uint32_t>(text.size()), scoring_length(text)};
        store.token_count_ += e.scoring_len;
        store.entries_.push_back(std::move(e));
        store.texts_.push_back(text);
    }
    return store;
}

std::string CorpusStore::text_at(std::size_t i) const {
    const auto& e = entries_.at(i);
    if (file_) return file_->read(e.offset, e.length);
    return texts_[e.offset];
}

Passage CorpusStore::get_at(std::size_t i) const { return make_passage(id_at(i), text_at(i)); }

std::size_t CorpusStore::position(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw NotFound("passage not found: " + id);
    return it->second;
}

Passage CorpusStore::get(const std::string& id) const { return get_at(position(id)); }

std::string CorpusStore::text(const std::string& id) const { return text_at(position(id)); }

CorpusStats CorpusStore::stats() const {
    CorpusStats s;
    s.doc_count = entries_.size();
    s.token_count = token_count_;
    s.avg_passage_len = s.doc_count == 0 ? 0.0 : static_cast<double>(s.token_count) / static_cast<double>(s.doc_count);
    return s;
}

void CorpusStore::dump(std::ostream& out) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        out << json{{"id", entries_[i].id}, {"text", text_at(i)}}.dump() << '\n';
}

std::vector<std::vector<std::string>> scoring_sequences(const CorpusStore& store) {
    std::vector<std::vector<std::string>> seqs(store.size());
    const auto n = static_cast<std::int64_t>(store.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) seqs[i] = store.get_at(static_cast<std::size_t>(i)).scoring_norms();
    return seqs;
}

} // namespace crown::corpus
