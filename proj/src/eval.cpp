#include <crown/eval.hpp>

#include <crown/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace crown::eval {

namespace {

std::vector<std::string> fields(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string f;
    while (in >> f) out.push_back(std::move(f));
    return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

double gain(int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; }

} // namespace

Qrels Qrels::parse(std::istream& in) {
    Qrels q;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto f = fields(line);
        if (f.empty()) continue;
        int grade = 0;
        if (f.size() != 4 || !parse_number(f[3], grade))
            throw ParseError("qrels: expected 'qid 0 docid grade'", line_no);
        if (grade < 0) throw ParseError("qrels: negative grade", line_no);
        q.add(f[0], f[2], grade);
    }
    return q;
}

Qrels Qrels::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open qrels " + path);
    return parse(in);
}

void Qrels::add(const std::string& qid, const std::string& docid, int grade) {
    if (grade < 0) throw InvalidArgument("grades must be non-negative");
    judgments_[qid][docid] = grade;
    g_max_ = std::max(g_max_, grade);
}

int Qrels::grade(const std::string& qid, const std::string& docid) const {
    auto q = judgments_.find(qid);
    if (q == judgments_.end()) return 0;
    auto d = q->second.find(docid);
    return d == q->second.end() ? 0 : d->second;
}

std::vector<int> Qrels::grades(const std::string& qid) const {
    std::vector<int> out;
    auto q = judgments_.find(qid);
    if (q == judgments_.end()) return out;
    for (const auto& [_, g] : q->second) out.push_back(g);
    return out;
}

std::vector<std::string> Qrels::queries() const {
    std::vector<std::string> out;
    for (const auto& [q, _] : judgments_) out.push_back(q);
    return out;
}

std::string format_run_line(const RunRecord& r) {
    char score[64];
    std::snprintf(score, sizeof score, "%.6f", r.score);
    return r.qid + " Q0 " + r.docid + " " + std::to_string(r.rank) + " " + score + " " + r.tag;
}

void write_run(std::ostream& out, std::span<const RunRecord> records) {
    for (const auto& r : records) out << format_run_line(r) << '\n';
}

std::vector<RunRecord> read_run(std::istream& in) {
    std::vector<RunRecord> out;
    std::set<std::string> finished;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto f = fields(line);
        if (f.empty()) continue;
        RunRecord r;
        if (f.size() != 6 || !parse_number(f[3], r.rank) || !parse_number(f[4], r.score))
            throw ParseError("run: expected 'qid Q0 docid rank score tag'", line_no);
        r.qid = f[0];
        r.docid = f[2];
        r.tag = f[5];
        const bool continues = !out.empty() && out.back().qid == r.qid;
        if (!continues) {
            if (!out.empty()) finished.insert(out.back().qid);
            if (finished.count(r.qid)) throw ParseError("run: records for query " + r.qid + " are not contiguous", line_no);
        }
        const std::size_t expected = continues ? out.back().rank + 1 : 1;
        if (r.rank != expected)
            throw ParseError("run: rank " + std::to_string(r.rank) + " for query " + r.qid + ", expected " +
                                 std::to_string(expected),
                             line_no);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RunRecord> read_run_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open run file " + path);
    return read_run(in);
}

double ndcg_at_k(std::span<const std::string> ranking, const Qrels& qrels, const std::string& qid, std::size_t k) {
    auto ideal = qrels.grades(qid);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t r = 0; r < ideal.size() && r < k; ++r) idcg += gain(ideal[r]) / std::log2(static_cast<double>(r + 2));
    if (idcg <= 0.0) return 0.0;
    double dcg = 0.0;
    for (std::size_t r = 0; r < ranking.size() && r < k; ++r)
        dcg += gain(qrels.grade(qid, ranking[r])) / std::log2(static_cast<double>(r + 2));
    return dcg / idcg;
}

double err_at_k(std::span<const std::string> ranking, const Qrels& qrels, const std::string& qid, std::size_t k) {
    const int g_max = qrels.max_grade();
    if (g_max <= 0) return 0.0;
    const double denom = std::exp2(static_cast<double>(g_max));
    double err = 0.0;
    double not_stopped = 1.0;
    for (std::size_t r = 0; r < ranking.size() && r < k; ++r) {
        const double stop = gain(qrels.grade(qid, ranking[r])) / denom;
        err += not_stopped * stop / static_cast<double>(r + 1);
        not_stopped *= 1.0 - stop;
    }
    return err;
}

double ap_at_k(std::span<const std::string> ranking, const Qrels& qrels, const std::string& qid, std::size_t k,
               int rel_threshold) {
    if (rel_threshold < 1) throw InvalidArgument("relevance threshold must be >= 1");
    std::size_t relevant = 0;
    for (int g : qrels.grades(qid))
        if (g >= rel_threshold) ++relevant;
    relevant = std::min(relevant, k);
    if (relevant == 0) return 0.0;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ranking.size() && r < k; ++r) {
        if (qrels.grade(qid, ranking[r]) >= rel_threshold) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(relevant);
}

std::string MetricSpec::name() const {
    const char* base = metric == Metric::ap ? "ap" : metric == Metric::ndcg ? "ndcg" : "err";
    return std::string(base) + "@" + std::to_string(k);
}

std::vector<MetricSpec> parse_metrics(const std::string& list) {
    std::vector<MetricSpec> out;
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        auto at = item.find('@');
        MetricSpec m;
        auto name = item.substr(0, at);
        if (name == "ap" || name == "map")
            m.metric = Metric::ap;
        else if (name == "ndcg")
            m.metric = Metric::ndcg;
        else if (name == "err")
            m.metric = Metric::err;
        else
            throw InvalidArgument("unknown metric '" + name + "' (expected ap, ndcg or err)");
        if (at != std::string::npos && (!parse_number(item.substr(at + 1), m.k) || m.k < 1))
            throw InvalidArgument("bad cutoff in metric '" + item + "'");
        out.push_back(m);
    }
    if (out.empty()) throw InvalidArgument("no metrics given");
    return out;
}

double evaluate(const MetricSpec& m, std::span<const std::string> ranking, const Qrels& qrels, const std::string& qid,
                int rel_threshold) {
    switch (m.metric) {
    case Metric::ap: return ap_at_k(ranking, qrels, qid, m.k, rel_threshold);
    case Metric::ndcg: return ndcg_at_k(ranking, qrels, qid, m.k);
    case Metric::err: return err_at_k(ranking, qrels, qid, m.k);
    }
    return 0.0;
}

std::pair<std::string, std::size_t> split_qid(const std::string& qid) {
    auto us = qid.rfind('_');
    std::size_t turn = 0;
    if (us == std::string::npos || us == 0 || !parse_number(qid.substr(us + 1), turn))
        throw ParseError("query id '" + qid + "' is not of the form <topic>_<turn>");
    return {qid.substr(0, us), turn};
}

TurnReport turnwise_report(std::span<const RunRecord> run, const Qrels& qrels, std::span<const MetricSpec> metrics,
                           int rel_threshold) {
    // Rankings per query in rank order.
    std::map<std::string, std::vector<std::pair<std::size_t, std::string>>> rankings;
    for (const auto& r : run) rankings[r.qid].emplace_back(r.rank, r.docid);

    TurnReport report;
    report.metrics.assign(metrics.begin(), metrics.end());
    std::map<std::size_t, ReportRow> by_turn;
    ReportRow all{"All", 0, std::vector<double>(metrics.size(), 0.0)};

    for (auto& [qid, entries] : rankings) {
        auto [topic, turn] = split_qid(qid);
        (void)topic;
        if (!qrels.has_query(qid)) report.unjudged.push_back(qid);
        std::sort(entries.begin(), entries.end());
        std::vector<std::string> ranking;
        ranking.reserve(entries.size());
        for (auto& e : entries) ranking.push_back(e.second);

        auto& row = by_turn[turn];
        if (row.values.empty()) {
            row.label = std::to_string(turn);
            row.values.assign(metrics.size(), 0.0);
        }
        ++row.queries;
        ++all.queries;
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            const double v = evaluate(metrics[m], ranking, qrels, qid, rel_threshold);
            row.values[m] += v;
            all.values[m] += v;
        }
    }
    auto finish = [](ReportRow& row) {
        if (row.queries == 0) return;
        for (auto& v : row.values) v /= static_cast<double>(row.queries);
    };
    for (auto& [_, row] : by_turn) {
        finish(row);
        report.rows.push_back(std::move(row));
    }
    finish(all);
    report.rows.push_back(std::move(all));
    return report;
}

void TurnReport::write_tsv(std::ostream& out) const {
    out << "turn\tqueries";
    for (const auto& m : metrics) out << '\t' << m.name();
    out << '\n';
    char buf[32];
    for (const auto& row : rows) {
        out << row.label << '\t' << row.queries;
        for (double v : row.values) {
            std::snprintf(buf, sizeof buf, "%.4f", v);
            out << '\t' << buf;
        }
        out << '\n';
    }
}

void TurnReport::write_text(std::ostream& out) const {
    out << std::left << std::setw(6) << "Turn" << std::right << std::setw(9) << "Queries";
    for (const auto& m : metrics) out << std::setw(12) << m.name();
    out << '\n';
    out << std::fixed << std::setprecision(4);
    for (const auto& row : rows) {
        out << std::left << std::setw(6) << row.label << std::right << std::setw(9) << row.queries;
        for (double v : row.values) out << std::setw(12) << v;
        out << '\n';
    }
    out << std::defaultfloat;
}

} // namespace crown::eval
