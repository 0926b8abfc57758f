#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace crown::eval {

/// Graded judgments; unjudged (query, passage) pairs have grade 0.
class Qrels {
public:
    /// TREC format "qid 0 docid grade"; the second column is ignored.
    static Qrels parse(std::istream& in);
    static Qrels load(const std::string& path);

    void add(const std::string& qid, const std::string& docid, int grade);
    int grade(const std::string& qid, const std::string& docid) const;
    int max_grade() const noexcept { return g_max_; }
    bool has_query(const std::string& qid) const { return judgments_.count(qid) != 0; }
    /// All grades judged for a query (including zeros).
    std::vector<int> grades(const std::string& qid) const;
    std::vector<std::string> queries() const;

private:
    std::map<std::string, std::map<std::string, int>> judgments_;
    int g_max_ = 0;
};

struct RunRecord {
    std::string qid;
    std::string docid;
    std::size_t rank = 0;
    double score = 0.0;
    std::string tag;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// "qid Q0 docid rank score tag" with the score at 6 decimals.
std::string format_run_line(const RunRecord& r);
void write_run(std::ostream& out, std::span<const RunRecord> records);
/// Checks format and that ranks run 1..n within each query block.
std::vector<RunRecord> read_run(std::istream& in);
std::vector<RunRecord> read_run_file(const std::string& path);

double ndcg_at_k(std::span<const std::string> ranking, const Qrels& qrels, const std::string& qid, std::size_t k);
double err_at_k(std::span<const std::string> ranking, const Qrels& qrels, const std::string& qid, std::size_t k);
double ap_at_k(std::span<const std::string> ranking, const Qrels& qrels, const std::string& qid, std::size_t k,
               int rel_threshold = 1);

enum class Metric { ap, ndcg, err };

struct MetricSpec {
    Metric metric = Metric::ndcg;
    std::size_t k = 1000;

    std::string name() const;
    friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

/// Parses a comma-separated list such as "ap@5,ndcg@1000,err@20".
std::vector<MetricSpec> parse_metrics(const std::string& list);

double evaluate(const MetricSpec& m, std::span<const std::string> ranking, const Qrels& qrels,
                const std::string& qid, int rel_threshold = 1);

struct ReportRow {
    std::string label;
    std::size_t queries = 0;
    std::vector<double> values;
};

struct TurnReport {
    std::vector<MetricSpec> metrics;
    /// One row per turn number (ascending) followed by the "All" row.
    std::vector<ReportRow> rows;
    /// Run queries that have no judgments.
    std::vector<std::string> unjudged;

    void write_tsv(std::ostream& out) const;
    void write_text(std::ostream& out) const;
};

/// Mean of each metric per turn, with query ids of the form "<topic>_<turn>".
TurnReport turnwise_report(std::span<const RunRecord> run, const Qrels& qrels, std::span<const MetricSpec> metrics,
                           int rel_threshold = 1);

/// Splits "<topic>_<turn>"; throws ParseError when the turn is not a number.
std::pair<std::string, std::size_t> split_qid(const std::string& qid);

} // namespace crown::eval
