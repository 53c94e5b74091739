#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "schemashift/database.hpp"
#include "schemashift/schema.hpp"
#include "schemashift/sql_refs.hpp"

namespace schemashift {

struct Prf {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

// Set precision/recall/F1: both empty scores 1, exactly one empty scores 0.
template <typename T>
Prf set_prf(const std::set<T>& pred, const std::set<T>& gold) {
    if (pred.empty() && gold.empty()) return {1, 1, 1};
    if (pred.empty() || gold.empty()) return {0, 0, 0};
    std::size_t hit = 0;
    for (const auto& x : pred) hit += gold.count(x);
    Prf r;
    r.precision = static_cast<double>(hit) / static_cast<double>(pred.size());
    r.recall = static_cast<double>(hit) / static_cast<double>(gold.size());
    r.f1 = hit ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0;
    return r;
}

struct MatchScore {
    Prf score;
    bool parse_failure = false;  // pred did not parse or bind; score is zero
};

// Gold must bind against `schema` (throws otherwise); pred failures score 0.
MatchScore table_match_f1(std::string_view pred_sql, std::string_view gold_sql, const Schema& schema);
MatchScore column_match_f1(std::string_view pred_sql, std::string_view gold_sql, const Schema& schema);

enum class Verdict { Correct, Incorrect, Error };
std::string_view to_string(Verdict v);

// Gold must execute on `db` (ExecError propagates otherwise).
Verdict execution_accuracy(std::string_view pred_sql, std::string_view gold_sql, const Database& db);

// Either refusal sentence appears verbatim.
bool is_refusal(std::string_view prediction);

struct RefusalRates {
    std::optional<double> fp;  // refusals among SQL-gold instances
    std::optional<double> tp;  // refusals among sentinel-gold instances
    std::size_t sql_pool = 0;
    std::size_t sentinel_pool = 0;
};
RefusalRates refusal_rates(const std::vector<std::string>& predictions, const std::vector<bool>& gold_is_sentinel);

// Scores of one prediction.
struct InstanceScore {
    std::string ptype;
    bool gold_is_sentinel = false;
    bool refused = false;
    bool parse_failure = false;  // no prediction, or SQL gold and an unparseable one
    std::optional<Prf> table;    // SQL gold only
    std::optional<Prf> column;
    std::optional<Verdict> exec;  // SQL gold that executes
};

struct TypeReport {
    std::string ptype;  // "MacroAvg" for the macro row
    std::size_t instances = 0;
    std::size_t f1_pool = 0;
    std::size_t exec_pool = 0;
    std::size_t sql_pool = 0;
    std::size_t sentinel_pool = 0;
    std::size_t parse_failures = 0;
    std::optional<double> table_precision, table_recall, table_f1;
    std::optional<double> column_precision, column_recall, column_f1;
    std::optional<double> exec_accuracy;
    std::optional<double> refusal_fp, refusal_tp;
};

struct MetricReport {
    std::vector<TypeReport> per_type;  // first-seen ptype order
    TypeReport macro;                  // unweighted mean over per_type rows
};

MetricReport aggregate(const std::vector<InstanceScore>& scores);

// One JSON object per line: every type, then the macro row.
std::string report_jsonl(const MetricReport& report);
std::string report_text(const MetricReport& report);

}  // namespace schemashift
