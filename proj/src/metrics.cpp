#include "schemashift/metrics.hpp"

#include <cstdio>
#include <json.hpp>
#include <map>
#include <sstream>

#include "schemashift/errors.hpp"
#include "schemashift/instance.hpp"

namespace schemashift {

namespace {

template <typename Pick>
MatchScore match(std::string_view pred, std::string_view gold, const Schema& schema, Pick pick) {
    const SqlRefs g = extract_refs(gold, schema);
    MatchScore out;
    try {
        const SqlRefs p = extract_refs(pred, schema);
        out.score = set_prf(pick(p), pick(g));
    } catch (const Error&) {
        out.parse_failure = true;
    }
    return out;
}

}  // namespace

MatchScore table_match_f1(std::string_view pred, std::string_view gold, const Schema& schema) {
    return match(pred, gold, schema, [](const SqlRefs& r) { return r.tables; });
}

MatchScore column_match_f1(std::string_view pred, std::string_view gold, const Schema& schema) {
    return match(pred, gold, schema, [](const SqlRefs& r) { return r.columns; });
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Correct: return "correct";
        case Verdict::Incorrect: return "incorrect";
        case Verdict::Error: return "error";
    }
    return "error";
}

Verdict execution_accuracy(std::string_view pred, std::string_view gold, const Database& db) {
    const ResultSet expected = execute(gold, db);
    try {
        return results_match(expected, execute(pred, db)) ? Verdict::Correct : Verdict::Incorrect;
    } catch (const ExecError&) {
        return Verdict::Error;
    }
}

bool is_refusal(std::string_view prediction) {
    return prediction.find(kColumnRefusal) != std::string_view::npos ||
           prediction.find(kTableRefusal) != std::string_view::npos;
}

RefusalRates refusal_rates(const std::vector<std::string>& predictions, const std::vector<bool>& gold_is_sentinel) {
    if (predictions.size() != gold_is_sentinel.size())
        throw InvalidArgument("predictions and golds differ in length");
    RefusalRates r;
    std::size_t fp = 0, tp = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool refused = is_refusal(predictions[i]);
        if (gold_is_sentinel[i]) {
            ++r.sentinel_pool;
            tp += refused;
        } else {
            ++r.sql_pool;
            fp += refused;
        }
    }
    if (r.sql_pool) r.fp = static_cast<double>(fp) / static_cast<double>(r.sql_pool);
    if (r.sentinel_pool) r.tp = static_cast<double>(tp) / static_cast<double>(r.sentinel_pool);
    return r;
}

namespace {

struct Mean {
    double sum = 0;
    std::size_t n = 0;
    void add(double x) {
        sum += x;
        ++n;
    }
    std::optional<double> value() const {
        if (!n) return std::nullopt;
        return sum / static_cast<double>(n);
    }
};

}  // namespace

MetricReport aggregate(const std::vector<InstanceScore>& scores) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const InstanceScore*>> groups;
    for (const auto& s : scores) {
        if (!groups.count(s.ptype)) order.push_back(s.ptype);
        groups[s.ptype].push_back(&s);
    }
    MetricReport report;
    for (const auto& type : order) {
        TypeReport t;
        t.ptype = type;
        Mean tp, tr, tf, cp, cr, cf, ex, fp, rtp;
        for (const InstanceScore* s : groups[type]) {
            ++t.instances;
            if (s->gold_is_sentinel) {
                ++t.sentinel_pool;
                rtp.add(s->refused);
                t.parse_failures += s->parse_failure;
                continue;
            }
            ++t.sql_pool;
            fp.add(s->refused);
            t.parse_failures += s->parse_failure;
            if (s->table && s->column) {
                ++t.f1_pool;
                tp.add(s->table->precision);
                tr.add(s->table->recall);
                tf.add(s->table->f1);
                cp.add(s->column->precision);
                cr.add(s->column->recall);
                cf.add(s->column->f1);
            }
            if (s->exec) {
                ++t.exec_pool;
                ex.add(*s->exec == Verdict::Correct);
            }
        }
        t.table_precision = tp.value();
        t.table_recall = tr.value();
        t.table_f1 = tf.value();
        t.column_precision = cp.value();
        t.column_recall = cr.value();
        t.column_f1 = cf.value();
        t.exec_accuracy = ex.value();
        t.refusal_fp = fp.value();
        t.refusal_tp = rtp.value();
        report.per_type.push_back(std::move(t));
    }

    TypeReport& m = report.macro;
    m.ptype = "MacroAvg";
    using Field = std::optional<double> TypeReport::*;
    for (Field f : {&TypeReport::table_precision, &TypeReport::table_recall, &TypeReport::table_f1,
                    &TypeReport::column_precision, &TypeReport::column_recall, &TypeReport::column_f1,
                    &TypeReport::exec_accuracy, &TypeReport::refusal_fp, &TypeReport::refusal_tp}) {
        Mean mean;
        for (const auto& t : report.per_type)
            if (t.*f) mean.add(*(t.*f));
        m.*f = mean.value();
    }
    for (const auto& t : report.per_type) {
        m.instances += t.instances;
        m.f1_pool += t.f1_pool;
        m.exec_pool += t.exec_pool;
        m.sql_pool += t.sql_pool;
        m.sentinel_pool += t.sentinel_pool;
        m.parse_failures += t.parse_failures;
    }
    return report;
}

namespace {

nlohmann::ordered_json row_json(const TypeReport& t) {
    nlohmann::ordered_json j;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v)
            j[key] = *v;
        else
            j[key] = nullptr;
    };
    j["ptype"] = t.ptype;
    j["instances"] = t.instances;
    put("table_precision", t.table_precision);
    put("table_recall", t.table_recall);
    put("table_f1", t.table_f1);
    put("column_precision", t.column_precision);
    put("column_recall", t.column_recall);
    put("column_f1", t.column_f1);
    put("exec_accuracy", t.exec_accuracy);
    put("refusal_fp", t.refusal_fp);
    put("refusal_tp", t.refusal_tp);
    j["f1_pool"] = t.f1_pool;
    j["exec_pool"] = t.exec_pool;
    j["sql_pool"] = t.sql_pool;
    j["sentinel_pool"] = t.sentinel_pool;
    j["parse_failures"] = t.parse_failures;
    return j;
}

std::string percent(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", *v * 100);
    return buf;
}

}  // namespace

std::string report_jsonl(const MetricReport& report) {
    std::string out;
    for (const auto& t : report.per_type) out += row_json(t).dump() + "\n";
    out += row_json(report.macro).dump() + "\n";
    return out;
}

std::string report_text(const MetricReport& report) {
    std::ostringstream out;
    char line[256];
    const char* header = "%-24s %8s %8s %8s %8s %8s %8s %8s %8s %8s\n";
    std::snprintf(line, sizeof line, header, "Perturbation Type", "Tab P", "Tab R", "Tab F1", "Col P", "Col R",
                  "Col F1", "EX", "OOS FP", "OOS TP");
    out << line;
    auto row = [&](const TypeReport& t) {
        std::snprintf(line, sizeof line, header, t.ptype.c_str(), percent(t.table_precision).c_str(),
                      percent(t.table_recall).c_str(), percent(t.table_f1).c_str(),
                      percent(t.column_precision).c_str(), percent(t.column_recall).c_str(),
                      percent(t.column_f1).c_str(), percent(t.exec_accuracy).c_str(), percent(t.refusal_fp).c_str(),
                      percent(t.refusal_tp).c_str());
        out << line;
    };
    for (const auto& t : report.per_type) row(t);
    row(report.macro);
    return out.str();
}

}  // namespace schemashift
