#include "schemashift/report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "schemashift/ddl.hpp"
#include "schemashift/errors.hpp"

namespace schemashift {

std::optional<Summary> summarize(std::vector<double> v) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    Summary s;
    s.min = v.front();
    s.max = v.back();
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    const std::size_t n = v.size();
    s.median = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
    return s;
}

namespace {

// Canonical row order; -1 for unknown names.
int rank(const std::string& ptype) {
    if (ptype == "original") return 0;
    int i = 1;
    for (auto t : kAllPerturbationTypes) {
        if (to_string(t) == ptype) return i;
        ++i;
    }
    return -1;
}

}  // namespace

std::vector<StatsRow> compute_stats(const std::vector<CorpusRecord>& train, const std::vector<CorpusRecord>& eval,
                                    std::uint64_t exec_seed) {
    std::map<int, StatsRow> rows;
    std::map<int, std::vector<double>> per_table, per_query;
    auto row = [&](const CorpusRecord& r) -> StatsRow& {
        const int k = rank(r.ptype);
        if (k < 0) throw InvalidArgument("unknown ptype " + r.ptype);
        StatsRow& s = rows[k];
        s.ptype = r.ptype;
        return s;
    };
    auto manipulation = [&](const CorpusRecord& r) {
        if (!r.evolution) return;
        const int k = rank(r.ptype);
        per_query[k].push_back(r.evolution->manipulated_count);
        for (const auto& [_, n] : r.evolution->manipulated_per_table) per_table[k].push_back(n);
    };
    for (const auto& r : train) {
        ++row(r).train_count;
        manipulation(r);
    }
    for (const auto& r : eval) {
        StatsRow& s = row(r);
        ++s.eval_count;
        manipulation(r);
        const auto type = parse_perturbation_type(r.ptype);
        if (type && is_refusal_type(*type)) continue;
        s.eval_exec_count = s.eval_exec_count.value_or(0) + gold_executes(r, exec_seed);
    }
    std::vector<StatsRow> out;
    for (auto& [k, s] : rows) {
        const auto type = parse_perturbation_type(s.ptype);
        if (!(type && is_refusal_type(*type)) && !s.eval_exec_count) s.eval_exec_count = 0;
        if (type) {
            s.per_query = summarize(per_query[k]);
            if (is_column_level(*type)) s.per_table = summarize(per_table[k]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string display_name(std::string_view ptype) {
    static const std::pair<const char*, const char*> names[] = {
        {"original", "Original"},           {"add_columns", "Add Columns"},
        {"remove_columns", "Remove Columns"}, {"remove_columns_in_sql", "Remove Col in SQL"},
        {"rename_columns", "Rename Columns"}, {"split_columns", "Split Columns"},
        {"merge_columns", "Merge Columns"},   {"add_tables", "Add Tables"},
        {"remove_tables", "Remove Tables"},   {"rename_tables", "Rename Tables"},
        {"split_tables", "Split Tables"},     {"merge_tables", "Merge Tables"},
    };
    for (const auto& [key, name] : names)
        if (ptype == key) return name;
    return std::string(ptype);
}

namespace {

std::string number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", x);
    std::string s = buf;
    if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
    return s;
}

std::vector<std::string> summary_cells(const std::optional<Summary>& s) {
    if (!s) return {"-", "-", "-", "-"};
    return {number(s->min), number(s->mean), number(s->median), number(s->max)};
}

}  // namespace

std::string render_stats(const std::vector<StatsRow>& rows) {
    std::ostringstream out;
    char line[256];
    const char* fmt = "%-18s | %6s %6s %6s | %4s %6s %6s %4s | %4s %6s %6s %4s\n";
    std::snprintf(line, sizeof line, "%-18s | %20s | %-24s | %-24s\n", "", "", "Manipulated Items/Table",
                  "Manipulated Items/Query");
    out << line;
    std::snprintf(line, sizeof line, fmt, "Perturbation Type", "Train", "Eval", "Eval*", "Min", "Mean", "Median",
                  "Max", "Min", "Mean", "Median", "Max");
    out << line;
    const std::string rule(std::strlen(line) - 1, '-');
    out << rule << '\n';
    const char* section = nullptr;
    for (const auto& r : rows) {
        const auto type = parse_perturbation_type(r.ptype);
        const char* wanted = !type ? nullptr : is_column_level(*type) ? "Column Manipulation" : "Table Manipulation";
        if (wanted && wanted != section) {
            section = wanted;
            std::snprintf(line, sizeof line, "%-18s | %20s | %s\n", "", "", section);
            out << rule << '\n' << line << rule << '\n';
        }
        const auto t = summary_cells(r.per_table);
        const auto q = summary_cells(r.per_query);
        const std::string exec = r.eval_exec_count ? std::to_string(*r.eval_exec_count) : "-";
        std::snprintf(line, sizeof line, fmt, display_name(r.ptype).c_str(), std::to_string(r.train_count).c_str(),
                      std::to_string(r.eval_count).c_str(), exec.c_str(), t[0].c_str(), t[1].c_str(), t[2].c_str(),
                      t[3].c_str(), q[0].c_str(), q[1].c_str(), q[2].c_str(), q[3].c_str());
        out << line;
    }
    return out.str();
}

std::string stats_json(const std::vector<StatsRow>& rows) {
    Json out = Json::array();
    auto summary = [](const std::optional<Summary>& s) -> Json {
        if (!s) return nullptr;
        return {{"min", s->min}, {"mean", s->mean}, {"median", s->median}, {"max", s->max}};
    };
    for (const auto& r : rows) {
        Json j;
        j["ptype"] = r.ptype;
        j["train_count"] = r.train_count;
        j["eval_count"] = r.eval_count;
        j["eval_exec_count"] = r.eval_exec_count ? Json(*r.eval_exec_count) : Json(nullptr);
        j["per_table"] = summary(r.per_table);
        j["per_query"] = summary(r.per_query);
        out.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
}

Predictions read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open file", path.string(), 0);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    Predictions out;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return out;

    const Json whole = Json::parse(text, nullptr, false);
    if (!whole.is_discarded() && whole.is_object() && !whole.contains("prediction")) {
        for (const auto& [id, v] : whole.items()) {
            if (!v.is_string()) throw FormatError("prediction for " + id + " is not a string", path.string(), 1);
            out[{id, ""}] = v.get<std::string>();
        }
        return out;
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw FormatError("invalid JSON", path.string(), n);
        try {
            const std::string ptype = j.contains("ptype") ? j.at("ptype").get<std::string>() : "";
            out[{j.at("instance_id").get<std::string>(), ptype}] = j.at("prediction").get<std::string>();
        } catch (const Json::exception& e) {
            throw FormatError(e.what(), path.string(), n);
        }
    }
    return out;
}

std::vector<InstanceScore> score_records(const std::vector<CorpusRecord>& corpus, const Predictions& predictions,
                                         std::uint64_t exec_seed) {
    std::vector<InstanceScore> out;
    for (const auto& r : corpus) {
        const std::string* pred = nullptr;
        if (auto it = predictions.find({r.instance_id, r.ptype}); it != predictions.end())
            pred = &it->second;
        else if (auto any = predictions.find({r.instance_id, ""}); any != predictions.end())
            pred = &any->second;

        InstanceScore s;
        s.ptype = r.ptype;
        s.gold_is_sentinel = parse_sentinel(r.gold).has_value();
        s.refused = pred && is_refusal(*pred);
        if (s.gold_is_sentinel) {
            s.parse_failure = !pred;
            out.push_back(std::move(s));
            continue;
        }
        const Schema schema = parse_ddl(r.schema_ddl, r.db_id);
        const std::string text = pred ? *pred : std::string();
        try {
            const MatchScore tables = table_match_f1(text, r.gold, schema);
            const MatchScore columns = column_match_f1(text, r.gold, schema);
            s.table = tables.score;
            s.column = columns.score;
            s.parse_failure = !pred || (!s.refused && tables.parse_failure);
        } catch (const Error&) {
            // Gold that does not bind (flagged records) stays out of the F1 pool.
            s.parse_failure = !pred;
        }
        try {
            const Database db = record_database(r, exec_seed);
            execute(r.gold, db);
            s.exec = pred ? execution_accuracy(text, r.gold, db) : Verdict::Error;
        } catch (const Error&) {
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace schemashift
