// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fail.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "pipeline.hpp"
#include "properties.hpp"
#include "schemashift/corpus.hpp"
#include "schemashift/report.hpp"

using namespace schemashift;
using testkit::PropertyResult;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

std::string first_failure(const PropertyResult& r) { return r.failures.empty() ? "" : "; first: " + r.failures.front(); }

Outcome from_property(const PropertyResult& r, std::chrono::milliseconds budget = std::chrono::milliseconds::max()) {
    Outcome v;
    v.ok = r.ok() && r.elapsed < budget;
    v.detail = std::to_string(r.passed) + "/" + std::to_string(r.trials);
    if (r.elapsed >= budget) v.detail += "; over budget";
    v.detail += first_failure(r);
    return v;
}

Outcome integrity() {
    const auto r = testkit::integrity_totality(2024, 1000);
    Outcome v = from_property(r, std::chrono::seconds(60));
    std::size_t skips = 0;
    for (const auto& [key, n] : r.tally)
        if (!key.ends_with("/ok") && !key.ends_with("/review")) skips += n;
    v.detail += "; 1000 schemas x 11 types, " + std::to_string(skips) + " typed skips";
    return v;
}

Outcome preservation() {
    const PerturbationType types[] = {
        PerturbationType::AddColumns,   PerturbationType::RemoveColumns, PerturbationType::AddTables,
        PerturbationType::RenameColumns, PerturbationType::RenameTables, PerturbationType::SplitColumns,
        PerturbationType::MergeColumns, PerturbationType::SplitTables,   PerturbationType::MergeTables,
    };
    const auto start = std::chrono::steady_clock::now();
    Outcome v{true, ""};
    std::size_t passed = 0, trials = 0;
    for (const auto type : types) {
        for (const std::uint64_t seed : {11u, 22u, 33u}) {
            const auto r = testkit::semantic_preservation(seed, type, 200);
            passed += r.passed;
            trials += r.trials;
            if (!r.ok() || r.trials < 200) {
                v.ok = false;
                v.detail += std::string(to_string(type)) + "@" + std::to_string(seed) + " " +
                            std::to_string(r.passed) + "/" + std::to_string(r.trials) + first_failure(r) + "; ";
            }
        }
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    if (elapsed >= std::chrono::minutes(5)) {
        v.ok = false;
        v.detail += "over budget; ";
    }
    v.detail += std::to_string(passed) + "/" + std::to_string(trials) + " over 9 types x 3 seeds";
    return v;
}

Outcome refusal() {
    const auto r = testkit::refusal_exactness(77, 500);
    Outcome v = from_property(r);
    std::size_t checked = 0, bad = 0;
    for (const auto& rec : read_corpus(testkit::fixture_path("corpus_eval.jsonl"))) {
        const std::string_view want = rec.ptype == "remove_tables"           ? kTableRefusal
                                      : rec.ptype == "remove_columns_in_sql" ? kColumnRefusal
                                                                             : std::string_view();
        if (want.empty()) continue;
        ++checked;
        bad += rec.gold != want;
    }
    v.ok = v.ok && bad == 0 && checked > 0;
    v.detail += "; fixture corpus " + std::to_string(checked - bad) + "/" + std::to_string(checked);
    return v;
}

Outcome metric() {
    const auto r = testkit::metric_oracle(91, 10000);
    Outcome v = from_property(r);
    v.ok = v.ok && r.trials >= 10000;
    return v;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

Outcome table_layout() {
    const auto rows = compute_stats(read_corpus(testkit::fixture_path("corpus_original.jsonl")),
                                    read_corpus(testkit::fixture_path("corpus_eval.jsonl")), 1);
    const auto lines = lines_of(render_stats(rows));
    Outcome v{true, ""};
    auto fail = [&](const std::string& why) {
        v.ok = false;
        v.detail += why + "; ";
    };

    const std::vector<std::string> header = {
        "                   |                      | Manipulated Items/Table  | Manipulated Items/Query ",
        "Perturbation Type  |  Train   Eval  Eval* |  Min   Mean Median  Max |  Min   Mean Median  Max",
    };
    if (lines.size() < 2 || lines[0] != header[0] || lines[1] != header[1]) fail("header differs");

    const std::vector<std::string> labels = {"Original",      "Add Columns",   "Remove Columns", "Remove Col in SQL",
                                             "Rename Columns", "Split Columns", "Merge Columns",  "Add Tables",
                                             "Remove Tables",  "Rename Tables", "Split Tables",   "Merge Tables"};
    std::vector<std::string> seen;
    for (const auto& line : lines) {
        const auto bar = line.find('|');
        if (bar == std::string::npos || line.rfind(' ', 0) == 0 || line.rfind("Perturbation", 0) == 0) continue;
        std::string label = line.substr(0, bar);
        label.erase(label.find_last_not_of(' ') + 1);
        seen.push_back(label);
        if (line.size() != header[1].size() || line[19] != '|' || line[42] != '|' || line[68] != '|')
            fail("misaligned row " + label);
    }
    if (seen != labels) fail("row labels differ");

    auto expect_constant = [&](const char* ptype, double value) {
        for (const auto& r : rows) {
            if (r.ptype != ptype) continue;
            if (!r.per_query || r.per_query->min != value || r.per_query->mean != value ||
                r.per_query->median != value || r.per_query->max != value)
                fail(std::string(ptype) + " per-query not constant " + std::to_string(value));
            return;
        }
        fail(std::string("missing ") + ptype);
    };
    expect_constant("remove_tables", 1);
    expect_constant("merge_tables", 2);
    for (const auto& line : lines) {
        if (line.rfind("Remove Tables", 0) == 0 && line.substr(line.rfind('|')) != "|    1      1      1    1")
            fail("Remove Tables rendering");
        if (line.rfind("Merge Tables", 0) == 0 && line.substr(line.rfind('|')) != "|    2      2      2    2")
            fail("Merge Tables rendering");
    }
    v.detail += std::to_string(seen.size()) + " rows; Remove Tables (1,1,1,1); Merge Tables (2,2,2,2)";
    return v;
}

Outcome round_trip() {
    const auto r = testkit::rename_round_trip(5, 500);
    Outcome v = from_property(r);
    v.ok = v.ok && r.trials >= 500;
    return v;
}

Outcome rejoin() {
    const auto r = testkit::split_rejoin(6, 200);
    Outcome v = from_property(r);
    v.ok = v.ok && r.trials >= 200;
    return v;
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "schemashift_acceptance";
    const auto a = testkit::run_pipeline(root / "first", 3);
    const auto b = testkit::run_pipeline(root / "second", 3);
    Outcome v{a == b && !a.empty(), std::to_string(a.size()) + " files"};
    for (const auto& [name, bytes] : a)
        if (!b.count(name) || b.at(name) != bytes) v.detail += "; differs: " + name;
    std::filesystem::remove_all(root);
    return v;
}

Outcome cross_check() {
    const auto r = testkit::engine_cross_check(8, 100);
    Outcome v = from_property(r);
    v.ok = v.ok && r.trials >= 100;
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"integrity totality", integrity},
        {"semantic preservation", preservation},
        {"refusal exactness", refusal},
        {"metric oracle", metric},
        {"stats table layout", table_layout},
        {"rename round trip", round_trip},
        {"split/rejoin identity", rejoin},
        {"end-to-end determinism", determinism},
        {"sqlite cross-check", cross_check},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %-24s %s (%lld ms)\n", v.ok ? "PASS" : "FAIL", name, v.detail.c_str(),
                    static_cast<long long>(ms));
        failed += !v.ok;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
