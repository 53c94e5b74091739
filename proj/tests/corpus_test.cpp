#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "schemashift/corpus.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/report.hpp"

using namespace schemashift;
using testkit::fixture_path;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "schemashift_corpus_test";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<Instance> fixture_instances() {
    std::vector<Instance> out;
    for (const auto& r : read_corpus(fixture_path("corpus_original.jsonl"))) out.push_back(to_instance(r));
    return out;
}

std::vector<PerturbationType> all_types() {
    return {std::begin(kAllPerturbationTypes), std::end(kAllPerturbationTypes)};
}

const StatsRow& row(const std::vector<StatsRow>& rows, const std::string& ptype) {
    for (const auto& r : rows)
        if (r.ptype == ptype) return r;
    throw std::runtime_error("no row " + ptype);
}

}  // namespace

TEST(Ingest, MiniManifest) {
    const auto res = ingest_bird(fixture_path("mini_questions.json"), fixture_path("mini_tables.json"));
    EXPECT_EQ(res.instances.size(), 16u);
    ASSERT_EQ(res.rejects.size(), 1u);
    EXPECT_EQ(res.rejects[0].instance_id, "q000009");
    EXPECT_FALSE(res.rejects[0].reason.empty());
    const Instance& second = res.instances[1];
    EXPECT_TRUE(second.schema.has_table("patient"));
    EXPECT_TRUE(second.schema.has_table("diagnosis"));
    for (const auto& in : res.instances) EXPECT_TRUE(validate(in.schema).empty()) << in.instance_id;
}

TEST(Ingest, DepthZeroIsReferencedTablesOnly) {
    const auto res = ingest_bird(fixture_path("mini_questions.json"), fixture_path("mini_tables.json"), 0);
    const Instance& first = res.instances[0];
    ASSERT_EQ(first.schema.tables.size(), 1u);
    EXPECT_EQ(first.schema.tables[0].name, "patient");
    const auto deeper = ingest_bird(fixture_path("mini_questions.json"), fixture_path("mini_tables.json"), 1);
    EXPECT_GT(deeper.instances[0].schema.tables.size(), 1u);
}

TEST(Ingest, MissingFileIsFormatError) {
    EXPECT_THROW(ingest_bird(fixture_path("nope.json"), fixture_path("mini_tables.json")), FormatError);
}

TEST(CorpusIo, RoundTrip) {
    const auto records = read_corpus(fixture_path("corpus_eval.jsonl"));
    const fs::path path = temp_file("round.jsonl");
    write_corpus(path, records);
    EXPECT_EQ(read_corpus(path), records);
    EXPECT_EQ(testkit::slurp(path.string()), testkit::slurp(fixture_path("corpus_eval.jsonl")));
}

TEST(CorpusIo, BadLineIsReported) {
    const fs::path path = temp_file("bad.jsonl");
    {
        std::ofstream out(path);
        out << testkit::slurp(fixture_path("corpus_original.jsonl")).substr(0, 10) << "\n";
    }
    try {
        read_corpus(path);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.record(), 1u);
    }
}

TEST(CorpusIo, FixtureRecordsAreValid) {
    for (const auto& r : read_corpus(fixture_path("corpus_eval.jsonl")))
        EXPECT_TRUE(check_record(r).empty()) << r.instance_id << " " << r.ptype;
}

TEST(RunPerturb, AllTypesOnFixture) {
    const auto instances = fixture_instances();
    MockSynthesizer mock(3);
    const SchemaPool pool = load_schemas(fixture_path("mini_tables.json"));
    const auto out = run_perturb(instances, all_types(), 3, mock, pool);
    EXPECT_EQ(out.records.size() + out.skips.size(), instances.size() * all_types().size());
    for (const auto& r : out.records) {
        EXPECT_TRUE(check_record(r).empty()) << r.instance_id << " " << r.ptype;
        const auto type = parse_perturbation_type(r.ptype);
        ASSERT_TRUE(type);
        EXPECT_EQ(is_refusal_type(*type), parse_sentinel(r.gold).has_value()) << r.instance_id << " " << r.ptype;
    }
    for (const auto& s : out.skips) EXPECT_FALSE(s.reason.empty());
    EXPECT_EQ(out.records, read_corpus(fixture_path("corpus_eval.jsonl")));
}

TEST(RunPerturb, ThreadCountDoesNotMatter) {
    const auto instances = fixture_instances();
    const SchemaPool pool = load_schemas(fixture_path("mini_tables.json"));
    MockSynthesizer a(3), b(3);
    const auto one = run_perturb(instances, all_types(), 9, a, pool, {}, 1);
    const auto many = run_perturb(instances, all_types(), 9, b, pool, {}, 4);
    EXPECT_EQ(one.records, many.records);
    EXPECT_EQ(one.skips, many.skips);
}

TEST(RunPerturb, RemoveTablesOnSingleTables) {
    std::vector<Instance> singles;
    for (const auto& in : fixture_instances())
        if (in.schema.tables.size() == 1) singles.push_back(in);
    Instance extra = testkit::clinic_instance("SELECT city FROM patient", {"patient"});
    singles.push_back(extra);
    MockSynthesizer mock(3);
    const auto out = run_perturb(singles, {PerturbationType::RemoveTables}, 3, mock, {});
    EXPECT_TRUE(out.skips.empty());
    ASSERT_EQ(out.records.size(), singles.size());
    for (const auto& r : out.records) EXPECT_EQ(r.gold, kTableRefusal);
}

TEST(RunPerturb, NoTypesNoOutput) {
    MockSynthesizer mock(3);
    const auto out = run_perturb(fixture_instances(), {}, 3, mock, {});
    EXPECT_TRUE(out.records.empty());
    EXPECT_TRUE(out.skips.empty());
}

TEST(TrainingMix, CountsAndDeterminism) {
    const auto originals = read_corpus(fixture_path("corpus_original.jsonl"));
    const auto eval = read_corpus(fixture_path("corpus_eval.jsonl"));
    const std::vector<CorpusRecord> base(originals.begin(), originals.begin() + 2);
    std::vector<CorpusRecord> renamed, removed;
    for (const auto& r : eval) {
        if (r.ptype == "rename_tables" && renamed.size() < 2) renamed.push_back(r);
        if (r.ptype == "remove_tables" && removed.size() < 2) removed.push_back(r);
    }
    const auto mix = emit_training_mix(base, {renamed, removed}, 11);
    EXPECT_EQ(mix.size(), 6u);
    EXPECT_EQ(mix, emit_training_mix(base, {renamed, removed}, 11));
    EXPECT_TRUE(std::is_permutation(mix.begin(), mix.end(), emit_training_mix(base, {renamed, removed}, 12).begin()));

    const auto in_scope = emit_training_mix(base, {renamed, removed}, 11, false);
    EXPECT_EQ(in_scope.size(), 4u);
    for (const auto& r : in_scope) EXPECT_NE(r.ptype, "remove_tables");
}

TEST(Stats, FixtureLayout) {
    const auto rows = compute_stats(read_corpus(fixture_path("corpus_original.jsonl")),
                                    read_corpus(fixture_path("corpus_eval.jsonl")), 1);
    EXPECT_EQ(rows.front().ptype, "original");
    const Summary rt = *row(rows, "remove_tables").per_query;
    EXPECT_EQ(rt.min, 1);
    EXPECT_EQ(rt.max, 1);
    EXPECT_EQ(rt.mean, 1);
    EXPECT_FALSE(row(rows, "remove_tables").eval_exec_count);
    EXPECT_FALSE(row(rows, "rename_tables").per_table);
    for (const auto& r : rows) {
        if (!r.per_query) continue;
        EXPECT_LE(r.per_query->min, r.per_query->median);
        EXPECT_LE(r.per_query->median, r.per_query->max);
        if (r.eval_exec_count) {
            EXPECT_LE(*r.eval_exec_count, r.eval_count);
        }
    }
    const std::string text = render_stats(rows);
    EXPECT_NE(text.find("Manipulated Items/Table"), std::string::npos);
    EXPECT_NE(text.find("Remove Tables      |      0     16      - |    -      -      -    - |    1      1      1    1"),
              std::string::npos)
        << text;
}

TEST(Stats, ConstantAddTables) {
    auto records = read_corpus(fixture_path("corpus_original.jsonl"));
    records.resize(3);
    for (auto& r : records) {
        EvolutionRecord ev;
        ev.ptype = PerturbationType::AddTables;
        ev.manipulated_count = 2;
        r.ptype = "add_tables";
        r.evolution = ev;
    }
    const auto rows = compute_stats({}, records, 1);
    ASSERT_EQ(rows.size(), 1u);
    const Summary s = *rows[0].per_query;
    EXPECT_EQ(s.min, 2);
    EXPECT_EQ(s.mean, 2);
    EXPECT_EQ(s.median, 2);
    EXPECT_EQ(s.max, 2);
    EXPECT_EQ(rows[0].eval_count, 3u);
}

TEST(Stats, EmptyCorpus) {
    const auto rows = compute_stats({}, {}, 1);
    EXPECT_TRUE(rows.empty());
    EXPECT_EQ(render_stats(rows).find("Add Columns"), std::string::npos);
}

TEST(Stats, SummaryOfEvenCount) {
    const auto s = summarize({4, 1, 3, 2});
    ASSERT_TRUE(s);
    EXPECT_EQ(s->median, 2.5);
    EXPECT_EQ(s->mean, 2.5);
    EXPECT_FALSE(summarize({}));
}

TEST(Score, IdentityPredictions) {
    const auto corpus = read_corpus(fixture_path("corpus_eval.jsonl"));
    Predictions preds;
    for (const auto& r : corpus) preds[{r.instance_id, r.ptype}] = r.gold;
    const auto report = aggregate(score_records(corpus, preds, 1));
    for (const auto& t : report.per_type) {
        if (t.table_f1) {
            EXPECT_DOUBLE_EQ(*t.table_f1, 1.0) << t.ptype;
        }
        if (t.column_f1) {
            EXPECT_DOUBLE_EQ(*t.column_f1, 1.0) << t.ptype;
        }
        if (t.exec_accuracy) {
            EXPECT_DOUBLE_EQ(*t.exec_accuracy, 1.0) << t.ptype;
        }
        if (t.refusal_tp) {
            EXPECT_DOUBLE_EQ(*t.refusal_tp, 1.0) << t.ptype;
        }
        if (t.refusal_fp) {
            EXPECT_DOUBLE_EQ(*t.refusal_fp, 0.0) << t.ptype;
        }
        EXPECT_EQ(t.parse_failures, 0u);
    }
    EXPECT_GT(report.macro.exec_pool, 0u);
    EXPECT_GT(report.macro.sentinel_pool, 0u);
}

TEST(Score, EmptyPredictionsFile) {
    const fs::path path = temp_file("empty.jsonl");
    std::ofstream(path).close();
    const auto corpus = read_corpus(fixture_path("corpus_eval.jsonl"));
    const auto report = aggregate(score_records(corpus, read_predictions(path), 1));
    EXPECT_EQ(report.macro.parse_failures, corpus.size());
    for (const auto& t : report.per_type) {
        if (t.table_f1) {
            EXPECT_EQ(*t.table_f1, 0.0);
        }
        if (t.column_f1) {
            EXPECT_EQ(*t.column_f1, 0.0);
        }
        if (t.exec_accuracy) {
            EXPECT_EQ(*t.exec_accuracy, 0.0);
        }
        if (t.refusal_tp) {
            EXPECT_EQ(*t.refusal_tp, 0.0);
        }
    }
}

TEST(Score, MacroMatchesRecomputation) {
    const auto corpus = read_corpus(fixture_path("corpus_eval.jsonl"));
    Predictions preds;
    std::size_t i = 0;
    for (const auto& r : corpus) {
        // Every third prediction is a fixed wrong query.
        preds[{r.instance_id, r.ptype}] = (i++ % 3 == 0) ? "SELECT 1" : r.gold;
    }
    const auto report = aggregate(score_records(corpus, preds, 1));
    const std::string jsonl = report_jsonl(report);
    std::istringstream lines(jsonl);
    std::string line;
    double sum = 0;
    int n = 0;
    double macro = -1;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        if (j["ptype"] == "MacroAvg") {
            macro = j["table_f1"].get<double>();
            continue;
        }
        if (j["table_f1"].is_null()) continue;
        sum += j["table_f1"].get<double>();
        ++n;
    }
    ASSERT_GT(n, 0);
    EXPECT_NEAR(macro, sum / n, 1e-12);
}

TEST(Score, PredictionFormats) {
    const fs::path lines = temp_file("preds.jsonl");
    std::ofstream(lines) << R"({"instance_id":"a","prediction":"SELECT 1"})" << "\n"
                         << R"({"instance_id":"a","ptype":"add_tables","prediction":"SELECT 2"})" << "\n";
    const auto p = read_predictions(lines);
    EXPECT_EQ((p.at({"a", ""})), "SELECT 1");
    EXPECT_EQ((p.at({"a", "add_tables"})), "SELECT 2");

    const fs::path object = temp_file("preds.json");
    std::ofstream(object) << R"({"a": "SELECT 3", "b": "SELECT 4"})";
    const auto q = read_predictions(object);
    EXPECT_EQ(q.size(), 2u);
    EXPECT_EQ((q.at({"b", ""})), "SELECT 4");
}
