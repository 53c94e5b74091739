#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "pipeline.hpp"
#include "schemashift/corpus.hpp"

using namespace schemashift;
using testkit::fixture_path;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "schemashift_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Cli, HelpAndUnknownVerb) {
    EXPECT_EQ(run({"--help"}).code, cli::kOk);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kInvalidConfig);
}

TEST(Cli, IngestWritesRejects) {
    const fs::path dir = scratch("ingest");
    const auto r = run({"--out", (dir / "c.jsonl").string(), "ingest", "--questions",
                        fixture_path("mini_questions.json"), "--schemas", fixture_path("mini_tables.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_EQ(read_corpus(dir / "c.jsonl").size(), 16u);
    EXPECT_NE(testkit::slurp((dir / "c.rejects.jsonl").string()).find("q000009"), std::string::npos);
    EXPECT_EQ(read_corpus(dir / "c.jsonl"), read_corpus(fixture_path("corpus_original.jsonl")));
}

TEST(Cli, IngestMissingQuestionsFile) {
    const auto r = run({"--out", "x.jsonl", "ingest", "--questions", "/nonexistent.json", "--schemas",
                        fixture_path("mini_tables.json")});
    EXPECT_EQ(r.code, cli::kInvalidConfig);
}

TEST(Cli, PerturbMatchesFixtureCorpus) {
    const fs::path dir = scratch("perturb");
    const auto r = run({"--seed", "3", "--types", "all", "--out", (dir / "e.jsonl").string(), "perturb", "--corpus",
                        fixture_path("corpus_original.jsonl"), "--schemas", fixture_path("mini_tables.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_EQ(testkit::slurp((dir / "e.jsonl").string()), testkit::slurp(fixture_path("corpus_eval.jsonl")));
    EXPECT_EQ(read_skips(dir / "e.skips.jsonl").size(), 16u * 11u - 167u);
}

TEST(Cli, PerturbRejectsBadConfig) {
    const fs::path dir = scratch("perturb_bad");
    const std::string out = (dir / "e.jsonl").string();
    EXPECT_EQ(run({"--types", "shuffle_rows", "--out", out, "perturb", "--corpus", fixture_path("corpus_original.jsonl")})
                  .code,
              cli::kInvalidConfig);
    EXPECT_EQ(run({"--backend", "oracle", "--out", out, "perturb", "--corpus", fixture_path("corpus_original.jsonl")})
                  .code,
              cli::kInvalidConfig);
    EXPECT_EQ(run({"--types", "all", "--out", out, "perturb", "--corpus", fixture_path("corpus_eval.jsonl")}).code,
              cli::kInvalidConfig);
    EXPECT_EQ(run({"--types", "all", "perturb", "--corpus", fixture_path("corpus_original.jsonl")}).code,
              cli::kInvalidConfig);
}

TEST(Cli, StatsToStdout) {
    const auto r = run({"stats", "--train", fixture_path("corpus_original.jsonl"), "--eval",
                        fixture_path("corpus_eval.jsonl")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_NE(r.out.find("Merge Tables"), std::string::npos);
    EXPECT_EQ(run({"stats"}).code, cli::kInvalidConfig);
}

TEST(Cli, EmitTrainDropsOos) {
    const fs::path dir = scratch("emit");
    const auto r = run({"--out", (dir / "t.jsonl").string(), "emit-train", "--original",
                        fixture_path("corpus_original.jsonl"), "--perturbed", fixture_path("corpus_eval.jsonl"),
                        "--no-oos"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    for (const auto& rec : read_corpus(dir / "t.jsonl")) {
        EXPECT_NE(rec.ptype, "remove_tables");
        EXPECT_NE(rec.ptype, "remove_columns_in_sql");
    }
}

TEST(Cli, PopulateWritesDumps) {
    const fs::path dir = scratch("populate");
    const auto r = run({"--out", dir.string(), "populate", "--corpus", fixture_path("corpus_original.jsonl"), "--rows",
                        "5"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    const std::string dump = testkit::slurp((dir / "q000000_original.sql").string());
    EXPECT_NE(dump.find("CREATE TABLE patient"), std::string::npos);
    EXPECT_NE(dump.find("INSERT INTO"), std::string::npos);
}

TEST(Cli, ScoreWritesReports) {
    const fs::path dir = scratch("score");
    const fs::path preds = dir / "p.json";
    std::ofstream(preds) << R"({"q000000": "SELECT city, COUNT(*) FROM patient GROUP BY city"})";
    const auto r = run({"--out", (dir / "s.jsonl").string(), "score", "--corpus",
                        fixture_path("corpus_original.jsonl"), "--predictions", preds.string()});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_NE(testkit::slurp((dir / "s.jsonl").string()).find("MacroAvg"), std::string::npos);
    EXPECT_NE(testkit::slurp((dir / "s.txt").string()).find("original"), std::string::npos);

    std::ofstream(dir / "broken.jsonl") << "{not json\n";
    EXPECT_EQ(run({"score", "--corpus", fixture_path("corpus_original.jsonl"), "--predictions",
                   (dir / "broken.jsonl").string()})
                  .code,
              cli::kIoFailure);
}

TEST(Cli, ValidateFlagsBadLines) {
    const fs::path dir = scratch("validate");
    EXPECT_EQ(run({"validate", "--corpus", fixture_path("corpus_eval.jsonl")}).code, cli::kOk);
    std::ofstream(dir / "bad.jsonl") << testkit::slurp(fixture_path("corpus_original.jsonl")) << "{\"x\": 1}\n";
    const auto r = run({"validate", "--corpus", (dir / "bad.jsonl").string()});
    EXPECT_EQ(r.code, cli::kIoFailure);
    EXPECT_NE(r.out.find(":17:"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("16 valid, 1 invalid"), std::string::npos) << r.out;
}

TEST(Cli, PipelineIsDeterministic) {
    const fs::path root = fs::temp_directory_path() / "schemashift_cli_test";
    const auto a = testkit::run_pipeline(root / "run_a", 5);
    const auto b = testkit::run_pipeline(root / "run_b", 5);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.size(), 10u);
}

TEST(Cli, RemoteBackendWithoutKey) {
    const fs::path dir = scratch("remote");
    const auto r = run({"--backend", "remote", "--key-env", "SCHEMASHIFT_TEST_UNSET_KEY", "--endpoint",
                        "http://127.0.0.1:9", "--types", "rename_tables", "--out", (dir / "e.jsonl").string(),
                        "perturb", "--corpus", fixture_path("corpus_original.jsonl")});
    EXPECT_EQ(r.code, cli::kInvalidConfig);
    EXPECT_NE(r.err.find("SCHEMASHIFT_TEST_UNSET_KEY"), std::string::npos) << r.err;
}
