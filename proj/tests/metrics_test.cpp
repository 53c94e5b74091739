#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "properties.hpp"
#include "schemashift/ddl.hpp"
#include "schemashift/instance.hpp"
#include "schemashift/metrics.hpp"

using namespace schemashift;
using testkit::clinic;

namespace {

constexpr double kTol = 1e-9;

void expect_prf(const Prf& got, double p, double r, double f) {
    EXPECT_NEAR(got.precision, p, kTol);
    EXPECT_NEAR(got.recall, r, kTol);
    EXPECT_NEAR(got.f1, f, kTol);
}

InstanceScore sql_score(const std::string& ptype, double f1) {
    InstanceScore s;
    s.ptype = ptype;
    s.table = Prf{f1, f1, f1};
    s.column = Prf{f1, f1, f1};
    return s;
}

}  // namespace

TEST(TableMatch, PartialRecall) {
    const auto m = table_match_f1("SELECT full_name FROM patient", testkit::kClinicGold, clinic());
    EXPECT_FALSE(m.parse_failure);
    expect_prf(m.score, 1.0, 0.5, 2.0 / 3.0);
    EXPECT_NEAR(m.score.f1, 0.6667, 5e-5);
}

TEST(TableMatch, IdentityAndDisjoint) {
    expect_prf(table_match_f1(testkit::kClinicGold, testkit::kClinicGold, clinic()).score, 1, 1, 1);
    expect_prf(table_match_f1("SELECT amount FROM billing", "SELECT city FROM patient", clinic()).score, 0, 0, 0);
}

TEST(TableMatch, UnparseablePredictionScoresZero) {
    const auto m = table_match_f1("SELEC nonsense", "SELECT city FROM patient", clinic());
    EXPECT_TRUE(m.parse_failure);
    expect_prf(m.score, 0, 0, 0);
    EXPECT_TRUE(table_match_f1("SELECT city FROM prescription", "SELECT city FROM patient", clinic()).parse_failure);
}

TEST(ColumnMatch, PartialRecall) {
    const auto exact = column_match_f1(
        "SELECT patient_id FROM patient",
        "SELECT patient.patient_id, diagnosis.severity FROM patient, diagnosis", clinic());
    expect_prf(exact.score, 1.0, 0.5, 2.0 / 3.0);
}

TEST(ColumnMatch, StarAgainstStar) {
    expect_prf(column_match_f1("SELECT * FROM patient", "SELECT * FROM patient", clinic()).score, 1, 1, 1);
}

TEST(ColumnMatch, PairsAreTableQualified) {
    expect_prf(column_match_f1("SELECT patient_id FROM diagnosis", "SELECT patient_id FROM patient", clinic()).score,
               0, 0, 0);
}

TEST(ColumnMatch, AliasInvariance) {
    const std::string gold = "SELECT T1.full_name FROM patient AS T1 JOIN diagnosis AS T2 ON T1.patient_id = T2.patient_id";
    const std::string pred = "SELECT p.full_name FROM patient AS p JOIN diagnosis AS d ON p.patient_id = d.patient_id";
    expect_prf(column_match_f1(pred, gold, clinic()).score, 1, 1, 1);
    expect_prf(table_match_f1(pred, gold, clinic()).score, 1, 1, 1);
}

TEST(SetPrf, Monotonicity) {
    const std::set<std::string> gold{"a", "b", "c"};
    std::set<std::string> pred{"a", "x"};
    const Prf base = set_prf(pred, gold);
    pred.insert("b");
    EXPECT_GE(set_prf(pred, gold).recall, base.recall);
    pred = {"a", "x", "y"};
    EXPECT_LE(set_prf(pred, gold).precision, base.precision);
}

TEST(SetPrf, OracleProperty) {
    const auto r = testkit::metric_oracle(5, 2000);
    EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures.front());
}

TEST(Execution, Verdicts) {
    Database db;
    db.schema = parse_ddl("CREATE TABLE visit (vid INTEGER PRIMARY KEY, city TEXT);");
    db.rows["visit"] = {{Value(1), Value("Oslo")}, {Value(2), Value("Oslo")}, {Value(3), Value("Rome")}};
    const std::string gold = "SELECT COUNT(DISTINCT city) FROM visit";
    EXPECT_EQ(execution_accuracy(gold, gold, db), Verdict::Correct);
    EXPECT_EQ(execution_accuracy("SELECT COUNT(city) FROM visit", gold, db), Verdict::Incorrect);
    EXPECT_EQ(execution_accuracy("SELECT COUNT(*) FROM patient", gold, db), Verdict::Error);
}

TEST(Execution, OrderMattersOnlyWithOrderBy) {
    Database db;
    db.schema = parse_ddl("CREATE TABLE visit (vid INTEGER PRIMARY KEY, city TEXT);");
    db.rows["visit"] = {{Value(1), Value("Oslo")}, {Value(2), Value("Rome")}};
    EXPECT_EQ(execution_accuracy("SELECT city FROM visit ORDER BY vid DESC", "SELECT city FROM visit", db),
              Verdict::Correct);
    EXPECT_EQ(execution_accuracy("SELECT city FROM visit ORDER BY vid DESC", "SELECT city FROM visit ORDER BY vid", db),
              Verdict::Incorrect);
}

TEST(Refusal, Detection) {
    EXPECT_TRUE(is_refusal(std::string("Sure. ") + std::string(kTableRefusal)));
    EXPECT_TRUE(is_refusal(kColumnRefusal));
    EXPECT_FALSE(is_refusal("SELECT 1"));
}

TEST(Refusal, Rates) {
    std::vector<std::string> preds(100, "SELECT 1");
    for (int i = 0; i < 84; ++i) preds[i] = std::string(kTableRefusal);
    const auto tp = refusal_rates(preds, std::vector<bool>(100, true));
    EXPECT_NEAR(*tp.tp, 0.84, kTol);
    EXPECT_FALSE(tp.fp);

    std::vector<std::string> sql(10, "SELECT 1");
    sql[3] = std::string(kColumnRefusal);
    const auto fp = refusal_rates(sql, std::vector<bool>(10, false));
    EXPECT_NEAR(*fp.fp, 0.1, kTol);
    EXPECT_FALSE(fp.tp);

    const auto none = refusal_rates(std::vector<std::string>(4, "SELECT 1"), std::vector<bool>(4, false));
    EXPECT_EQ(*none.fp, 0.0);
    EXPECT_FALSE(none.tp);
}

TEST(Aggregate, MacroIsUnweightedMean) {
    const auto report = aggregate({sql_score("rename_tables", 0.8), sql_score("split_tables", 0.6),
                                   sql_score("split_tables", 0.6), sql_score("split_tables", 0.6)});
    ASSERT_EQ(report.per_type.size(), 2u);
    EXPECT_EQ(report.per_type[0].ptype, "rename_tables");
    EXPECT_NEAR(*report.macro.table_f1, 0.7, kTol);
    EXPECT_NEAR(*report.macro.column_f1, 0.7, kTol);
    EXPECT_FALSE(report.macro.exec_accuracy);
    EXPECT_EQ(report.macro.instances, 4u);
}

TEST(Aggregate, SingleTypeMacroEqualsType) {
    const auto report = aggregate({sql_score("add_columns", 0.25), sql_score("add_columns", 0.75)});
    EXPECT_EQ(report.macro.table_f1, report.per_type[0].table_f1);
    EXPECT_NEAR(*report.macro.table_f1, 0.5, kTol);
}

TEST(Aggregate, SentinelsStayOutOfF1Pool) {
    InstanceScore refused;
    refused.ptype = "remove_tables";
    refused.gold_is_sentinel = true;
    refused.refused = true;
    InstanceScore wrong = refused;
    wrong.refused = false;
    auto exec = sql_score("remove_tables", 1.0);
    exec.exec = Verdict::Error;
    const auto report = aggregate({refused, wrong, exec});
    const TypeReport& t = report.per_type[0];
    EXPECT_EQ(t.f1_pool, 1u);
    EXPECT_EQ(t.sentinel_pool, 2u);
    EXPECT_NEAR(*t.refusal_tp, 0.5, kTol);
    EXPECT_NEAR(*t.exec_accuracy, 0.0, kTol);
    EXPECT_NEAR(*t.refusal_fp, 0.0, kTol);
}

TEST(Aggregate, Reports) {
    const auto report = aggregate({sql_score("add_columns", 1.0)});
    const std::string jsonl = report_jsonl(report);
    EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 2);
    EXPECT_NE(jsonl.find("\"MacroAvg\""), std::string::npos);
    EXPECT_NE(report_text(report).find("MacroAvg"), std::string::npos);
}
