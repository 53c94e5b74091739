#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "properties.hpp"
#include "schemashift/database.hpp"
#include "schemashift/ddl.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/perturb.hpp"
#include "schemashift/random.hpp"
#include "schemashift/sql_refs.hpp"

using namespace schemashift;
using testkit::clinic;
using testkit::clinic_instance;
using testkit::kClinicGold;

namespace {

const std::string& gold(const Instance& in) { return std::get<std::string>(in.gold); }

// Always answers with the same proposal text.
class FixedSynth : public Synthesizer {
public:
    explicit FixedSynth(std::string raw) : raw_(std::move(raw)) {}
    SynthResponse propose(const SynthRequest& r) override {
        ++calls;
        return parse_proposal(r.kind, raw_);
    }
    int calls = 0;

private:
    std::string raw_;
};

void expect_preserved(const PerturbedInstance& p, std::uint64_t seed = 1) {
    const Database db = populate(p.base.schema, {25, seed});
    const Database migrated = migrate(db, p.record, seed);
    EXPECT_TRUE(results_match(execute(gold(p.base), db), execute(gold(p.evolved), migrated)))
        << gold(p.base) << "\n=> " << gold(p.evolved);
}

Instance person_instance(const std::string& sql) {
    Instance in;
    in.instance_id = "p1";
    in.db_id = "people";
    in.nlq = "Who?";
    in.schema = parse_ddl(
        "CREATE TABLE person (id INTEGER PRIMARY KEY, first_name TEXT, last_name TEXT, code TEXT);\n"
        "CREATE TABLE visit (vid INTEGER PRIMARY KEY, person_id INTEGER, given_name TEXT, FOREIGN KEY (person_id) "
        "REFERENCES person (id));");
    in.gold = sql;
    return in;
}

}  // namespace

TEST(AddColumns, OneColumnOnPatient) {
    MockSynthesizer mock(42);
    auto rng = make_stream(42, "t");
    const Instance in = clinic_instance("SELECT full_name FROM patient WHERE city = 'Oslo'", {"patient"});
    const auto p = perturb_add_columns(in, {1, 1}, mock, rng);
    EXPECT_EQ(p.evolved.schema.find_table("patient")->columns.size(), 5u);
    EXPECT_EQ(gold(p.evolved), gold(in));
    EXPECT_EQ(p.evolved.nlq, in.nlq);
    EXPECT_FALSE(p.needs_review);
    EXPECT_EQ(p.record.manipulated_count, 1);
}

TEST(AddColumns, EveryRelevantTableGrows) {
    MockSynthesizer mock(42);
    auto rng = make_stream(42, "t");
    const Instance in = clinic_instance(kClinicGold);
    const auto p = perturb_add_columns(in, {1, 1}, mock, rng);
    EXPECT_EQ(p.evolved.schema.find_table("patient")->columns.size(), 5u);
    EXPECT_EQ(p.evolved.schema.find_table("diagnosis")->columns.size(), 5u);
    EXPECT_EQ(p.evolved.schema.foreign_keys, in.schema.foreign_keys);
    EXPECT_EQ(gold(p.evolved), kClinicGold);
    ASSERT_EQ(p.record.manipulated_per_table.size(), 2u);
}

TEST(AddColumns, ZeroRangeIsIdentity) {
    MockSynthesizer mock(1);
    auto rng = make_stream(1, "t");
    const Instance in = clinic_instance(kClinicGold);
    const auto p = perturb_add_columns(in, {0, 0}, mock, rng);
    EXPECT_EQ(p.evolved, in);
    EXPECT_EQ(p.record.manipulated_count, 0);
}

TEST(AddColumns, CountClampedToTableWidth) {
    MockSynthesizer mock(1);
    auto rng = make_stream(1, "t");
    const auto p = perturb_add_columns(clinic_instance("SELECT city FROM patient", {"patient"}), {50, 50}, mock, rng);
    EXPECT_EQ(p.record.manipulated_count, 4);
}

TEST(AddColumns, CollidingProposalsExhaustBudget) {
    FixedSynth synth("```proposal\ncolumn: city TEXT\ncolumn: FULL_NAME TEXT\n```");
    auto rng = make_stream(1, "t");
    EXPECT_THROW(perturb_add_columns(clinic_instance("SELECT city FROM patient", {"patient"}), {1, 1}, synth, rng),
                 SynthesisExhausted);
    EXPECT_EQ(synth.calls, kSynthAttempts);
}

TEST(AddColumns, StarProjectionNeedsReview) {
    MockSynthesizer mock(1);
    auto rng = make_stream(1, "t");
    EXPECT_TRUE(perturb_add_columns(clinic_instance("SELECT * FROM patient", {"patient"}), {1, 1}, mock, rng)
                    .needs_review);
}

TEST(RemoveColumns, RemovesCity) {
    auto rng = make_stream(1, "t");
    const Instance in = clinic_instance("SELECT full_name, birth_date FROM patient", {"patient"});
    const auto p = perturb_remove_columns(in, {1, 1}, rng);
    EXPECT_FALSE(p.evolved.schema.find_table("patient")->has_column("city"));
    EXPECT_EQ(gold(p.evolved), gold(in));
    expect_preserved(p);
}

TEST(RemoveColumns, AllReferencedIsIneligible) {
    auto rng = make_stream(1, "t");
    EXPECT_THROW(
        perturb_remove_columns(clinic_instance("SELECT full_name, birth_date, city FROM patient", {"patient"}), {1, 1},
                               rng),
        NoEligibleColumns);
}

TEST(RemoveColumns, ForeignKeyChildCascades) {
    auto rng = make_stream(1, "t");
    const auto p = perturb_remove_columns(clinic_instance("SELECT severity, code FROM diagnosis"), {4, 4}, rng);
    EXPECT_FALSE(p.evolved.schema.find_table("diagnosis")->has_column("patient_id"));
    EXPECT_TRUE(p.evolved.schema.foreign_keys.empty());
    EXPECT_TRUE(validate(p.evolved.schema).empty());
}

TEST(RemoveColumnsInSql, SeverityBecomesSentinel) {
    auto rng = make_stream(1, "t");
    const auto p = perturb_remove_columns_in_sql(clinic_instance("SELECT severity FROM diagnosis"), {2, 2}, rng);
    EXPECT_FALSE(p.evolved.schema.find_table("diagnosis")->has_column("severity"));
    ASSERT_FALSE(gold_is_sql(p.evolved.gold));
    EXPECT_EQ(gold_text(p.evolved.gold), kColumnRefusal);
    EXPECT_EQ(p.record.manipulated_count, 1);
    ASSERT_EQ(p.record.removed.size(), 1u);
    EXPECT_EQ(p.record.removed[0].column, "severity");
}

TEST(RemoveColumnsInSql, StarHasNoEligibleColumns) {
    auto rng = make_stream(1, "t");
    EXPECT_THROW(perturb_remove_columns_in_sql(clinic_instance("SELECT * FROM patient", {"patient"}), {1, 1}, rng),
                 NoEligibleColumns);
}

TEST(RenameColumns, ForeignKeyAndGoldFollow) {
    MockSynthesizer mock(3);
    const Instance in = clinic_instance(kClinicGold);
    bool seen = false;
    for (int seed = 0; seed < 200 && !seen; ++seed) {
        auto rng = make_stream(seed, "rename");
        const auto p = perturb_rename_columns(in, {1, 6}, mock, rng);
        const auto target = p.record.renames.column_target("patient", "patient_id");
        const SqlRefs before = extract_refs(kClinicGold, in.schema);
        const SqlRefs after = extract_refs(gold(p.evolved), p.evolved.schema);
        EXPECT_EQ(after.tables, before.tables);
        EXPECT_EQ(after.columns.size(), before.columns.size());
        if (!target) continue;
        seen = true;
        bool fk = false;
        for (const auto& f : p.evolved.schema.foreign_keys) fk |= f.parent_table == "patient" && f.parent_column == *target;
        EXPECT_TRUE(fk);
        EXPECT_NE(gold(p.evolved).find("T1." + *target), std::string::npos) << gold(p.evolved);
        expect_preserved(p);
    }
    EXPECT_TRUE(seen);
}

TEST(RenameColumns, UnreferencedRenameKeepsGold) {
    MockSynthesizer mock(3);
    const std::string sql = "SELECT full_name FROM patient";
    const Instance in = clinic_instance(sql, {"patient"});
    bool seen = false;
    for (int seed = 0; seed < 100 && !seen; ++seed) {
        auto rng = make_stream(seed, "rename");
        const auto p = perturb_rename_columns(in, {1, 1}, mock, rng);
        if (p.record.renames.column_target("patient", "full_name")) continue;
        seen = true;
        EXPECT_EQ(gold(p.evolved), sql);
    }
    EXPECT_TRUE(seen);
}

TEST(RenameColumns, ExistingNameExhaustsBudget) {
    FixedSynth synth("```proposal\nname: full_name\n```");
    auto rng = make_stream(1, "t");
    EXPECT_THROW(perturb_rename_columns(clinic_instance("SELECT city FROM patient", {"patient"}), {1, 1}, synth, rng),
                 SynthesisExhausted);
}

TEST(SplitColumns, UnreferencedNameSplit) {
    auto rng = make_stream(1, "t");
    const Instance in = clinic_instance("SELECT city FROM patient", {"patient"});
    const auto p = perturb_split_columns(in, {CompositeKind::Name}, {1, 1}, rng);
    const Table& t = *p.evolved.schema.find_table("patient");
    EXPECT_TRUE(t.has_column("first_name"));
    EXPECT_TRUE(t.has_column("last_name"));
    EXPECT_FALSE(t.has_column("full_name"));
    EXPECT_FALSE(p.needs_review);
    EXPECT_EQ(gold(p.evolved), gold(in));
}

TEST(SplitColumns, DateEqualityBecomesConjunction) {
    const Database db = populate(subschema(clinic(), {"patient"}), {25, 1});
    const std::string date = db.table_rows("patient")[2][2].as_text();
    auto rng = make_stream(1, "t");
    const auto p = perturb_split_columns(
        clinic_instance("SELECT full_name FROM patient WHERE birth_date = '" + date + "'", {"patient"}),
        {CompositeKind::Date}, {1, 1}, rng);
    EXPECT_FALSE(p.needs_review);
    EXPECT_NE(gold(p.evolved).find("birth_year"), std::string::npos) << gold(p.evolved);
    EXPECT_NE(gold(p.evolved).find(" AND "), std::string::npos) << gold(p.evolved);
    expect_preserved(p);
}

TEST(SplitColumns, NoPatterns) {
    auto rng = make_stream(1, "t");
    EXPECT_THROW(perturb_split_columns(clinic_instance(kClinicGold), {}, {1, 1}, rng), NoEligibleColumns);
}

TEST(MergeColumns, UnreferencedMerge) {
    auto rng = make_stream(1, "t");
    const Instance in = person_instance("SELECT code FROM person");
    const auto p = perturb_merge_columns(in, {CompositeKind::Name}, {1, 1}, rng);
    const Table& t = *p.evolved.schema.find_table("person");
    EXPECT_TRUE(t.has_column("full_name"));
    EXPECT_FALSE(t.has_column("first_name"));
    EXPECT_EQ(gold(p.evolved), gold(in));
    EXPECT_EQ(p.record.manipulated_count, 2);
}

TEST(MergeColumns, ConjunctionBecomesEquality) {
    auto rng = make_stream(1, "t");
    const auto p = perturb_merge_columns(
        person_instance("SELECT id FROM person WHERE first_name = 'A' AND last_name = 'B'"), {CompositeKind::Name},
        {1, 1}, rng);
    EXPECT_NE(gold(p.evolved).find("full_name = 'A B'"), std::string::npos) << gold(p.evolved);
    expect_preserved(p);
}

TEST(MergeColumns, ComponentsMustBeColocated) {
    auto rng = make_stream(1, "t");
    Instance in = person_instance("SELECT id FROM person");
    in.schema = parse_ddl(
        "CREATE TABLE person (id INTEGER PRIMARY KEY, first_name TEXT);\n"
        "CREATE TABLE visit (vid INTEGER PRIMARY KEY, last_name TEXT);");
    EXPECT_THROW(perturb_merge_columns(in, {CompositeKind::Name}, {1, 1}, rng), NoEligibleColumns);
}

TEST(AddTables, DrawsFromTheDatabase) {
    const SchemaPool pool{{"clinic", clinic()}};
    const Instance in = clinic_instance("SELECT city FROM patient", {"patient"});
    auto rng = make_stream(1, "t");
    const auto p = perturb_add_tables(in, {1, 3}, pool, rng);
    const auto added = p.evolved.schema.tables.size() - 1;
    EXPECT_GE(added, 1u);
    EXPECT_LE(added, 2u);
    EXPECT_EQ(gold(p.evolved), gold(in));
    EXPECT_TRUE(validate(p.evolved.schema).empty());
}

TEST(AddTables, CountClampedToExtras) {
    const SchemaPool pool{{"clinic", clinic()}};
    auto rng = make_stream(1, "t");
    const auto p = perturb_add_tables(clinic_instance(kClinicGold), {3, 3}, pool, rng);
    EXPECT_EQ(p.record.manipulated_count, 1);
    EXPECT_TRUE(p.evolved.schema.has_table("billing"));
}

TEST(AddTables, NothingLeftToAdd) {
    const SchemaPool pool{{"clinic", clinic()}};
    auto rng = make_stream(1, "t");
    EXPECT_THROW(perturb_add_tables(clinic_instance(kClinicGold, {"patient", "diagnosis", "billing"}), {1, 1}, pool, rng),
                 NoEligibleTables);
}

TEST(RemoveTables, ReferencedTableBecomesSentinel) {
    auto rng = make_stream(1, "t");
    const auto p = perturb_remove_tables(clinic_instance(kClinicGold), rng);
    EXPECT_EQ(p.evolved.schema.tables.size(), 1u);
    EXPECT_TRUE(p.evolved.schema.foreign_keys.empty());
    EXPECT_EQ(gold_text(p.evolved.gold), kTableRefusal);
    EXPECT_EQ(p.record.manipulated_count, 1);
}

TEST(RemoveTables, SingleTableLeavesEmptySchema) {
    auto rng = make_stream(1, "t");
    const auto p = perturb_remove_tables(clinic_instance("SELECT city FROM patient", {"patient"}), rng);
    EXPECT_TRUE(p.evolved.schema.tables.empty());
    EXPECT_EQ(gold_text(p.evolved.gold), kTableRefusal);
}

TEST(RenameTables, PatientBecomesPerson) {
    MockSynthesizer mock(3);
    const Instance in = clinic_instance(kClinicGold);
    bool seen = false;
    for (int seed = 0; seed < 100 && !seen; ++seed) {
        auto rng = make_stream(seed, "rename-tables");
        const auto p = perturb_rename_tables(in, {1, 4}, mock, rng);
        EXPECT_GE(p.record.manipulated_count, 1);
        EXPECT_LE(p.record.manipulated_count, 4);
        const auto target = p.record.renames.table_target("patient");
        if (!target) continue;
        seen = true;
        EXPECT_EQ(*target, "person");
        for (const auto& fk : p.evolved.schema.foreign_keys) EXPECT_EQ(fk.parent_table, "person");
        EXPECT_NE(gold(p.evolved).find("FROM person AS T1"), std::string::npos) << gold(p.evolved);
        expect_preserved(p);
    }
    EXPECT_TRUE(seen);
}

TEST(RenameTables, UnreferencedTableKeepsGold) {
    MockSynthesizer mock(3);
    const std::string sql = "SELECT city FROM patient";
    const Instance in = clinic_instance(sql, {"patient", "billing"});
    bool seen = false;
    for (int seed = 0; seed < 100 && !seen; ++seed) {
        auto rng = make_stream(seed, "rename-tables");
        const auto p = perturb_rename_tables(in, {1, 1}, mock, rng);
        if (p.record.renames.table_target("patient")) continue;
        seen = true;
        EXPECT_EQ(gold(p.evolved), sql);
    }
    EXPECT_TRUE(seen);
}

TEST(SplitTables, PatientIntoTwoParts) {
    MockSynthesizer mock(3);
    auto rng = make_stream(1, "t");
    const auto p = perturb_split_tables(clinic_instance("SELECT full_name FROM patient", {"patient"}), mock, rng);
    ASSERT_TRUE(p.record.split_plan);
    EXPECT_EQ(p.record.split_plan->parts.size(), 2u);
    EXPECT_EQ(p.record.manipulated_count, 2);
    EXPECT_FALSE(p.evolved.schema.has_table("patient"));
    EXPECT_EQ(gold(p.evolved).find("JOIN"), std::string::npos) << gold(p.evolved);
    expect_preserved(p);
}

TEST(SplitTables, InboundForeignKeysMoveToAnchor) {
    MockSynthesizer mock(3);
    const Instance in = clinic_instance(kClinicGold);
    for (int seed = 0; seed < 20; ++seed) {
        auto rng = make_stream(seed, "split");
        const auto p = perturb_split_tables(in, mock, rng);
        EXPECT_TRUE(validate(p.evolved.schema).empty());
        if (p.record.split_plan->source_table != "patient") continue;
        const std::string anchor = p.record.split_plan->parts[0].name;
        EXPECT_EQ(p.evolved.schema.foreign_keys.size(), 1u);
        EXPECT_EQ(p.evolved.schema.foreign_keys[0].parent_table, anchor);
        if (!p.needs_review) expect_preserved(p);
    }
}

TEST(MergeTables, PatientAndDiagnosis) {
    MockSynthesizer mock(3);
    auto rng = make_stream(1, "t");
    const auto p = perturb_merge_tables(clinic_instance(kClinicGold), mock, rng);
    ASSERT_TRUE(p.record.merge_plan);
    EXPECT_EQ(p.record.manipulated_count, 2);
    const Table* merged = p.evolved.schema.find_table("patient_record");
    ASSERT_NE(merged, nullptr);
    EXPECT_EQ(merged->primary_key, std::vector<std::string>{"diag_id"});
    EXPECT_FALSE(p.needs_review);
    EXPECT_EQ(gold(p.evolved).find("JOIN"), std::string::npos) << gold(p.evolved);
    expect_preserved(p);
}

TEST(MergeTables, ClashingNamesAreRenamed) {
    MockSynthesizer mock(3);
    auto rng = make_stream(1, "t");
    Instance in = person_instance("SELECT T1.code, T2.given_name FROM person AS T1 JOIN visit AS T2 ON T1.id = T2.person_id");
    in.schema = parse_ddl(
        "CREATE TABLE person (id INTEGER PRIMARY KEY, name TEXT, code TEXT);\n"
        "CREATE TABLE visit (vid INTEGER PRIMARY KEY, person_id INTEGER, name TEXT, given_name TEXT, FOREIGN KEY "
        "(person_id) REFERENCES person (id));");
    const auto p = perturb_merge_tables(in, mock, rng);
    EXPECT_TRUE(validate(p.evolved.schema).empty());
    const Table& t = p.evolved.schema.tables.front();
    EXPECT_TRUE(t.has_column("name"));
    EXPECT_TRUE(t.has_column("visit_name"));
    expect_preserved(p);
}

TEST(MergeTables, NoLinkedPair) {
    MockSynthesizer mock(3);
    auto rng = make_stream(1, "t");
    EXPECT_THROW(perturb_merge_tables(clinic_instance("SELECT city FROM patient", {"patient"}), mock, rng),
                 NoEligibleTables);
}

TEST(Perturb, RejectsSentinelGold) {
    MockSynthesizer mock(3);
    auto rng = make_stream(1, "t");
    Instance in = clinic_instance(kClinicGold);
    in.gold = RefusalSentinel{RefusalKind::Table};
    EXPECT_THROW(perturb(in, PerturbationType::RenameTables, {}, mock, {}, rng), InvalidArgument);
}

class Preservation : public ::testing::TestWithParam<PerturbationType> {};

TEST_P(Preservation, GeneratedInstances) {
    const auto r = testkit::semantic_preservation(17, GetParam(), 60);
    EXPECT_TRUE(r.ok()) << r.passed << "/" << r.trials << " " << (r.failures.empty() ? "" : r.failures.front());
}

INSTANTIATE_TEST_SUITE_P(PreservingTypes, Preservation,
                         ::testing::Values(PerturbationType::AddColumns, PerturbationType::RemoveColumns,
                                           PerturbationType::RenameColumns, PerturbationType::SplitColumns,
                                           PerturbationType::MergeColumns, PerturbationType::AddTables,
                                           PerturbationType::RenameTables, PerturbationType::SplitTables,
                                           PerturbationType::MergeTables),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Integrity, GeneratedSchemasAllTypes) {
    const auto r = testkit::integrity_totality(29, 150);
    EXPECT_TRUE(r.ok()) << (r.failures.empty() ? "" : r.failures.front());
}
