#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "schemashift/ddl.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/random.hpp"

using namespace schemashift;
using testkit::clinic;

TEST(Ddl, MinimalTable) {
    const Schema s = parse_ddl("CREATE TABLE t(a INTEGER PRIMARY KEY)");
    ASSERT_EQ(s.tables.size(), 1u);
    EXPECT_EQ(s.tables[0].name, "t");
    EXPECT_EQ(s.tables[0].primary_key, std::vector<std::string>{"a"});
}

TEST(Ddl, ClinicStructure) {
    const Schema s = clinic();
    ASSERT_TRUE(s.has_table("patient"));
    ASSERT_TRUE(s.has_table("diagnosis"));
    EXPECT_EQ(s.find_table("patient")->columns.size(), 4u);
    const ForeignKey fk{"diagnosis", "patient_id", "patient", "patient_id"};
    EXPECT_EQ(std::count(s.foreign_keys.begin(), s.foreign_keys.end(), fk), 1);
    const Schema two = subschema(s, {"patient", "diagnosis"});
    EXPECT_EQ(two.foreign_keys, std::vector<ForeignKey>{fk});
}

TEST(Ddl, DanglingReferenceNamesTheTable) {
    try {
        parse_ddl("CREATE TABLE t(a INT, FOREIGN KEY(a) REFERENCES missing(x))");
        FAIL() << "expected IntegrityError";
    } catch (const IntegrityError& e) {
        EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
    }
}

TEST(Ddl, SyntaxErrorHasCoordinates) {
    try {
        parse_ddl("CREATE TABLE t(\n  a INT,,\n)");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Ddl, ClinicRoundTrip) {
    const Schema s = clinic();
    const Schema back = parse_ddl(render_ddl(s), "clinic");
    EXPECT_EQ(back, s);
}

TEST(Ddl, EmptySchemaRendersEmpty) { EXPECT_EQ(render_ddl(Schema{}), ""); }

TEST(Ddl, RandomSchemasRoundTrip) {
    auto rng = make_stream(11, "ddl-roundtrip");
    for (int i = 0; i < 1000; ++i) {
        const Schema s = testkit::random_schema(rng);
        const Schema back = parse_ddl(render_ddl(s));
        ASSERT_TRUE(back.same_structure(s)) << render_ddl(s);
    }
}

TEST(Ddl, IdentifiersNeedingQuotesSurvive) {
    Schema s;
    s.tables.push_back({"order", {{"select", "TEXT", false}, {"two words", "INTEGER", true}}, {"select"}});
    const Schema back = parse_ddl(render_ddl(s));
    EXPECT_TRUE(back.same_structure(s)) << render_ddl(s);
}

TEST(Validate, ClinicIsClean) { EXPECT_TRUE(validate(clinic()).empty()); }

TEST(Validate, CaseInsensitiveDuplicateTable) {
    Schema s;
    s.tables.push_back({"Patient", {{"id", "INTEGER", false}}, {"id"}});
    s.tables.push_back({"patient", {{"id", "INTEGER", false}}, {"id"}});
    const auto v = validate(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].code, ViolationCode::DupTable);
}

TEST(Validate, DeletedParentColumnLeavesDanglingFk) {
    Schema s = clinic();
    auto& cols = s.find_table("patient")->columns;
    cols.erase(cols.begin());
    s.find_table("patient")->primary_key.clear();
    bool dangling = false;
    for (const auto& v : validate(s)) dangling |= v.code == ViolationCode::DanglingFk;
    EXPECT_TRUE(dangling);
}

TEST(Validate, DuplicateColumnAndBadKey) {
    Schema s;
    s.tables.push_back({"t", {{"a", "INT", true}, {"A", "INT", true}}, {"b"}});
    std::set<ViolationCode> codes;
    for (const auto& v : validate(s)) codes.insert(v.code);
    EXPECT_TRUE(codes.count(ViolationCode::DupColumn));
    EXPECT_TRUE(codes.count(ViolationCode::BadPrimaryKey));
}

TEST(Subschema, KeepsOnlyInternalForeignKeys) {
    const Schema s = subschema(clinic(), {"diagnosis", "billing"});
    EXPECT_EQ(s.tables.size(), 2u);
    EXPECT_TRUE(s.foreign_keys.empty());
    EXPECT_TRUE(validate(s).empty());
}
