#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "schemashift/evolution.hpp"
#include "schemashift/ident.hpp"
#include "schemashift/schema.hpp"
#include "schemashift/value.hpp"

namespace schemashift {

struct Database {
    Schema schema;
    std::map<std::string, std::vector<Row>, ILess> rows;

    // Throws ExecError for unknown tables.
    const std::vector<Row>& table_rows(std::string_view table) const;

    // Arity, primary-key uniqueness and foreign-key containment problems.
    std::vector<std::string> check() const;

    bool operator==(const Database&) const = default;
};

struct ResultSet {
    std::vector<std::string> labels;
    std::vector<Row> rows;
    bool ordered = false;  // the query had a top-level ORDER BY
};

// Evaluates one SELECT over `db` with SQLite semantics. Throws ExecError for
// anything that does not parse, bind, or evaluate.
ResultSet execute(std::string_view sql, const Database& db);

// Row comparison ignoring labels; reals compare with a relative tolerance.
bool rows_equal(const Row& a, const Row& b, double rel_tol = 1e-9);
bool multiset_equal(const ResultSet& a, const ResultSet& b, double rel_tol = 1e-9);
// Ordered when `gold` is ordered, as multisets otherwise.
bool results_match(const ResultSet& gold, const ResultSet& pred, double rel_tol = 1e-9);

struct PopulateConfig {
    std::size_t rows_per_table = 16;
    std::uint64_t seed = 1;
};

// Synthetic rows: parents before children, FK values drawn from parent keys.
// Throws CyclicFkUnsatisfiable when a cycle of non-nullable FKs blocks the fill.
Database populate(const Schema& schema, const PopulateConfig& cfg);

// Reshapes `db` (whose schema must equal the record's base) to the evolved
// schema. Added columns and tables get fresh values drawn from `seed`.
// Throws MigrationUnsupported.
Database migrate(const Database& db, const EvolutionRecord& record, std::uint64_t seed = 0);

// CREATE TABLE + INSERT statements loadable by SQLite.
std::string export_sql_dump(const Database& db);

}  // namespace schemashift
