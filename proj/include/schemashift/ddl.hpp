#pragma once

#include <string>
#include <string_view>

#include "schemashift/schema.hpp"

namespace schemashift {

// Parses zero or more SQLite-style CREATE TABLE statements.
// Throws SyntaxError (with line/offset) or IntegrityError naming the
// offending identifier when the result would violate a schema invariant.
Schema parse_ddl(std::string_view text, std::string db_id = {});

// One statement per table, columns in order, foreign keys as table-level
// clauses. parse_ddl(render_ddl(s)) reproduces `s` structurally.
std::string render_ddl(const Schema& schema);

std::string render_table_ddl(const Schema& schema, const Table& table);

}  // namespace schemashift
