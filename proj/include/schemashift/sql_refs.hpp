#pragma once

#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "schemashift/schema.hpp"
#include "schemashift/sql_ast.hpp"

namespace schemashift {

using ColumnRef = std::pair<std::string, std::string>;  // (table, column), lowercase

// Tables and (table, column) pairs a query touches, in canonical lowercase
// form with quoting stripped.
struct SqlRefs {
    std::set<std::string> tables;
    std::set<ColumnRef> columns;

    bool operator==(const SqlRefs&) const = default;
};

// Base tables in every FROM/JOIN at any depth, and every column reference
// after alias and scope resolution. `SELECT *` contributes tables only.
// Throws SqlSyntaxError or UnresolvedIdentifier.
SqlRefs extract_refs(std::string_view sql, const Schema& schema);

// Same, over an already bound query.
SqlRefs collect_refs(sql::Query& bound);

// Parses and binds in one step.
sql::QueryPtr parse_and_bind(std::string_view sql, const Schema& schema);

}  // namespace schemashift
