#pragma once

#include <string>
#include <vector>

#include "schemashift/schema.hpp"
#include "schemashift/sql_ast.hpp"

namespace schemashift::sql {

// Resolves every table and column reference in `q` against `schema`, filling
// FromEntry::columns and Expr::binding in place.
//
// Unqualified names resolve to the first FROM-listed entry (innermost scope
// first) that owns them; qualified names match an alias, or the table name of
// an unaliased entry. An unresolvable double-quoted name degrades to a string
// literal, as SQLite does.
//
// Throws UnresolvedIdentifier naming the first table or column that cannot be
// resolved.
void bind(Query& q, const Schema& schema);

// Output column labels of a bound query (labels of its first core).
std::vector<std::string> output_columns(const Query& q);

// Entries of `core` that a star item expands over, with the column indices
// it contributes from each (USING/NATURAL duplicates are skipped).
struct StarColumn {
    const FromEntry* entry;
    int column;
};
std::vector<StarColumn> expand_star(const SelectCore& core, const SelectItem& item);

// Column names shared by a NATURAL join entry and the entries to its left.
std::vector<std::string> natural_join_columns(const SelectCore& core, std::size_t entry_index);

}  // namespace schemashift::sql
