#pragma once

#include <string>
#include <string_view>

#include "schemashift/evolution.hpp"
#include "schemashift/schema.hpp"

namespace schemashift {

// Rewrites table and column references in place, touching only the affected
// identifier bytes. `schema` is the pre-rename schema. Bare renamed columns
// projected by a derived table gain an alias so outer references still
// resolve. Throws SqlSyntaxError, UnresolvedIdentifier, or UnsupportedShape
// when a renamed column takes part in USING / NATURAL.
std::string rewrite_identifiers(std::string_view sql, const RenameMap& renames, const Schema& schema);

// The remaining rewriters re-render the query. They return the input
// unchanged when it does not touch the affected table(s).

// Throws UnsupportedShape for set operations over the source, or USING /
// NATURAL joins involving it.
std::string rewrite_for_split(std::string_view sql, const SplitPlan& plan, const Schema& schema);

// Throws UnsupportedShape as above, NeedsReview when the merged table's rows
// do not line up with what the query scanned.
std::string rewrite_for_merge(std::string_view sql, const MergePlan& plan, const Schema& schema);

// Throws NeedsReview for appearances outside the supported shapes.
std::string rewrite_for_column_split(std::string_view sql, const ColumnSplitSpec& spec, const Schema& schema);
std::string rewrite_for_column_merge(std::string_view sql, const ColumnMergeSpec& spec, const Schema& schema);

// True when a star projection covers `table` anywhere in `sql`.
bool star_covers_table(std::string_view sql, std::string_view table, const Schema& schema);

}  // namespace schemashift
