#include "schemashift/sql_refs.hpp"

#include "schemashift/binder.hpp"
#include "schemashift/ident.hpp"

namespace schemashift {

sql::QueryPtr parse_and_bind(std::string_view text, const Schema& schema) {
    auto q = sql::parse_query(text);
    sql::bind(*q, schema);
    return q;
}

SqlRefs collect_refs(sql::Query& bound) {
    using namespace sql;
    SqlRefs refs;
    auto add_column = [&](const FromEntry& entry, int column) {
        if (!entry.is_table()) return;
        refs.columns.emplace(lower(entry.table), lower(entry.columns[column]));
    };

    visit_queries(bound, [&](Query& block) {
        for (auto& core : block.cores) {
            for (std::size_t i = 0; i < core.from.size(); ++i) {
                const FromEntry& entry = core.from[i];
                if (entry.is_table()) refs.tables.insert(lower(entry.table));

                std::vector<std::string> shared = entry.using_columns;
                if (entry.natural) shared = natural_join_columns(core, i);
                for (const auto& name : shared) {
                    for (std::size_t c = 0; c < entry.columns.size(); ++c)
                        if (iequals(entry.columns[c], name)) add_column(entry, static_cast<int>(c));
                    for (std::size_t j = 0; j < i; ++j) {
                        const FromEntry& left = core.from[j];
                        bool found = false;
                        for (std::size_t c = 0; c < left.columns.size() && !found; ++c) {
                            if (iequals(left.columns[c], name)) {
                                add_column(left, static_cast<int>(c));
                                found = true;
                            }
                        }
                        if (found) break;
                    }
                }
            }
        }
        visit_exprs_shallow(block, [&](Expr& e) {
            if (e.kind == ExprKind::Column && e.binding.kind == ColumnBinding::Kind::Source)
                add_column(*e.binding.source, e.binding.column);
        });
    });
    return refs;
}

SqlRefs extract_refs(std::string_view text, const Schema& schema) {
    auto q = parse_and_bind(text, schema);
    return collect_refs(*q);
}

}  // namespace schemashift
