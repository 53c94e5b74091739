#include "schemashift/binder.hpp"

#include "schemashift/errors.hpp"
#include "schemashift/ident.hpp"

namespace schemashift::sql {

namespace {

struct Scope {
    SelectCore* core = nullptr;
    const Scope* parent = nullptr;
};

int find_column(const FromEntry& entry, std::string_view name) {
    for (std::size_t i = 0; i < entry.columns.size(); ++i)
        if (iequals(entry.columns[i], name)) return static_cast<int>(i);
    return -1;
}

bool using_hides(const SelectCore& core, std::size_t entry_index, std::string_view column) {
    const FromEntry& e = core.from[entry_index];
    for (const auto& u : e.using_columns)
        if (iequals(u, column)) return true;
    if (e.natural)
        for (const auto& c : natural_join_columns(core, entry_index))
            if (iequals(c, column)) return true;
    return false;
}

std::string item_label(const SelectItem& item) {
    if (!item.alias.empty()) return item.alias;
    if (item.expr->kind == ExprKind::Column) return item.expr->name;
    return to_sql(*item.expr);
}

class Binder {
public:
    explicit Binder(const Schema& schema) : schema_(schema) {}

    void bind_query(Query& q, const Scope* outer) {
        for (auto& core : q.cores) bind_core(core, outer);

        // ORDER BY: output ordinals and aliases first, then (for simple
        // queries) ordinary column resolution in the first core.
        const auto labels = output_columns(q);
        for (auto& item : q.order_by) {
            Expr& e = *item.expr;
            if (e.kind == ExprKind::Literal && e.literal == LiteralKind::Integer) {
                const long k = std::stol(e.text);
                if (k < 1 || static_cast<std::size_t>(k) > labels.size())
                    throw UnresolvedIdentifier("ORDER BY term " + e.text);
                item.ordinal = static_cast<int>(k - 1);
                continue;
            }
            if (e.kind == ExprKind::Column && e.qualifier.empty()) {
                const auto& items = q.cores[0].items;
                bool found = false;
                for (std::size_t i = 0; i < items.size(); ++i) {
                    if (!items[i].alias.empty() && iequals(items[i].alias, e.name)) {
                        item.ordinal = static_cast<int>(i);
                        found = true;
                        break;
                    }
                }
                if (found) continue;
            }
            if (q.is_compound()) {
                if (e.kind == ExprKind::Column) {
                    for (std::size_t i = 0; i < labels.size(); ++i) {
                        if (iequals(labels[i], e.name)) {
                            item.ordinal = static_cast<int>(i);
                            break;
                        }
                    }
                }
                if (item.ordinal < 0)
                    throw UnresolvedIdentifier("ORDER BY term does not match a result column");
                continue;
            }
            Scope scope{&q.cores[0], outer};
            bind_expr(e, scope, true);
        }
        if (q.limit) bind_expr(*q.limit, Scope{nullptr, outer}, false);
        if (q.offset) bind_expr(*q.offset, Scope{nullptr, outer}, false);
    }

private:
    void bind_core(SelectCore& core, const Scope* outer) {
        for (auto& entry : core.from) {
            entry.columns.clear();
            entry.column_types.clear();
            if (entry.subquery) {
                bind_query(*entry.subquery, outer);
                entry.columns = output_columns(*entry.subquery);
                entry.column_types.assign(entry.columns.size(), "");
                // Propagate declared types through bare column projections.
                const auto& first = entry.subquery->cores[0];
                std::size_t k = 0;
                for (const auto& item : first.items) {
                    if (item.star) {
                        for (const auto& sc : expand_star(first, item)) {
                            if (k < entry.column_types.size())
                                entry.column_types[k] = sc.entry->column_types[sc.column];
                            ++k;
                        }
                        continue;
                    }
                    if (item.expr->kind == ExprKind::Column &&
                        item.expr->binding.kind == ColumnBinding::Kind::Source && k < entry.column_types.size()) {
                        const auto& b = item.expr->binding;
                        entry.column_types[k] = b.source->column_types[b.column];
                    } else if (item.expr->kind == ExprKind::Cast && k < entry.column_types.size()) {
                        entry.column_types[k] = item.expr->text;
                    }
                    ++k;
                }
            } else {
                const Table* t = schema_.find_table(entry.table);
                if (!t) throw UnresolvedIdentifier(entry.table);
                for (const auto& c : t->columns) {
                    entry.columns.push_back(c.name);
                    entry.column_types.push_back(c.data_type);
                }
            }
        }

        // Aliases (or table names) must be unique within a FROM clause.
        for (std::size_t i = 0; i < core.from.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (!core.from[i].exposed_name().empty() &&
                    iequals(core.from[i].exposed_name(), core.from[j].exposed_name()))
                    throw UnresolvedIdentifier("ambiguous FROM name " + core.from[i].exposed_name());

        Scope scope{&core, outer};
        for (std::size_t i = 0; i < core.from.size(); ++i) {
            auto& entry = core.from[i];
            for (const auto& u : entry.using_columns) {
                if (find_column(entry, u) < 0) throw UnresolvedIdentifier(u);
                bool left_has = false;
                for (std::size_t j = 0; j < i; ++j) left_has |= find_column(core.from[j], u) >= 0;
                if (!left_has) throw UnresolvedIdentifier(u);
            }
            if (entry.on) bind_expr(*entry.on, scope, false);
        }
        for (auto& item : core.items) {
            if (item.star) {
                if (!item.star_qualifier.empty()) {
                    bool found = false;
                    for (const auto& e : core.from) found |= iequals(e.exposed_name(), item.star_qualifier);
                    if (!found) throw UnresolvedIdentifier(item.star_qualifier);
                }
                continue;
            }
            bind_expr(*item.expr, scope, false);
        }
        if (core.where) bind_expr(*core.where, scope, true);
        for (auto& g : core.group_by) bind_expr(*g, scope, true);
        if (core.having) bind_expr(*core.having, scope, true);
    }

    // `allow_alias`: unresolved unqualified names may refer to select-list
    // aliases of the scope's core.
    void bind_expr(Expr& e, const Scope& scope, bool allow_alias) {
        if (e.kind == ExprKind::Column) {
            bind_column(e, scope, allow_alias);
            return;
        }
        for (auto& a : e.args)
            if (a) bind_expr(*a, scope, allow_alias);
        if (e.subquery) bind_query(*e.subquery, &scope);
    }

    void bind_column(Expr& e, const Scope& scope, bool allow_alias) {
        e.binding = ColumnBinding{};
        if (!e.qualifier.empty()) {
            for (const Scope* s = &scope; s; s = s->parent) {
                if (!s->core) continue;
                for (auto& entry : s->core->from) {
                    if (!iequals(entry.exposed_name(), e.qualifier)) continue;
                    const int idx = find_column(entry, e.name);
                    if (idx < 0) throw UnresolvedIdentifier(e.name);
                    e.binding.kind = ColumnBinding::Kind::Source;
                    e.binding.source = &entry;
                    e.binding.column = idx;
                    return;
                }
            }
            throw UnresolvedIdentifier(e.qualifier);
        }

        for (const Scope* s = &scope; s; s = s->parent) {
            if (!s->core) continue;
            for (auto& entry : s->core->from) {
                const int idx = find_column(entry, e.name);
                if (idx < 0) continue;
                e.binding.kind = ColumnBinding::Kind::Source;
                e.binding.source = &entry;
                e.binding.column = idx;
                return;
            }
            if (s == &scope && allow_alias && s->core) {
                const auto& items = s->core->items;
                for (std::size_t i = 0; i < items.size(); ++i) {
                    if (!items[i].alias.empty() && iequals(items[i].alias, e.name)) {
                        e.binding.kind = ColumnBinding::Kind::SelectItem;
                        e.binding.item = static_cast<int>(i);
                        return;
                    }
                }
            }
        }
        if (e.name_quote == '"') {
            e.binding.kind = ColumnBinding::Kind::StringLiteral;
            return;
        }
        throw UnresolvedIdentifier(e.name);
    }

    const Schema& schema_;
};

}  // namespace

void bind(Query& q, const Schema& schema) { Binder(schema).bind_query(q, nullptr); }

std::vector<std::string> natural_join_columns(const SelectCore& core, std::size_t entry_index) {
    std::vector<std::string> out;
    const FromEntry& right = core.from[entry_index];
    for (const auto& c : right.columns) {
        bool left_has = false;
        for (std::size_t j = 0; j < entry_index; ++j) left_has |= find_column(core.from[j], c) >= 0;
        if (left_has) out.push_back(c);
    }
    return out;
}

std::vector<StarColumn> expand_star(const SelectCore& core, const SelectItem& item) {
    std::vector<StarColumn> out;
    for (std::size_t i = 0; i < core.from.size(); ++i) {
        const FromEntry& entry = core.from[i];
        if (!item.star_qualifier.empty()) {
            if (!iequals(entry.exposed_name(), item.star_qualifier)) continue;
            for (std::size_t c = 0; c < entry.columns.size(); ++c)
                out.push_back({&entry, static_cast<int>(c)});
            continue;
        }
        for (std::size_t c = 0; c < entry.columns.size(); ++c) {
            if (using_hides(core, i, entry.columns[c])) continue;
            out.push_back({&entry, static_cast<int>(c)});
        }
    }
    return out;
}

std::vector<std::string> output_columns(const Query& q) {
    std::vector<std::string> out;
    const SelectCore& core = q.cores.front();
    for (const auto& item : core.items) {
        if (item.star) {
            for (const auto& sc : expand_star(core, item)) out.push_back(sc.entry->columns[sc.column]);
            continue;
        }
        out.push_back(item_label(item));
    }
    return out;
}

}  // namespace schemashift::sql
