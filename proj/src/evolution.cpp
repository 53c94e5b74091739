#include "schemashift/evolution.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "schemashift/errors.hpp"

namespace schemashift {

namespace {

constexpr std::pair<PerturbationType, std::string_view> kTypeNames[] = {
    {PerturbationType::AddColumns, "add_columns"},
    {PerturbationType::RemoveColumns, "remove_columns"},
    {PerturbationType::RemoveColumnsInSql, "remove_columns_in_sql"},
    {PerturbationType::RenameColumns, "rename_columns"},
    {PerturbationType::SplitColumns, "split_columns"},
    {PerturbationType::MergeColumns, "merge_columns"},
    {PerturbationType::AddTables, "add_tables"},
    {PerturbationType::RemoveTables, "remove_tables"},
    {PerturbationType::RenameTables, "rename_tables"},
    {PerturbationType::SplitTables, "split_tables"},
    {PerturbationType::MergeTables, "merge_tables"},
};

}  // namespace

std::string_view to_string(PerturbationType type) {
    for (const auto& [t, name] : kTypeNames)
        if (t == type) return name;
    return "unknown";
}

std::optional<PerturbationType> parse_perturbation_type(std::string_view name) {
    for (const auto& [t, n] : kTypeNames)
        if (iequals(n, name)) return t;
    return std::nullopt;
}

bool is_column_level(PerturbationType type) {
    switch (type) {
        case PerturbationType::AddColumns:
        case PerturbationType::RemoveColumns:
        case PerturbationType::RemoveColumnsInSql:
        case PerturbationType::RenameColumns:
        case PerturbationType::SplitColumns:
        case PerturbationType::MergeColumns: return true;
        default: return false;
    }
}

bool is_refusal_type(PerturbationType type) {
    return type == PerturbationType::RemoveColumnsInSql || type == PerturbationType::RemoveTables;
}

std::string_view to_string(CompositeKind kind) {
    switch (kind) {
        case CompositeKind::Name: return "name";
        case CompositeKind::Date: return "date";
        case CompositeKind::Address: return "address";
    }
    return "name";
}

std::optional<CompositeKind> parse_composite_kind(std::string_view s) {
    if (iequals(s, "name")) return CompositeKind::Name;
    if (iequals(s, "date")) return CompositeKind::Date;
    if (iequals(s, "address")) return CompositeKind::Address;
    return std::nullopt;
}

// ---------------------------------------------------------------- RenameMap

void RenameMap::rename_table(std::string old_name, std::string new_name) {
    tables_[std::move(old_name)] = std::move(new_name);
}

void RenameMap::rename_column(std::string table, std::string old_column, std::string new_column) {
    columns_[{std::move(table), std::move(old_column)}] = std::move(new_column);
}

std::optional<std::string> RenameMap::table_target(std::string_view table) const {
    auto it = tables_.find(table);
    if (it == tables_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> RenameMap::column_target(std::string_view table, std::string_view column) const {
    auto it = columns_.find({std::string(table), std::string(column)});
    if (it == columns_.end()) return std::nullopt;
    return it->second;
}

RenameMap RenameMap::inverse() const {
    RenameMap inv;
    for (const auto& [old_name, new_name] : tables_) inv.rename_table(new_name, old_name);
    for (const auto& [key, new_column] : columns_) {
        const std::string table = table_target(key.first).value_or(key.first);
        inv.rename_column(table, new_column, key.second);
    }
    return inv;
}

std::vector<std::string> RenameMap::check(const Schema& schema) const {
    std::vector<std::string> problems;
    std::set<std::string, ILess> targets;
    for (const auto& [old_name, new_name] : tables_) {
        if (!schema.has_table(old_name)) problems.push_back("unknown table " + old_name);
        if (new_name.empty()) problems.push_back("empty target for table " + old_name);
        if (iequals(old_name, new_name)) problems.push_back("table " + old_name + " renamed to itself");
        if (!targets.insert(new_name).second) problems.push_back("duplicate table target " + new_name);
    }
    for (const auto& t : schema.tables) {
        if (tables_.count(t.name)) continue;
        if (targets.count(t.name)) problems.push_back("table target collides with " + t.name);
    }

    std::map<std::string, std::set<std::string, ILess>, ILess> per_table_targets;
    for (const auto& [key, new_column] : columns_) {
        const Table* t = schema.find_table(key.first);
        if (!t || !t->has_column(key.second)) {
            problems.push_back("unknown column " + key.first + "." + key.second);
            continue;
        }
        if (new_column.empty()) problems.push_back("empty target for " + key.first + "." + key.second);
        if (iequals(new_column, key.second))
            problems.push_back("column " + key.first + "." + key.second + " renamed to itself");
        if (!per_table_targets[t->name].insert(new_column).second)
            problems.push_back("duplicate column target " + t->name + "." + new_column);
    }
    for (const auto& [table, names] : per_table_targets) {
        const Table* t = schema.find_table(table);
        for (const auto& c : t->columns) {
            if (columns_.count({t->name, c.name})) continue;
            if (names.count(c.name)) problems.push_back("column target collides with " + t->name + "." + c.name);
        }
    }
    return problems;
}

// ---------------------------------------------------------------- SplitPlan

std::optional<std::size_t> SplitPlan::owning_part(std::string_view column) const {
    for (const auto& pk : pk)
        if (iequals(pk, column)) return 0;
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (const auto& c : parts[i].columns)
            if (iequals(c, column)) return i;
    return std::nullopt;
}

std::vector<std::string> SplitPlan::check(const Schema& schema) const {
    std::vector<std::string> problems;
    const Table* source = schema.find_table(source_table);
    if (!source) return {"unknown source table " + source_table};
    if (source->primary_key.empty()) problems.push_back("source table has no primary key");
    if (pk.size() != source->primary_key.size() ||
        !std::equal(pk.begin(), pk.end(), source->primary_key.begin(),
                    [](const auto& a, const auto& b) { return iequals(a, b); }))
        problems.push_back("plan primary key differs from the source primary key");
    if (parts.size() < 2) problems.push_back("a split needs at least two parts");

    std::set<std::string, ILess> names;
    std::set<std::string, ILess> assigned;
    for (const auto& part : parts) {
        if (part.name.empty()) problems.push_back("empty part name");
        if (!names.insert(part.name).second) problems.push_back("duplicate part name " + part.name);
        if (schema.has_table(part.name)) problems.push_back("part name collides with table " + part.name);
        if (part.columns.empty()) problems.push_back("part " + part.name + " owns no columns");
        for (const auto& c : part.columns) {
            if (!source->has_column(c)) problems.push_back("unknown column " + c);
            else if (source->is_pk_member(c)) problems.push_back("primary key column " + c + " assigned to a part");
            if (!assigned.insert(c).second) problems.push_back("column " + c + " assigned twice");
        }
    }
    for (const auto& c : source->non_pk_columns())
        if (!assigned.count(c)) problems.push_back("column " + c + " not assigned to any part");
    return problems;
}

// ---------------------------------------------------------------- MergePlan

std::optional<std::string> MergedLayout::target(std::string_view table, std::string_view column) const {
    for (const auto& [key, merged] : mapping)
        if (iequals(key.first, table) && iequals(key.second, column)) return merged;
    return std::nullopt;
}

MergedLayout merged_layout(const Schema& schema, const MergePlan& plan) {
    MergedLayout layout;
    layout.table.name = plan.merged_name;
    std::set<std::string, ILess> used;

    auto rename_of = [&](const std::string& table, const std::string& column) -> std::optional<std::string> {
        for (const auto& [key, target] : plan.column_renames)
            if (iequals(key.first, table) && iequals(key.second, column)) return target;
        return std::nullopt;
    };

    for (const auto& source_name : plan.source_tables) {
        const Table* source = schema.find_table(source_name);
        if (!source) throw MigrationUnsupported("merge source " + source_name + " does not exist");
        for (const auto& col : source->columns) {
            std::optional<std::string> collapsed;
            // Same-named columns equated by a join link collapse into one.
            for (const auto& link : plan.join_links) {
                std::string other_table, other_column;
                if (iequals(link.child_table, source->name) && iequals(link.child_column, col.name)) {
                    other_table = link.parent_table;
                    other_column = link.parent_column;
                } else if (iequals(link.parent_table, source->name) && iequals(link.parent_column, col.name)) {
                    other_table = link.child_table;
                    other_column = link.child_column;
                } else {
                    continue;
                }
                if (!iequals(other_column, col.name)) continue;
                if (auto t = layout.target(other_table, other_column)) collapsed = t;
            }
            if (collapsed) {
                layout.mapping.push_back({{source->name, col.name}, *collapsed});
                continue;
            }
            std::string name = rename_of(source->name, col.name).value_or(col.name);
            if (!used.insert(name).second)
                throw IntegrityError("merged column name " + name + " is not unique", name);
            Column merged_col = col;
            merged_col.name = name;
            layout.table.columns.push_back(merged_col);
            layout.mapping.push_back({{source->name, col.name}, name});
        }
    }
    for (const auto& pk : plan.kept_pk) {
        auto t = layout.target(plan.kept_pk_table, pk);
        if (!t) throw MigrationUnsupported("kept primary key column " + pk + " missing");
        layout.table.primary_key.push_back(*t);
    }
    return layout;
}

std::vector<std::string> MergePlan::check(const Schema& schema) const {
    std::vector<std::string> problems;
    if (source_tables.size() < 2) problems.push_back("a merge needs at least two source tables");
    std::set<std::string, ILess> seen;
    for (const auto& s : source_tables) {
        if (!schema.has_table(s)) problems.push_back("unknown source table " + s);
        if (!seen.insert(s).second) problems.push_back("duplicate source table " + s);
    }
    if (!problems.empty()) return problems;
    if (merged_name.empty()) problems.push_back("empty merged table name");
    if (schema.has_table(merged_name)) problems.push_back("merged name collides with table " + merged_name);

    // Links must stay among the sources and connect all of them.
    std::vector<std::size_t> parent(source_tables.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto index_of = [&](std::string_view t) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < source_tables.size(); ++i)
            if (iequals(source_tables[i], t)) return i;
        return std::nullopt;
    };
    for (const auto& link : join_links) {
        auto a = index_of(link.child_table);
        auto b = index_of(link.parent_table);
        if (!a || !b || *a == *b) {
            problems.push_back("join link " + link.child_table + "->" + link.parent_table +
                               " does not connect two sources");
            continue;
        }
        const Table* child = schema.find_table(link.child_table);
        const Table* par = schema.find_table(link.parent_table);
        if (!child->has_column(link.child_column) || !par->has_column(link.parent_column)) {
            problems.push_back("join link names an unknown column");
            continue;
        }
        parent[find(*a)] = find(*b);
    }
    for (std::size_t i = 1; i < source_tables.size(); ++i)
        if (find(i) != find(0)) problems.push_back("sources are not connected by join links");

    const Table* kept = schema.find_table(kept_pk_table);
    if (!kept || !index_of(kept_pk_table)) {
        problems.push_back("kept primary key table is not a source");
    } else {
        if (kept_pk.size() != kept->primary_key.size() ||
            !std::equal(kept_pk.begin(), kept_pk.end(), kept->primary_key.begin(),
                        [](const auto& a, const auto& b) { return iequals(a, b); }))
            problems.push_back("kept primary key differs from the table's primary key");
        // A parent-side key repeats once per matching child row.
        for (const auto& link : join_links) {
            if (!iequals(link.parent_table, kept->name)) continue;
            const Table* child = schema.find_table(link.child_table);
            const bool one_to_one = child && child->primary_key.size() == 1 &&
                                    iequals(child->primary_key[0], link.child_column);
            if (!one_to_one)
                problems.push_back("kept primary key of " + kept->name +
                                   " would repeat across merged rows");
        }
    }
    for (const auto& [key, target] : column_renames) {
        const Table* t = schema.find_table(key.first);
        if (!t || !index_of(key.first) || !t->has_column(key.second))
            problems.push_back("rename of unknown source column " + key.first + "." + key.second);
        if (target.empty()) problems.push_back("empty rename target");
    }
    if (problems.empty()) {
        try {
            merged_layout(schema, *this);
        } catch (const Error& e) {
            problems.push_back(e.what());
        }
    }
    return problems;
}

// ---------------------------------------------------------------- apply

namespace {

Table& require_table(Schema& s, std::string_view name) {
    Table* t = s.find_table(name);
    if (!t) throw MigrationUnsupported("table " + std::string(name) + " does not exist");
    return *t;
}

void remove_column(Schema& s, const std::string& table, const std::string& column) {
    Table& t = require_table(s, table);
    auto idx = t.column_index(column);
    if (!idx) throw MigrationUnsupported("column " + table + "." + column + " does not exist");
    t.columns.erase(t.columns.begin() + static_cast<std::ptrdiff_t>(*idx));
    std::erase_if(t.primary_key, [&](const std::string& pk) { return iequals(pk, column); });
}

void apply_renames(Schema& s, const RenameMap& renames) {
    for (auto& fk : s.foreign_keys) {
        if (auto c = renames.column_target(fk.child_table, fk.child_column)) fk.child_column = *c;
        if (auto c = renames.column_target(fk.parent_table, fk.parent_column)) fk.parent_column = *c;
        if (auto t = renames.table_target(fk.child_table)) fk.child_table = *t;
        if (auto t = renames.table_target(fk.parent_table)) fk.parent_table = *t;
    }
    for (auto& t : s.tables) {
        for (auto& c : t.columns) {
            if (auto n = renames.column_target(t.name, c.name)) {
                for (auto& pk : t.primary_key)
                    if (iequals(pk, c.name)) pk = *n;
                c.name = *n;
            }
        }
        if (auto n = renames.table_target(t.name)) t.name = *n;
    }
}

void apply_split(Schema& s, const SplitPlan& plan) {
    auto it = std::find_if(s.tables.begin(), s.tables.end(),
                           [&](const Table& t) { return iequals(t.name, plan.source_table); });
    if (it == s.tables.end()) throw MigrationUnsupported("split source missing");
    const Table source = *it;
    std::vector<Table> parts;
    for (const auto& p : plan.parts) {
        Table part;
        part.name = p.name;
        part.primary_key = source.primary_key;
        for (const auto& c : source.columns) {
            const bool owned = std::any_of(p.columns.begin(), p.columns.end(),
                                           [&](const std::string& x) { return iequals(x, c.name); });
            if (owned || source.is_pk_member(c.name)) part.columns.push_back(c);
        }
        parts.push_back(std::move(part));
    }
    const auto pos = it - s.tables.begin();
    s.tables.erase(it);
    s.tables.insert(s.tables.begin() + pos, parts.begin(), parts.end());

    auto part_for = [&](const std::string& column) {
        auto idx = plan.owning_part(column);
        if (!idx) throw MigrationUnsupported("column " + column + " not covered by split plan");
        return plan.parts[*idx].name;
    };
    for (auto& fk : s.foreign_keys) {
        const bool child_src = iequals(fk.child_table, source.name);
        const bool parent_src = iequals(fk.parent_table, source.name);
        if (child_src) fk.child_table = part_for(fk.child_column);
        if (parent_src) fk.parent_table = part_for(fk.parent_column);
    }
}

void apply_merge(Schema& s, const MergePlan& plan) {
    const MergedLayout layout = merged_layout(s, plan);
    auto is_source = [&](std::string_view t) {
        return std::any_of(plan.source_tables.begin(), plan.source_tables.end(),
                           [&](const std::string& x) { return iequals(x, t); });
    };
    auto first = std::find_if(s.tables.begin(), s.tables.end(), [&](const Table& t) { return is_source(t.name); });
    const auto pos = first - s.tables.begin();
    std::vector<ForeignKey> fks;
    for (const auto& fk : s.foreign_keys) {
        const bool is_link = std::any_of(plan.join_links.begin(), plan.join_links.end(), [&](const ForeignKey& l) {
            return iequals(l.child_table, fk.child_table) && iequals(l.child_column, fk.child_column) &&
                   iequals(l.parent_table, fk.parent_table) && iequals(l.parent_column, fk.parent_column);
        });
        if (is_link) continue;
        ForeignKey out = fk;
        if (is_source(fk.child_table)) {
            out.child_table = plan.merged_name;
            out.child_column = *layout.target(fk.child_table, fk.child_column);
        }
        if (is_source(fk.parent_table)) {
            out.parent_table = plan.merged_name;
            out.parent_column = *layout.target(fk.parent_table, fk.parent_column);
        }
        if (iequals(out.child_table, out.parent_table) && iequals(out.child_column, out.parent_column)) continue;
        if (std::find(fks.begin(), fks.end(), out) == fks.end()) fks.push_back(out);
    }
    s.foreign_keys = std::move(fks);
    std::erase_if(s.tables, [&](const Table& t) { return is_source(t.name); });
    s.tables.insert(s.tables.begin() + std::min<std::ptrdiff_t>(pos, static_cast<std::ptrdiff_t>(s.tables.size())),
                    layout.table);
}

}  // namespace

Schema apply_to_schema(const Schema& base, const EvolutionRecord& record) {
    Schema s = base;
    switch (record.ptype) {
        case PerturbationType::AddColumns:
            for (const auto& a : record.added_columns) {
                Table& t = require_table(s, a.table);
                if (a.position > t.columns.size()) throw MigrationUnsupported("added column position out of range");
                t.columns.insert(t.columns.begin() + static_cast<std::ptrdiff_t>(a.position), a.column);
            }
            break;
        case PerturbationType::RemoveColumns:
        case PerturbationType::RemoveColumnsInSql:
            for (const auto& r : record.removed) remove_column(s, r.table, r.column);
            prune_dangling_fks(s);
            break;
        case PerturbationType::RenameColumns:
        case PerturbationType::RenameTables:
            apply_renames(s, record.renames);
            break;
        case PerturbationType::SplitColumns:
            for (const auto& spec : record.column_splits) {
                Table& t = require_table(s, spec.table);
                auto idx = t.column_index(spec.column);
                if (!idx) throw MigrationUnsupported("split column " + spec.column + " missing");
                const Column original = t.columns[*idx];
                t.columns.erase(t.columns.begin() + static_cast<std::ptrdiff_t>(*idx));
                std::vector<Column> comps;
                for (const auto& name : spec.components) comps.push_back({name, "TEXT", original.nullable});
                t.columns.insert(t.columns.begin() + static_cast<std::ptrdiff_t>(*idx), comps.begin(), comps.end());
            }
            prune_dangling_fks(s);
            break;
        case PerturbationType::MergeColumns:
            for (const auto& spec : record.column_merges) {
                Table& t = require_table(s, spec.table);
                auto idx = t.column_index(spec.components.front());
                if (!idx) throw MigrationUnsupported("merge component missing");
                bool nullable = false;
                for (const auto& comp : spec.components) {
                    const Column* c = t.find_column(comp);
                    if (!c) throw MigrationUnsupported("merge component " + comp + " missing");
                    nullable |= c->nullable;
                }
                const std::size_t pos = *idx;
                for (const auto& comp : spec.components) remove_column(s, spec.table, comp);
                Table& tt = require_table(s, spec.table);
                tt.columns.insert(tt.columns.begin() + static_cast<std::ptrdiff_t>(std::min(pos, tt.columns.size())),
                                  Column{spec.merged, spec.kind == CompositeKind::Date ? "DATE" : "TEXT", nullable});
            }
            prune_dangling_fks(s);
            break;
        case PerturbationType::AddTables:
            for (const auto& a : record.added_tables) {
                s.tables.push_back(a.table);
                for (const auto& fk : a.foreign_keys) s.foreign_keys.push_back(fk);
            }
            break;
        case PerturbationType::RemoveTables:
            for (const auto& r : record.removed) {
                require_table(s, r.table);
                std::erase_if(s.tables, [&](const Table& t) { return iequals(t.name, r.table); });
            }
            prune_dangling_fks(s);
            break;
        case PerturbationType::SplitTables:
            if (!record.split_plan) throw MigrationUnsupported("split_tables record without a plan");
            apply_split(s, *record.split_plan);
            break;
        case PerturbationType::MergeTables:
            if (!record.merge_plan) throw MigrationUnsupported("merge_tables record without a plan");
            apply_merge(s, *record.merge_plan);
            break;
    }
    canonicalize_fk_order(s);
    return s;
}

}  // namespace schemashift
