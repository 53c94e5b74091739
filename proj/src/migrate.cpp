#include <algorithm>
#include <map>

#include "generate.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/patterns.hpp"
#include "schemashift/random.hpp"

namespace schemashift {

namespace {

// Rows of one table together with its current column names, edited in
// lockstep with the schema transformation.
struct Working {
    std::vector<std::string> columns;
    std::vector<Row> rows;

    std::size_t index(std::string_view column) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (iequals(columns[i], column)) return i;
        throw MigrationUnsupported("column " + std::string(column) + " missing during migration");
    }
    void erase(std::size_t i) {
        columns.erase(columns.begin() + static_cast<std::ptrdiff_t>(i));
        for (auto& r : rows) r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
    }
};

using Tables = std::map<std::string, Working, ILess>;

Tables load(const Database& db) {
    Tables out;
    for (const auto& t : db.schema.tables) {
        Working w;
        for (const auto& c : t.columns) w.columns.push_back(c.name);
        if (auto it = db.rows.find(t.name); it != db.rows.end()) w.rows = it->second;
        out[t.name] = std::move(w);
    }
    return out;
}

Working& require(Tables& tables, std::string_view name) {
    auto it = tables.find(name);
    if (it == tables.end()) throw MigrationUnsupported("table " + std::string(name) + " missing during migration");
    return it->second;
}

std::vector<Value> split_value(const Value& v, std::size_t n, const std::string& delimiter) {
    if (v.is_null()) return std::vector<Value>(n);
    const std::string text = to_text(v);
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (true) {
        const auto p = delimiter.empty() ? std::string::npos : text.find(delimiter, start);
        if (p == std::string::npos || tokens.size() + 1 == n) {
            tokens.push_back(text.substr(start));
            break;
        }
        tokens.push_back(text.substr(start, p - start));
        start = p + delimiter.size();
    }
    std::vector<Value> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(i < tokens.size() ? tokens[i] : std::string());
    return out;
}

std::vector<Row> merge_rows(const Database& db, const MergePlan& plan, const MergedLayout& layout) {
    const Schema& s = db.schema;
    std::vector<const Table*> order;
    std::vector<const Table*> left;
    for (const auto& name : plan.source_tables) left.push_back(s.find_table(name));
    order.push_back(left.front());
    left.erase(left.begin());
    auto in_order = [&](std::string_view name) {
        return std::any_of(order.begin(), order.end(), [&](const Table* t) { return iequals(t->name, name); });
    };
    while (!left.empty()) {
        auto next = std::find_if(left.begin(), left.end(), [&](const Table* t) {
            return std::any_of(plan.join_links.begin(), plan.join_links.end(), [&](const ForeignKey& l) {
                return (iequals(l.child_table, t->name) && in_order(l.parent_table)) ||
                       (iequals(l.parent_table, t->name) && in_order(l.child_table));
            });
        });
        if (next == left.end()) throw MigrationUnsupported("merge sources are not connected by join links");
        order.push_back(*next);
        left.erase(next);
    }

    auto position = [&](std::string_view name) {
        for (std::size_t i = 0; i < order.size(); ++i)
            if (iequals(order[i]->name, name)) return i;
        throw MigrationUnsupported("join link outside merge sources");
    };
    static const std::vector<Row> kEmpty;
    auto rows_of = [&](const Table* t) -> const std::vector<Row>& {
        auto it = db.rows.find(t->name);
        return it == db.rows.end() ? kEmpty : it->second;
    };

    std::vector<std::vector<const Row*>> combos(1);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Table* t = order[k];
        struct Check {
            std::size_t other, other_col, col;
            Affinity other_aff, aff;
        };
        std::vector<Check> checks;
        for (const auto& l : plan.join_links) {
            const bool child_here = iequals(l.child_table, t->name);
            const bool parent_here = iequals(l.parent_table, t->name);
            if (!child_here && !parent_here) continue;
            const std::string& other = child_here ? l.parent_table : l.child_table;
            const std::size_t o = position(other);
            if (o >= k) continue;
            const Table* ot = order[o];
            const std::size_t oc = *ot->column_index(child_here ? l.parent_column : l.child_column);
            const std::size_t c = *t->column_index(child_here ? l.child_column : l.parent_column);
            checks.push_back({o, oc, c, affinity_of(ot->columns[oc].data_type), affinity_of(t->columns[c].data_type)});
        }
        std::vector<std::vector<const Row*>> next;
        for (const auto& combo : combos) {
            for (const Row& r : rows_of(t)) {
                bool ok = true;
                for (const auto& ch : checks) {
                    const auto cmp = compare_affinity((*combo[ch.other])[ch.other_col], ch.other_aff, r[ch.col], ch.aff);
                    if (!cmp || *cmp != 0) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                auto extended = combo;
                extended.push_back(&r);
                next.push_back(std::move(extended));
            }
        }
        combos = std::move(next);
    }

    // Merged column -> (source position, column index) of its first contributor.
    std::vector<std::pair<std::size_t, std::size_t>> from(layout.table.columns.size(), {SIZE_MAX, 0});
    for (const auto& [src, target] : layout.mapping) {
        const auto tc = layout.table.column_index(target);
        if (!tc || from[*tc].first != SIZE_MAX) continue;
        const std::size_t p = position(src.first);
        from[*tc] = {p, *order[p]->column_index(src.second)};
    }
    std::vector<Row> out;
    for (const auto& combo : combos) {
        Row row;
        for (const auto& [p, c] : from) row.push_back(p == SIZE_MAX ? Value() : (*combo[p])[c]);
        out.push_back(std::move(row));
    }
    return out;
}

std::size_t typical_rows(const Database& db) {
    std::size_t n = 0;
    for (const auto& [_, rows] : db.rows) n = std::max(n, rows.size());
    return n ? n : PopulateConfig{}.rows_per_table;
}

}  // namespace

Database migrate(const Database& db, const EvolutionRecord& record, std::uint64_t seed) {
    Database out;
    out.schema = apply_to_schema(db.schema, record);
    Tables tables = load(db);

    switch (record.ptype) {
        case PerturbationType::AddColumns:
            for (const auto& a : record.added_columns) {
                Working& w = require(tables, a.table);
                if (a.position > w.columns.size()) throw MigrationUnsupported("added column position out of range");
                auto rng = make_stream(seed, "add_column", a.table, a.column.name);
                w.columns.insert(w.columns.begin() + static_cast<std::ptrdiff_t>(a.position), a.column.name);
                for (auto& r : w.rows)
                    r.insert(r.begin() + static_cast<std::ptrdiff_t>(a.position), detail::random_value(a.column, rng, true));
            }
            break;
        case PerturbationType::RemoveColumns:
        case PerturbationType::RemoveColumnsInSql:
            for (const auto& r : record.removed) {
                Working& w = require(tables, r.table);
                w.erase(w.index(r.column));
            }
            break;
        case PerturbationType::RenameColumns:
        case PerturbationType::RenameTables: {
            Tables renamed;
            for (auto& [name, w] : tables) {
                for (auto& c : w.columns)
                    if (auto n = record.renames.column_target(name, c)) c = *n;
                renamed[record.renames.table_target(name).value_or(name)] = std::move(w);
            }
            tables = std::move(renamed);
            break;
        }
        case PerturbationType::SplitColumns:
            for (const auto& spec : record.column_splits) {
                Working& w = require(tables, spec.table);
                const std::size_t idx = w.index(spec.column);
                const auto n = spec.components.size();
                w.columns.erase(w.columns.begin() + static_cast<std::ptrdiff_t>(idx));
                w.columns.insert(w.columns.begin() + static_cast<std::ptrdiff_t>(idx), spec.components.begin(),
                                 spec.components.end());
                for (auto& r : w.rows) {
                    auto parts = split_value(r[idx], n, spec.delimiter);
                    r.erase(r.begin() + static_cast<std::ptrdiff_t>(idx));
                    r.insert(r.begin() + static_cast<std::ptrdiff_t>(idx), parts.begin(), parts.end());
                }
            }
            break;
        case PerturbationType::MergeColumns:
            for (const auto& spec : record.column_merges) {
                Working& w = require(tables, spec.table);
                const std::size_t pos = w.index(spec.components.front());
                std::vector<std::size_t> idx;
                for (const auto& c : spec.components) idx.push_back(w.index(c));
                const Affinity aff = affinity_of(spec.kind == CompositeKind::Date ? "DATE" : "TEXT");
                std::vector<Value> merged;
                for (const auto& r : w.rows) {
                    std::string joined;
                    bool null = false;
                    for (std::size_t k = 0; k < idx.size(); ++k) {
                        if (r[idx[k]].is_null()) null = true;
                        if (k) joined += spec.delimiter;
                        joined += to_text(r[idx[k]]);
                    }
                    merged.push_back(null ? Value() : apply_affinity(Value(joined), aff));
                }
                std::vector<std::size_t> desc = idx;
                std::sort(desc.rbegin(), desc.rend());
                for (auto i : desc) w.erase(i);
                const std::size_t at = std::min(pos, w.columns.size());
                w.columns.insert(w.columns.begin() + static_cast<std::ptrdiff_t>(at), spec.merged);
                for (std::size_t r = 0; r < w.rows.size(); ++r)
                    w.rows[r].insert(w.rows[r].begin() + static_cast<std::ptrdiff_t>(at), merged[r]);
            }
            break;
        case PerturbationType::AddTables:
            break;
        case PerturbationType::RemoveTables:
            for (const auto& r : record.removed) tables.erase(r.table);
            break;
        case PerturbationType::SplitTables: {
            const SplitPlan& plan = *record.split_plan;
            Working source = require(tables, plan.source_table);
            tables.erase(plan.source_table);
            const Table* st = db.schema.find_table(plan.source_table);
            for (const auto& p : plan.parts) {
                Working part;
                std::vector<std::size_t> keep;
                for (std::size_t i = 0; i < st->columns.size(); ++i) {
                    const auto& name = st->columns[i].name;
                    const bool owned = std::any_of(p.columns.begin(), p.columns.end(),
                                                   [&](const std::string& x) { return iequals(x, name); });
                    if (owned || st->is_pk_member(name)) {
                        keep.push_back(i);
                        part.columns.push_back(name);
                    }
                }
                for (const auto& r : source.rows) {
                    Row row;
                    for (auto i : keep) row.push_back(r[i]);
                    part.rows.push_back(std::move(row));
                }
                tables[p.name] = std::move(part);
            }
            break;
        }
        case PerturbationType::MergeTables: {
            const MergePlan& plan = *record.merge_plan;
            const MergedLayout layout = merged_layout(db.schema, plan);
            Working merged;
            for (const auto& c : layout.table.columns) merged.columns.push_back(c.name);
            merged.rows = merge_rows(db, plan, layout);
            for (const auto& s : plan.source_tables) tables.erase(s);
            tables[plan.merged_name] = std::move(merged);
            break;
        }
    }

    for (const auto& t : out.schema.tables) {
        auto it = tables.find(t.name);
        if (it == tables.end()) continue;
        const Working& w = it->second;
        if (w.columns.size() != t.columns.size())
            throw MigrationUnsupported("migrated layout of " + t.name + " does not match the evolved schema");
        for (std::size_t i = 0; i < w.columns.size(); ++i)
            if (!iequals(w.columns[i], t.columns[i].name))
                throw MigrationUnsupported("migrated layout of " + t.name + " does not match the evolved schema");
        out.rows[t.name] = w.rows;
    }
    if (record.ptype == PerturbationType::AddTables) {
        std::vector<std::string> added;
        for (const auto& a : record.added_tables) added.push_back(a.table.name);
        detail::fill_tables(out, added, typical_rows(db), seed ^ 0xadd7ab1e5ull);
    }
    return out;
}

}  // namespace schemashift
