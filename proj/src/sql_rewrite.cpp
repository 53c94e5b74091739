#include "schemashift/sql_rewrite.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "schemashift/binder.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/ident.hpp"
#include "schemashift/sql_refs.hpp"

namespace schemashift {

using namespace sql;

namespace {

std::vector<Query*> all_blocks(Query& q) {
    std::vector<Query*> out;
    visit_queries(q, [&](Query& b) { out.push_back(&b); });
    return out;
}

template <typename Pred>
bool any_entry(Query& q, Pred pred) {
    bool found = false;
    visit_from_entries(q, [&](FromEntry& e) { found = found || pred(e); });
    return found;
}

template <typename Pred>
void reject_compound(Query& q, Pred pred) {
    for (Query* b : all_blocks(q))
        if (b->is_compound() && any_entry(*b, pred))
            throw UnsupportedShape("set operation over a restructured table");
}

// USING / NATURAL joins that may involve entry `index`.
void reject_using(const SelectCore& core, std::size_t index) {
    for (std::size_t j = index; j < core.from.size(); ++j) {
        const FromEntry& e = core.from[j];
        if (e.natural || !e.using_columns.empty())
            throw UnsupportedShape("USING or NATURAL join over a restructured table");
    }
}

bool is_binary(const Expr& e, std::string_view op) { return e.kind == ExprKind::Binary && e.text == op; }

bool is_string_literal(const Expr& e) { return e.kind == ExprKind::Literal && e.literal == LiteralKind::String; }

void list_conjuncts(Expr* e, std::vector<Expr*>& out) {
    if (!e) return;
    if (is_binary(*e, "AND")) {
        list_conjuncts(e->args[0].get(), out);
        list_conjuncts(e->args[1].get(), out);
        return;
    }
    out.push_back(e);
}

void split_conjuncts(ExprPtr e, std::vector<ExprPtr>& out) {
    if (!e) return;
    if (is_binary(*e, "AND")) {
        split_conjuncts(std::move(e->args[0]), out);
        split_conjuncts(std::move(e->args[1]), out);
        return;
    }
    out.push_back(std::move(e));
}

ExprPtr conjoin(std::vector<ExprPtr> parts) {
    ExprPtr out;
    for (auto& p : parts) out = out ? Expr::binary("AND", std::move(out), std::move(p)) : std::move(p);
    return out;
}

ExprPtr string_literal(std::string s) { return Expr::literal_of(LiteralKind::String, std::move(s)); }

ExprPtr int_literal(int v) { return Expr::literal_of(LiteralKind::Integer, std::to_string(v)); }

SelectItem column_item(const std::string& qualifier, const std::string& name, std::string alias = {}) {
    SelectItem item;
    item.expr = Expr::column(qualifier, name);
    item.alias = std::move(alias);
    return item;
}

// Star items of every core replaced by explicit column lists wherever they
// cover an entry accepted by `covered`; `make` builds the items for those.
using StarMaker = std::function<void(const FromEntry&, int, std::vector<SelectItem>&)>;

void expand_covering_stars(Query& q, const std::function<bool(const FromEntry*)>& covered, const StarMaker& make) {
    for (Query* b : all_blocks(q)) {
        for (auto& core : b->cores) {
            bool needed = false;
            for (const auto& item : core.items)
                if (item.star)
                    for (const auto& sc : expand_star(core, item)) needed = needed || covered(sc.entry);
            if (!needed) continue;
            std::vector<SelectItem> items;
            for (auto& item : core.items) {
                if (!item.star) {
                    items.push_back(std::move(item));
                    continue;
                }
                for (const auto& sc : expand_star(core, item)) {
                    if (covered(sc.entry)) make(*sc.entry, sc.column, items);
                    else items.push_back(column_item(sc.entry->exposed_name(), sc.entry->columns[sc.column]));
                }
            }
            core.items = std::move(items);
        }
    }
}

// Slot-level walk that lets a callback replace expressions in place.
enum class Slot { Item, Group, Order, Nested };
using SlotFn = std::function<bool(ExprPtr&, Slot, SelectItem*)>;

void walk_query(Query& q, const SlotFn& f);

void walk_expr(ExprPtr& e, const SlotFn& f, Slot ctx, SelectItem* item) {
    if (!e) return;
    if (f(e, ctx, item)) return;
    for (auto& a : e->args) walk_expr(a, f, Slot::Nested, nullptr);
    if (e->subquery) walk_query(*e->subquery, f);
}

void walk_query(Query& q, const SlotFn& f) {
    for (auto& core : q.cores) {
        for (auto& item : core.items)
            if (item.expr) walk_expr(item.expr, f, Slot::Item, &item);
        for (auto& entry : core.from) {
            if (entry.subquery) walk_query(*entry.subquery, f);
            walk_expr(entry.on, f, Slot::Nested, nullptr);
        }
        walk_expr(core.where, f, Slot::Nested, nullptr);
        for (auto& g : core.group_by) walk_expr(g, f, Slot::Group, nullptr);
        walk_expr(core.having, f, Slot::Nested, nullptr);
    }
    for (auto& o : q.order_by) walk_expr(o.expr, f, Slot::Order, nullptr);
    walk_expr(q.limit, f, Slot::Nested, nullptr);
    walk_expr(q.offset, f, Slot::Nested, nullptr);
}

// Exposed names in use anywhere in a query, plus schema table names, for
// picking aliases that shadow nothing.
class NameAllocator {
public:
    NameAllocator(const Schema& schema, Query& q) {
        for (const auto& t : schema.tables) reserved_.insert(t.name);
        visit_from_entries(q, [&](FromEntry& e) {
            if (!e.alias.empty()) used_.insert(e.alias);
        });
    }

    // The part's own name when free, else a suffixed alias.
    std::string claim(const std::string& base) {
        if (!used_.count(base)) {
            used_.insert(base);
            return base;
        }
        for (int k = 2;; ++k) {
            std::string candidate = base + "_" + std::to_string(k);
            if (!used_.count(candidate) && !reserved_.count(candidate)) {
                used_.insert(candidate);
                return candidate;
            }
        }
    }

private:
    std::set<std::string, ILess> used_;
    std::set<std::string, ILess> reserved_;
};

std::string spelled_like(std::string_view original, const std::string& name) {
    if (!original.empty()) {
        const char open = original.front();
        if (open == '"' || open == '`') {
            std::string out(1, open);
            for (char c : name) {
                if (c == open) out += open;
                out += c;
            }
            out += open;
            return out;
        }
        if (open == '[') return "[" + name + "]";
    }
    return quote_ident(name);
}

std::optional<std::vector<std::string>> split_exact(const std::string& value, const std::string& delim, std::size_t n) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = delim.empty() ? std::string::npos : value.find(delim, start);
        if (pos == std::string::npos) {
            parts.push_back(value.substr(start));
            break;
        }
        parts.push_back(value.substr(start, pos - start));
        start = pos + delim.size();
    }
    if (parts.size() != n) return std::nullopt;
    for (const auto& p : parts)
        if (p.empty()) return std::nullopt;
    return parts;
}

}  // namespace

// ---------------------------------------------------------------- rename

std::string rewrite_identifiers(std::string_view text, const RenameMap& renames, const Schema& schema) {
    if (renames.empty()) return std::string(text);
    auto q = parse_and_bind(text, schema);

    struct Edit {
        std::size_t offset;
        std::size_t length;
        std::string text;
    };
    std::vector<Edit> edits;
    auto edit = [&](Span span, const std::string& name) {
        if (!span.valid()) return;
        edits.push_back({span.offset, span.length, spelled_like(text.substr(span.offset, span.length), name)});
    };

    // New name of an entry's column, following star projections of derived
    // tables down to the base table.
    std::function<std::optional<std::string>(const FromEntry&, int)> column_target =
        [&](const FromEntry& entry, int column) -> std::optional<std::string> {
        if (entry.is_table()) return renames.column_target(entry.table, entry.columns[column]);
        const SelectCore& core = entry.subquery->cores.front();
        int k = 0;
        for (const auto& item : core.items) {
            if (!item.star) {
                if (k == column) return std::nullopt;
                ++k;
                continue;
            }
            for (const auto& sc : expand_star(core, item)) {
                if (k == column) return column_target(*sc.entry, sc.column);
                ++k;
            }
        }
        return std::nullopt;
    };
    auto renamed_table = [&](const FromEntry& entry) -> std::optional<std::string> {
        if (!entry.is_table()) return std::nullopt;
        return renames.table_target(entry.table);
    };

    std::set<const Query*> label_sensitive;
    for (Query* b : all_blocks(*q)) {
        if (b->is_compound()) label_sensitive.insert(b);
        for (auto& core : b->cores)
            for (auto& entry : core.from)
                if (entry.subquery) label_sensitive.insert(entry.subquery.get());
    }

    for (Query* b : all_blocks(*q)) {
        for (std::size_t ci = 0; ci < b->cores.size(); ++ci) {
            SelectCore& core = b->cores[ci];
            for (std::size_t i = 0; i < core.from.size(); ++i) {
                FromEntry& entry = core.from[i];
                if (auto t = renamed_table(entry)) edit(entry.table_span, *t);
                std::vector<std::string> shared = entry.using_columns;
                if (entry.natural) shared = natural_join_columns(core, i);
                for (const auto& name : shared) {
                    for (std::size_t j = 0; j <= i; ++j) {
                        const FromEntry& side = core.from[j];
                        for (std::size_t c = 0; c < side.columns.size(); ++c)
                            if (iequals(side.columns[c], name) && column_target(side, static_cast<int>(c)))
                                throw UnsupportedShape("renamed column " + name + " used in a USING or NATURAL join");
                    }
                }
            }
            for (auto& item : core.items) {
                if (item.star && !item.star_qualifier.empty()) {
                    for (const auto& entry : core.from) {
                        if (!iequals(entry.exposed_name(), item.star_qualifier)) continue;
                        if (entry.alias.empty())
                            if (auto t = renamed_table(entry)) edit(item.star_qualifier_span, *t);
                    }
                }
                // Keep the output label of bare renamed columns where it is visible.
                if (ci == 0 && label_sensitive.count(b) && item.expr && item.alias.empty() &&
                    item.expr->kind == ExprKind::Column && item.expr->binding.kind == ColumnBinding::Kind::Source &&
                    item.expr->name_span.valid()) {
                    const Expr& e = *item.expr;
                    if (column_target(*e.binding.source, e.binding.column))
                        edits.push_back({e.name_span.offset + e.name_span.length, 0, " AS " + quote_ident(e.name)});
                }
            }
        }
        visit_exprs_shallow(*b, [&](Expr& e) {
            if (e.kind != ExprKind::Column || e.binding.kind != ColumnBinding::Kind::Source) return;
            const FromEntry& src = *e.binding.source;
            if (auto c = column_target(src, e.binding.column)) edit(e.name_span, *c);
            if (!e.qualifier.empty() && src.alias.empty())
                if (auto t = renamed_table(src)) edit(e.qualifier_span, *t);
        });
        // Compound ORDER BY terms naming a star-derived label.
        if (b->is_compound()) {
            const SelectCore& first = b->cores.front();
            for (auto& o : b->order_by) {
                Expr& e = *o.expr;
                if (o.ordinal < 0 || e.kind != ExprKind::Column || !e.qualifier.empty()) continue;
                int k = 0;
                for (const auto& item : first.items) {
                    if (!item.star) {
                        ++k;
                        continue;
                    }
                    for (const auto& sc : expand_star(first, item)) {
                        if (k == o.ordinal)
                            if (auto c = column_target(*sc.entry, sc.column)) edit(e.name_span, *c);
                        ++k;
                    }
                }
            }
        }
    }

    std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.offset > b.offset; });
    std::string out(text);
    std::size_t last = std::string::npos;
    std::size_t last_len = 0;
    for (const auto& e : edits) {
        if (e.offset == last && e.length == last_len && e.length > 0) continue;
        out.replace(e.offset, e.length, e.text);
        last = e.offset;
        last_len = e.length;
    }
    return out;
}

// ---------------------------------------------------------------- table split

std::string rewrite_for_split(std::string_view text, const SplitPlan& plan, const Schema& schema) {
    auto q = parse_and_bind(text, schema);
    auto is_source = [&](const FromEntry& e) { return e.is_table() && iequals(e.table, plan.source_table); };
    if (!any_entry(*q, is_source)) return std::string(text);
    reject_compound(*q, is_source);
    const Table* source = schema.find_table(plan.source_table);

    struct Occurrence {
        SelectCore* core;
        std::size_t index;
        FromEntry* entry;
        std::set<int> columns;
        std::vector<std::size_t> parts;
        std::vector<std::string> exposed;
        bool derived = false;
    };
    std::vector<Occurrence> occs;
    for (Query* b : all_blocks(*q))
        for (auto& core : b->cores)
            for (std::size_t i = 0; i < core.from.size(); ++i)
                if (is_source(core.from[i])) {
                    reject_using(core, i);
                    occs.push_back({&core, i, &core.from[i], {}, {}, {}, false});
                }
    auto find_occ = [&](const FromEntry* e) -> Occurrence* {
        for (auto& o : occs)
            if (o.entry == e) return &o;
        return nullptr;
    };

    std::vector<Expr*> refs;
    visit_exprs(*q, [&](Expr& e) {
        if (e.kind != ExprKind::Column || e.binding.kind != ColumnBinding::Kind::Source) return;
        if (Occurrence* o = find_occ(e.binding.source)) {
            o->columns.insert(e.binding.column);
            refs.push_back(&e);
        }
    });
    for (Query* b : all_blocks(*q))
        for (auto& core : b->cores)
            for (const auto& item : core.items)
                if (item.star)
                    for (const auto& sc : expand_star(core, item))
                        if (Occurrence* o = find_occ(sc.entry)) o->columns.insert(sc.column);

    NameAllocator names(schema, *q);
    for (auto& o : occs) {
        std::set<std::size_t> needed;
        for (int c : o.columns) {
            const std::string& name = o.entry->columns[c];
            if (!source->is_pk_member(name)) needed.insert(*plan.owning_part(name));
        }
        if (needed.empty()) needed.insert(0);
        o.parts.assign(needed.begin(), needed.end());
        o.derived = o.parts.size() > 1 && o.entry->join == JoinKind::Left;
        if (o.derived) {
            o.exposed = {o.entry->exposed_name()};
            continue;
        }
        for (std::size_t k = 0; k < o.parts.size(); ++k) {
            if (k == 0 && !o.entry->alias.empty()) o.exposed.push_back(o.entry->alias);
            else o.exposed.push_back(names.claim(plan.parts[o.parts[k]].name));
        }
    }

    auto qualifier_for = [&](const Occurrence& o, const std::string& column) {
        if (o.derived || source->is_pk_member(column)) return o.exposed.front();
        const std::size_t part = *plan.owning_part(column);
        for (std::size_t k = 0; k < o.parts.size(); ++k)
            if (o.parts[k] == part) return o.exposed[k];
        return o.exposed.front();
    };

    expand_covering_stars(
        *q, [&](const FromEntry* e) { return find_occ(e) != nullptr; },
        [&](const FromEntry& e, int column, std::vector<SelectItem>& items) {
            const std::string& name = e.columns[column];
            items.push_back(column_item(qualifier_for(*find_occ(&e), name), name));
        });
    for (Expr* e : refs) {
        const Occurrence& o = *find_occ(e->binding.source);
        e->qualifier = qualifier_for(o, o.entry->columns[e->binding.column]);
        e->qualifier_span = {};
    }

    auto pk_equal = [&](const std::string& a, const std::string& b) {
        std::vector<ExprPtr> eqs;
        for (const auto& pk : source->primary_key)
            eqs.push_back(Expr::binary("=", Expr::column(a, pk), Expr::column(b, pk)));
        return conjoin(std::move(eqs));
    };

    for (auto it = occs.rbegin(); it != occs.rend(); ++it) {
        Occurrence& o = *it;
        FromEntry& src = o.core->from[o.index];
        const std::vector<std::string> columns = src.columns;
        if (o.parts.size() == 1) {
            const std::string& part = plan.parts[o.parts[0]].name;
            src.table = part;
            src.table_span = {};
            if (src.alias.empty() && !iequals(o.exposed[0], part)) src.alias = o.exposed[0];
            continue;
        }
        if (o.derived) {
            auto sub = std::make_unique<Query>();
            SelectCore core;
            for (int c : o.columns) {
                const std::string& name = columns[c];
                const std::string& owner =
                    source->is_pk_member(name) ? plan.parts[o.parts[0]].name : plan.parts[*plan.owning_part(name)].name;
                core.items.push_back(column_item(owner, name));
            }
            for (std::size_t k = 0; k < o.parts.size(); ++k) {
                FromEntry part;
                part.table = plan.parts[o.parts[k]].name;
                part.join = k == 0 ? JoinKind::First : JoinKind::Inner;
                if (k > 0) part.on = pk_equal(part.table, plan.parts[o.parts[0]].name);
                core.from.push_back(std::move(part));
            }
            sub->cores.push_back(std::move(core));
            src.alias = o.exposed[0];
            src.alias_span = {};
            src.table.clear();
            src.table_span = {};
            src.subquery = std::move(sub);
            continue;
        }
        std::vector<FromEntry> replacement;
        for (std::size_t k = 0; k < o.parts.size(); ++k) {
            FromEntry part;
            part.table = plan.parts[o.parts[k]].name;
            if (!iequals(o.exposed[k], part.table)) part.alias = o.exposed[k];
            if (k == 0) {
                part.join = src.join;
            } else {
                part.join = JoinKind::Inner;
                part.on = pk_equal(o.exposed[k], o.exposed[0]);
            }
            if (k + 1 == o.parts.size() && src.on)
                part.on = Expr::binary("AND", std::move(part.on), std::move(src.on));
            replacement.push_back(std::move(part));
        }
        auto& from = o.core->from;
        from.erase(from.begin() + static_cast<std::ptrdiff_t>(o.index));
        from.insert(from.begin() + static_cast<std::ptrdiff_t>(o.index), std::make_move_iterator(replacement.begin()),
                    std::make_move_iterator(replacement.end()));
    }
    return to_sql(*q);
}

// ---------------------------------------------------------------- table merge

std::string rewrite_for_merge(std::string_view text, const MergePlan& plan, const Schema& schema) {
    auto q = parse_and_bind(text, schema);
    auto is_source = [&](const FromEntry& e) {
        if (!e.is_table()) return false;
        for (const auto& s : plan.source_tables)
            if (iequals(s, e.table)) return true;
        return false;
    };
    if (!any_entry(*q, is_source)) return std::string(text);
    reject_compound(*q, is_source);
    const MergedLayout layout = merged_layout(schema, plan);

    struct Group {
        SelectCore* core;
        std::vector<std::size_t> indices;
        std::vector<FromEntry*> entries;
        std::string exposed;
        std::set<const Expr*> links;
        bool collapse = false;
    };
    std::vector<Group> groups;

    auto child_only = [&](const std::string& table) {
        if (plan.source_tables.size() != 2) return false;
        const Table* t = schema.find_table(table);
        for (const auto& link : plan.join_links) {
            if (iequals(link.parent_table, table)) return false;
            if (iequals(link.child_table, table)) {
                const Column* c = t->find_column(link.child_column);
                if (!c || c->nullable) return false;
            }
        }
        return true;
    };

    for (Query* b : all_blocks(*q)) {
        for (auto& core : b->cores) {
            Group g{&core, {}, {}, {}, {}, false};
            std::set<std::string, ILess> tables;
            for (std::size_t i = 0; i < core.from.size(); ++i) {
                if (!is_source(core.from[i])) continue;
                reject_using(core, i);
                g.indices.push_back(i);
                g.entries.push_back(&core.from[i]);
                tables.insert(core.from[i].table);
            }
            if (g.indices.empty()) continue;
            const FromEntry& first = core.from[g.indices[0]];
            if (g.indices.size() == plan.source_tables.size() && tables.size() == g.indices.size()) {
                for (auto* e : g.entries)
                    if (e->join == JoinKind::Left) throw NeedsReview("outer join over a merged source");
                std::vector<Expr*> candidates;
                list_conjuncts(core.where.get(), candidates);
                for (auto* e : g.entries) list_conjuncts(e->on.get(), candidates);
                auto side_matches = [&](const Expr& side, const std::string& table, const std::string& column) {
                    if (side.kind != ExprKind::Column || side.binding.kind != ColumnBinding::Kind::Source) return false;
                    const FromEntry* src = side.binding.source;
                    if (std::find(g.entries.begin(), g.entries.end(), src) == g.entries.end()) return false;
                    return iequals(src->table, table) && iequals(src->columns[side.binding.column], column);
                };
                for (const auto& link : plan.join_links) {
                    bool found = false;
                    for (Expr* c : candidates) {
                        if (!is_binary(*c, "=") || g.links.count(c)) continue;
                        const Expr& l = *c->args[0];
                        const Expr& r = *c->args[1];
                        if ((side_matches(l, link.child_table, link.child_column) &&
                             side_matches(r, link.parent_table, link.parent_column)) ||
                            (side_matches(r, link.child_table, link.child_column) &&
                             side_matches(l, link.parent_table, link.parent_column))) {
                            g.links.insert(c);
                            found = true;
                            break;
                        }
                    }
                    if (!found) throw NeedsReview("merged sources joined on something other than the plan's link");
                }
                g.collapse = true;
            } else if (g.indices.size() == 1 && child_only(first.table)) {
                g.collapse = false;
            } else {
                throw NeedsReview("query scans a merged source whose rows do not survive the merge one-to-one");
            }
            g.exposed = first.alias.empty() ? plan.merged_name : first.alias;
            groups.push_back(std::move(g));
        }
    }
    auto find_group = [&](const FromEntry* e) -> const Group* {
        for (const auto& g : groups)
            if (std::find(g.entries.begin(), g.entries.end(), e) != g.entries.end()) return &g;
        return nullptr;
    };
    auto target_of = [&](const FromEntry& e, int column) { return *layout.target(e.table, e.columns[column]); };

    // Preserve visible labels of bare columns whose name changes.
    for (Query* b : all_blocks(*q))
        for (auto& core : b->cores)
            for (auto& item : core.items) {
                if (!item.expr || !item.alias.empty() || item.expr->kind != ExprKind::Column) continue;
                const Expr& e = *item.expr;
                if (e.binding.kind != ColumnBinding::Kind::Source || !find_group(e.binding.source)) continue;
                if (!iequals(target_of(*e.binding.source, e.binding.column), e.name)) item.alias = e.name;
            }
    expand_covering_stars(
        *q, [&](const FromEntry* e) { return find_group(e) != nullptr; },
        [&](const FromEntry& e, int column, std::vector<SelectItem>& items) {
            const std::string target = target_of(e, column);
            const std::string& old = e.columns[column];
            items.push_back(column_item(find_group(&e)->exposed, target, iequals(target, old) ? "" : old));
        });
    std::vector<std::pair<Expr*, std::string>> refs;
    visit_exprs(*q, [&](Expr& e) {
        if (e.kind != ExprKind::Column || e.binding.kind != ColumnBinding::Kind::Source) return;
        if (find_group(e.binding.source)) refs.emplace_back(&e, target_of(*e.binding.source, e.binding.column));
    });
    for (auto& [e, target] : refs) {
        e->qualifier = find_group(e->binding.source)->exposed;
        e->name = target;
        e->qualifier_span = {};
        e->name_span = {};
    }

    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
        Group& g = *it;
        auto& from = g.core->from;
        FromEntry& first = from[g.indices[0]];
        if (g.collapse) {
            std::vector<ExprPtr> kept;
            std::vector<ExprPtr> pieces;
            split_conjuncts(std::move(g.core->where), pieces);
            for (auto idx : g.indices) split_conjuncts(std::move(from[idx].on), pieces);
            for (auto& p : pieces)
                if (!g.links.count(p.get())) kept.push_back(std::move(p));
            g.core->where = conjoin(std::move(kept));
            for (std::size_t k = g.indices.size(); k-- > 1;)
                from.erase(from.begin() + static_cast<std::ptrdiff_t>(g.indices[k]));
        }
        first.table = plan.merged_name;
        first.table_span = {};
        first.alias = iequals(g.exposed, plan.merged_name) ? "" : g.exposed;
    }
    return to_sql(*q);
}

// ---------------------------------------------------------------- column split

std::string rewrite_for_column_split(std::string_view text, const ColumnSplitSpec& spec, const Schema& schema) {
    auto q = parse_and_bind(text, schema);
    auto is_target_entry = [&](const FromEntry* e, int column) {
        return e->is_table() && iequals(e->table, spec.table) && iequals(e->columns[column], spec.column);
    };
    auto is_target = [&](const Expr& e) {
        return e.kind == ExprKind::Column && e.binding.kind == ColumnBinding::Kind::Source &&
               is_target_entry(e.binding.source, e.binding.column);
    };

    bool touched = false;
    visit_exprs(*q, [&](Expr& e) { touched = touched || is_target(e); });
    for (Query* b : all_blocks(*q))
        for (auto& core : b->cores) {
            for (const auto& item : core.items)
                if (item.star)
                    for (const auto& sc : expand_star(core, item)) touched = touched || is_target_entry(sc.entry, sc.column);
            for (std::size_t i = 0; i < core.from.size(); ++i) {
                const FromEntry& e = core.from[i];
                std::vector<std::string> shared = e.using_columns;
                if (e.natural) shared = natural_join_columns(core, i);
                for (const auto& name : shared)
                    if (iequals(name, spec.column)) throw NeedsReview("split column used in a USING or NATURAL join");
            }
        }
    if (!touched) return std::string(text);

    auto concat = [&](const std::string& qualifier) {
        ExprPtr out;
        for (const auto& comp : spec.components) {
            ExprPtr c = Expr::column(qualifier, comp);
            out = out ? Expr::binary("||", Expr::binary("||", std::move(out), string_literal(spec.delimiter)), std::move(c))
                      : std::move(c);
        }
        return out;
    };

    expand_covering_stars(
        *q,
        [&](const FromEntry* e) {
            return e->is_table() && iequals(e->table, spec.table);
        },
        [&](const FromEntry& e, int column, std::vector<SelectItem>& items) {
            const std::string& name = e.columns[column];
            if (!iequals(name, spec.column)) {
                items.push_back(column_item(e.exposed_name(), name));
                return;
            }
            SelectItem item;
            item.expr = concat(e.exposed_name());
            item.alias = name;
            items.push_back(std::move(item));
        });

    walk_query(*q, [&](ExprPtr& e, Slot ctx, SelectItem* item) -> bool {
        if (is_target(*e)) {
            if (ctx == Slot::Nested) throw NeedsReview("split column used inside an expression");
            if (ctx == Slot::Item && item->alias.empty()) item->alias = e->name;
            e = concat(e->binding.source->exposed_name());
            return true;
        }
        if (is_binary(*e, "=")) {
            const bool left = is_target(*e->args[0]) && is_string_literal(*e->args[1]);
            const bool right = is_target(*e->args[1]) && is_string_literal(*e->args[0]);
            if (!left && !right) return false;
            const Expr& col = left ? *e->args[0] : *e->args[1];
            const Expr& lit = left ? *e->args[1] : *e->args[0];
            auto parts = split_exact(lit.text, spec.delimiter, spec.components.size());
            if (!parts) throw NeedsReview("literal does not split into the component count");
            const std::string qualifier = col.binding.source->exposed_name();
            std::vector<ExprPtr> eqs;
            for (std::size_t i = 0; i < parts->size(); ++i)
                eqs.push_back(Expr::binary("=", Expr::column(qualifier, spec.components[i]), string_literal((*parts)[i])));
            e = conjoin(std::move(eqs));
            return true;
        }
        return false;
    });
    return to_sql(*q);
}

// ---------------------------------------------------------------- column merge

std::string rewrite_for_column_merge(std::string_view text, const ColumnMergeSpec& spec, const Schema& schema) {
    auto q = parse_and_bind(text, schema);
    auto component_index = [&](const FromEntry* e, int column) -> int {
        if (!e->is_table() || !iequals(e->table, spec.table)) return -1;
        for (std::size_t i = 0; i < spec.components.size(); ++i)
            if (iequals(e->columns[column], spec.components[i])) return static_cast<int>(i);
        return -1;
    };
    auto component_of = [&](const Expr& e) -> int {
        if (e.kind != ExprKind::Column || e.binding.kind != ColumnBinding::Kind::Source) return -1;
        return component_index(e.binding.source, e.binding.column);
    };

    bool touched = false;
    visit_exprs(*q, [&](Expr& e) { touched = touched || component_of(e) >= 0; });
    for (Query* b : all_blocks(*q))
        for (auto& core : b->cores) {
            for (const auto& item : core.items)
                if (item.star)
                    for (const auto& sc : expand_star(core, item))
                        touched = touched || component_index(sc.entry, sc.column) >= 0;
            for (std::size_t i = 0; i < core.from.size(); ++i) {
                const FromEntry& e = core.from[i];
                std::vector<std::string> shared = e.using_columns;
                if (e.natural) shared = natural_join_columns(core, i);
                for (const auto& name : shared)
                    for (const auto& comp : spec.components)
                        if (iequals(name, comp)) throw NeedsReview("merged component used in a USING or NATURAL join");
            }
        }
    if (!touched) return std::string(text);

    const bool date = spec.kind == CompositeKind::Date;
    auto extraction = [&](const std::string& qualifier, int component) -> ExprPtr {
        if (!date || component > 2) throw NeedsReview("component cannot be extracted from the merged column");
        std::vector<ExprPtr> args;
        args.push_back(Expr::column(qualifier, spec.merged));
        args.push_back(int_literal(kDateFields[component].first));
        args.push_back(int_literal(kDateFields[component].second));
        auto cast = std::make_unique<Expr>();
        cast->kind = ExprKind::Cast;
        cast->text = "TEXT";
        cast->args.push_back(Expr::function("SUBSTR", std::move(args)));
        return cast;
    };

    // Equalities on every component of one entry inside a positive boolean
    // context collapse into one equality on the merged column.
    std::function<void(ExprPtr&)> merge_groups = [&](ExprPtr& root) {
        if (!root) return;
        if (is_binary(*root, "OR")) {
            merge_groups(root->args[0]);
            merge_groups(root->args[1]);
            return;
        }
        if (!is_binary(*root, "AND")) return;
        std::vector<ExprPtr> parts;
        split_conjuncts(std::move(root), parts);
        for (auto& p : parts) merge_groups(p);

        std::map<const FromEntry*, std::vector<int>> slots;  // entry -> conjunct index per component
        for (std::size_t i = 0; i < parts.size(); ++i) {
            Expr& p = *parts[i];
            if (!is_binary(p, "=")) continue;
            int comp = -1;
            const Expr* col = nullptr;
            if (is_string_literal(*p.args[1]) && (comp = component_of(*p.args[0])) >= 0) col = p.args[0].get();
            else if (is_string_literal(*p.args[0]) && (comp = component_of(*p.args[1])) >= 0) col = p.args[1].get();
            if (!col) continue;
            auto& v = slots[col->binding.source];
            v.resize(spec.components.size(), -1);
            if (v[comp] < 0) v[comp] = static_cast<int>(i);
        }
        std::set<std::size_t> drop;
        for (auto& [entry, v] : slots) {
            if (std::find(v.begin(), v.end(), -1) != v.end()) continue;
            std::string joined;
            for (std::size_t c = 0; c < v.size(); ++c) {
                const Expr& p = *parts[v[c]];
                const Expr& lit = is_string_literal(*p.args[1]) ? *p.args[1] : *p.args[0];
                if (!spec.delimiter.empty() && lit.text.find(spec.delimiter) != std::string::npos)
                    throw NeedsReview("component literal contains the delimiter");
                if (c) joined += spec.delimiter;
                joined += lit.text;
            }
            parts[v[0]] = Expr::binary("=", Expr::column(entry->exposed_name(), spec.merged), string_literal(joined));
            for (std::size_t c = 1; c < v.size(); ++c) drop.insert(v[c]);
        }
        std::vector<ExprPtr> kept;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (!drop.count(i)) kept.push_back(std::move(parts[i]));
        root = conjoin(std::move(kept));
    };
    auto try_group = [&](ExprPtr& root) { merge_groups(root); };
    for (Query* b : all_blocks(*q))
        for (auto& core : b->cores) {
            try_group(core.where);
            try_group(core.having);
            for (auto& entry : core.from) try_group(entry.on);
        }

    expand_covering_stars(
        *q,
        [&](const FromEntry* e) {
            return e->is_table() && iequals(e->table, spec.table);
        },
        [&](const FromEntry& e, int column, std::vector<SelectItem>& items) {
            const std::string& name = e.columns[column];
            const int comp = component_index(&e, column);
            if (comp < 0) {
                items.push_back(column_item(e.exposed_name(), name));
                return;
            }
            SelectItem item;
            item.expr = extraction(e.exposed_name(), comp);
            item.alias = name;
            items.push_back(std::move(item));
        });

    walk_query(*q, [&](ExprPtr& e, Slot ctx, SelectItem* item) -> bool {
        const int comp = component_of(*e);
        if (comp < 0) return false;
        if (ctx == Slot::Item && item->alias.empty()) item->alias = e->name;
        e = extraction(e->binding.source->exposed_name(), comp);
        return true;
    });
    return to_sql(*q);
}

bool star_covers_table(std::string_view text, std::string_view table, const Schema& schema) {
    auto q = parse_and_bind(text, schema);
    bool covered = false;
    for (Query* b : all_blocks(*q))
        for (auto& core : b->cores)
            for (const auto& item : core.items)
                if (item.star)
                    for (const auto& sc : expand_star(core, item))
                        covered = covered || (sc.entry->is_table() && iequals(sc.entry->table, table));
    return covered;
}

}  // namespace schemashift
