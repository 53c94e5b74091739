#include "generators.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "schemashift/errors.hpp"
#include "schemashift/random.hpp"

namespace schemashift::testkit {

namespace {

constexpr std::array kTableNames = {
    "customer", "orders",  "product", "supplier", "employee", "store",  "region",  "invoice",
    "payment",  "shipment", "account", "branch",  "course",   "student", "teacher", "club",
    "team",     "player",  "venue",   "author",  "book",     "library", "member",  "Group",
};

struct PlainColumn {
    const char* name;
    const char* type;
};
constexpr std::array kPlain = {
    PlainColumn{"title", "TEXT"},        PlainColumn{"price", "REAL"},         PlainColumn{"quantity", "INTEGER"},
    PlainColumn{"amount", "NUMERIC"},    PlainColumn{"status", "VARCHAR(20)"}, PlainColumn{"category", "TEXT"},
    PlainColumn{"rating", "REAL"},       PlainColumn{"score", "INTEGER"},      PlainColumn{"description", "TEXT"},
    PlainColumn{"email", "TEXT"},        PlainColumn{"phone", "TEXT"},         PlainColumn{"created_at", "DATE"},
    PlainColumn{"code", "TEXT"},         PlainColumn{"level", "int"},          PlainColumn{"weight", "double"},
    PlainColumn{"age", "INTEGER"},       PlainColumn{"salary", "REAL"},        PlainColumn{"notes", "TEXT"},
    PlainColumn{"color", "TEXT"},        PlainColumn{"size", "INTEGER"},       PlainColumn{"country", "TEXT"},
    PlainColumn{"Order", "INTEGER"},     PlainColumn{"unit cost", "REAL"},     PlainColumn{"label", ""},
};

bool chance(std::mt19937_64& rng, double p) { return unit(rng) < p; }

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
    return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(v.size()) - 1))];
}

bool add_column(Table& t, std::string name, std::string type, bool nullable) {
    if (t.has_column(name)) return false;
    t.columns.push_back({std::move(name), std::move(type), nullable});
    return true;
}

void add_shaped(Table& t, std::mt19937_64& rng) {
    switch (uniform(rng, 0, 5)) {
        case 0: add_column(t, "full_name", "TEXT", false); break;
        case 1: add_column(t, "birth_date", "DATE", chance(rng, 0.5)); break;
        case 2: add_column(t, "address", "TEXT", true); break;
        case 3:
            if (!t.has_column("first_name") && !t.has_column("last_name")) {
                add_column(t, "first_name", "TEXT", false);
                add_column(t, "last_name", "TEXT", false);
            }
            break;
        case 4:
            if (!t.has_column("street") && !t.has_column("city") && !t.has_column("state")) {
                add_column(t, "street", "TEXT", true);
                add_column(t, "city", "TEXT", true);
                add_column(t, "state", "TEXT", true);
            }
            break;
        default:
            if (!t.has_column("start_year")) {
                add_column(t, "start_year", "TEXT", true);
                add_column(t, "start_month", "TEXT", true);
                add_column(t, "start_day", "TEXT", true);
            }
    }
}

}  // namespace

Schema random_schema(std::mt19937_64& rng, const SchemaGenConfig& cfg) {
    Schema s;
    s.db_id = "gen";
    std::vector<std::string> names(kTableNames.begin(), kTableNames.end());
    shuffle(names, rng);
    const auto n = static_cast<std::size_t>(uniform(rng, 1, cfg.max_tables));
    const auto max_cols = static_cast<std::size_t>(cfg.max_columns);

    for (std::size_t i = 0; i < n; ++i) {
        Table t;
        t.name = names[i];
        const std::string stem = lower(t.name);
        const double r = unit(rng);
        std::vector<const Table*> keyed;
        for (const auto& p : s.tables)
            if (p.primary_key.size() == 1) keyed.push_back(&p);
        if (r < 0.1 && keyed.size() >= 2) {
            // Junction table keyed by two foreign keys.
            std::vector<const Table*> ps = keyed;
            shuffle(ps, rng);
            for (int k = 0; k < 2; ++k) {
                const Table* p = ps[static_cast<std::size_t>(k)];
                const Column* pk = p->find_column(p->primary_key[0]);
                std::string col = pk->name;
                if (t.has_column(col)) col = lower(p->name) + "_" + col;
                add_column(t, col, pk->data_type, false);
                t.primary_key.push_back(col);
                s.foreign_keys.push_back({t.name, col, p->name, pk->name});
            }
        } else if (r < 0.18) {
            add_column(t, stem + "_code", "TEXT", false);
            add_column(t, stem + "_seq", "INTEGER", false);
            t.primary_key = {stem + "_code", stem + "_seq"};
        } else if (r < 0.93) {
            const std::string pk = chance(rng, 0.8) ? stem + "_id" : "id";
            add_column(t, pk, "INTEGER", false);
            t.primary_key = {pk};
        }
        for (const Table* p : keyed) {
            if (t.columns.size() >= max_cols || !chance(rng, 0.35)) continue;
            const Column* pk = p->find_column(p->primary_key[0]);
            std::string col = pk->name;
            if (iequals(col, "id") || t.has_column(col)) col = lower(p->name) + "_ref";
            if (!add_column(t, col, pk->data_type, chance(rng, 0.5))) continue;
            s.foreign_keys.push_back({t.name, col, p->name, pk->name});
        }
        if (t.columns.size() < max_cols && chance(rng, cfg.shaped_columns)) add_shaped(t, rng);
        std::vector<PlainColumn> plain(kPlain.begin(), kPlain.end());
        shuffle(plain, rng);
        const auto room = max_cols > t.columns.size() ? max_cols - t.columns.size() : 0;
        const auto want = room ? static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(room))) : 0;
        for (std::size_t k = 0, added = 0; k < plain.size() && added < want; ++k)
            if (add_column(t, plain[k].name, plain[k].type, chance(rng, 0.7))) ++added;
        if (t.columns.empty()) add_column(t, "title", "TEXT", true);
        s.tables.push_back(std::move(t));
    }

    if (cfg.allow_cycles) {
        for (auto& t : s.tables) {
            if (t.columns.size() >= max_cols) continue;
            if (t.primary_key.size() == 1 && chance(rng, 0.08)) {
                const Column* pk = t.find_column(t.primary_key[0]);
                const std::string col = "parent_" + lower(t.name) + "_id";
                const std::string type = pk->data_type;
                const std::string pk_name = pk->name;
                if (add_column(t, col, type, true)) s.foreign_keys.push_back({t.name, col, t.name, pk_name});
            } else if (chance(rng, 0.1)) {
                std::vector<const Table*> later;
                bool seen = false;
                for (const auto& p : s.tables) {
                    if (&p == &t) seen = true;
                    else if (seen && p.primary_key.size() == 1) later.push_back(&p);
                }
                if (later.empty()) continue;
                const Table* p = pick(later, rng);
                const Column* pk = p->find_column(p->primary_key[0]);
                const std::string col = lower(p->name) + "_link";
                const std::string type = pk->data_type;
                const ForeignKey fk{t.name, col, p->name, pk->name};
                if (add_column(t, col, type, chance(rng, 0.7))) s.foreign_keys.push_back(fk);
            }
        }
    }
    canonicalize_fk_order(s);
    const auto violations = validate(s);
    if (!violations.empty()) throw std::logic_error("schema generator produced an invalid schema: " + violations[0].path);
    return s;
}

namespace {

struct Source {
    const Table* table;
    std::string ref;  // alias, or the table name
    bool left = false;
};

class QueryBuilder {
public:
    QueryBuilder(const Database& db, std::mt19937_64& rng, const QueryGenConfig& cfg)
        : db_(db), rng_(rng), cfg_(cfg) {}

    std::string build(const Table& base) {
        std::string q = core(base, true);
        if (cfg_.allow_compound && !ordered_ && chance(rng_, 0.2) && arity_ > 0 && !star_) {
            const std::string ops[] = {" UNION ", " UNION ALL ", " INTERSECT ", " EXCEPT "};
            const std::size_t a = arity_;
            std::string rhs;
            for (int tries = 0; tries < 5; ++tries) {
                QueryBuilder other(db_, rng_, cfg_);
                other.force_arity_ = a;
                rhs = other.core(base, false);
                if (other.arity_ == a) break;
                rhs.clear();
            }
            if (!rhs.empty()) q += ops[uniform(rng_, 0, 3)] + rhs;
        }
        return q;
    }

private:
    std::string quote(const std::string& s) { return quote_ident(s); }

    std::string col(const Source& s, const std::string& column, bool qualify) {
        return qualify ? quote(s.ref) + "." + quote(column) : quote(column);
    }

    const std::vector<Row>& rows(const Table& t) {
        static const std::vector<Row> kEmpty;
        auto it = db_.rows.find(t.name);
        return it == db_.rows.end() ? kEmpty : it->second;
    }

    std::string literal_for(const Source& s, std::size_t ci) {
        const auto& rs = rows(*s.table);
        std::vector<Value> vals;
        for (const auto& r : rs)
            if (!r[ci].is_null()) vals.push_back(r[ci]);
        if (vals.empty() || chance(rng_, 0.1)) {
            const Affinity a = affinity_of(s.table->columns[ci].data_type);
            if (a == Affinity::Text || a == Affinity::None) return "'zzz'";
            return std::to_string(uniform(rng_, 0, 30));
        }
        const Value& v = pick(vals, rng_);
        if (v.is_text()) return sql_literal(v);
        return to_text(v);
    }

    bool numeric(const Table& t, std::size_t ci) {
        const Affinity a = affinity_of(t.columns[ci].data_type);
        return a == Affinity::Integer || a == Affinity::Real || (a == Affinity::Numeric && upper(t.columns[ci].data_type).find("DATE") == std::string::npos);
    }

    std::pair<const Source*, std::size_t> any_column() {
        const Source& s = pick(sources_, rng_);
        return {&s, static_cast<std::size_t>(uniform(rng_, 0, static_cast<std::int64_t>(s.table->columns.size()) - 1))};
    }

    std::string predicate(int depth) {
        auto [s, ci] = any_column();
        const std::string c = col(*s, s->table->columns[ci].name, qualify_);
        const int kind = static_cast<int>(uniform(rng_, 0, depth > 0 ? 11 : 9));
        switch (kind) {
            case 0:
            case 1: return c + " = " + literal_for(*s, ci);
            case 2: {
                const char* ops[] = {" > ", " < ", " >= ", " <= ", " <> "};
                return c + ops[uniform(rng_, 0, 4)] + literal_for(*s, ci);
            }
            case 3: return c + (chance(rng_, 0.5) ? " IS NULL" : " IS NOT NULL");
            case 4: return c + " IN (" + literal_for(*s, ci) + ", " + literal_for(*s, ci) + ")";
            case 5: return c + " BETWEEN " + literal_for(*s, ci) + " AND " + literal_for(*s, ci);
            case 6: {
                std::string lit = literal_for(*s, ci);
                if (lit.size() >= 3 && lit.front() == '\'') return c + " LIKE " + lit.substr(0, 3) + "%'";
                return c + " LIKE '%" + (lit.empty() ? std::string("1") : lit.substr(0, 1)) + "%'";
            }
            case 7: return "NOT " + c + " = " + literal_for(*s, ci);
            case 8:
                if (numeric(*s->table, ci)) return c + " + 1 > " + literal_for(*s, ci);
                return "LENGTH(" + c + ") > " + std::to_string(uniform(rng_, 2, 8));
            case 9: return "(" + predicate(depth + 1) + " OR " + predicate(depth + 1) + ")";
            default: {
                if (!cfg_.allow_subqueries) return c + " IS NOT NULL";
                // Membership in a FK-related table.
                for (const auto& fk : db_.schema.foreign_keys) {
                    if (iequals(fk.parent_table, s->table->name) && chance(rng_, 0.5)) {
                        const auto pi = s->table->column_index(fk.parent_column);
                        return col(*s, s->table->columns[*pi].name, qualify_) + (chance(rng_, 0.3) ? " NOT IN" : " IN") +
                               " (SELECT " + quote(fk.child_column) + " FROM " + quote(fk.child_table) + ")";
                    }
                    if (iequals(fk.child_table, s->table->name) && chance(rng_, 0.5)) {
                        const auto ci2 = s->table->column_index(fk.child_column);
                        return col(*s, s->table->columns[*ci2].name, qualify_) + " IN (SELECT " +
                               quote(fk.parent_column) + " FROM " + quote(fk.parent_table) + ")";
                    }
                }
                if (numeric(*s->table, ci))
                    return c + " > (SELECT AVG(" + quote(s->table->columns[ci].name) + ") FROM " +
                           quote(s->table->name) + ")";
                return "EXISTS (SELECT 1 FROM " + quote(s->table->name) + " WHERE " + quote(s->table->columns[ci].name) +
                       " IS NOT NULL)";
            }
        }
    }

    std::string scalar_item(const Source& s, std::size_t ci) {
        const std::string c = col(s, s.table->columns[ci].name, qualify_);
        switch (uniform(rng_, 0, 9)) {
            case 0: return "UPPER(" + c + ")";
            case 1: return "SUBSTR(" + c + ", " + std::to_string(uniform(rng_, -2, 3)) + ", " + std::to_string(uniform(rng_, 1, 4)) + ")";
            case 2: return "LENGTH(" + c + ")";
            case 3: return "CAST(" + c + " AS TEXT)";
            case 4: return c + " || '-' || " + c;
            case 5: return "COALESCE(" + c + ", 0)";
            case 6: return numeric(*s.table, ci) ? c + " * 2 - 1" : "LOWER(" + c + ")";
            case 7: return numeric(*s.table, ci) ? "CAST(" + c + " AS REAL) / 3" : "REPLACE(" + c + ", 'a', 'o')";
            case 8: return "CASE WHEN " + c + " > " + literal_for(s, ci) + " THEN 'hi' ELSE 'lo' END";
            default: return "IIF(" + c + " IS NULL, 'none', " + c + ")";
        }
    }

    std::string core(const Table& base, bool outer) {
        sources_.clear();
        const bool alias = cfg_.allow_aliases && chance(rng_, 0.6);
        std::string from;
        auto ref_for = [&](const Table& t) { return alias ? "T" + std::to_string(sources_.size() + 1) : t.name; };
        sources_.push_back({&base, ref_for(base)});
        from = quote(base.name) + (alias ? " AS " + sources_.back().ref : "");
        std::string comma_where;
        const int joins = chance(rng_, 0.55) ? (chance(rng_, 0.3) ? 2 : 1) : 0;
        for (int j = 0; j < joins; ++j) {
            std::vector<std::pair<const ForeignKey*, bool>> options;  // (fk, new table is the parent)
            for (const auto& fk : db_.schema.foreign_keys) {
                for (const auto& src : sources_) {
                    if (iequals(fk.child_table, src.table->name) && !iequals(fk.parent_table, fk.child_table))
                        options.push_back({&fk, true});
                    if (iequals(fk.parent_table, src.table->name) && !iequals(fk.parent_table, fk.child_table))
                        options.push_back({&fk, false});
                }
            }
            std::erase_if(options, [&](const auto& o) {
                const std::string& nt = o.second ? o.first->parent_table : o.first->child_table;
                if (alias) return false;
                return std::any_of(sources_.begin(), sources_.end(),
                                   [&](const Source& s) { return iequals(s.table->name, nt); });
            });
            if (options.empty()) break;
            const auto [fk, to_parent] = pick(options, rng_);
            const Table* nt = db_.schema.find_table(to_parent ? fk->parent_table : fk->child_table);
            const std::string& existing_table = to_parent ? fk->child_table : fk->parent_table;
            const Source* old = nullptr;
            for (const auto& s : sources_)
                if (iequals(s.table->name, existing_table)) old = &s;
            const std::string old_ref = old->ref;
            Source ns{nt, ref_for(*nt)};
            const std::string lhs = quote(old_ref) + "." + quote(to_parent ? fk->child_column : fk->parent_column);
            const std::string rhs = quote(ns.ref) + "." + quote(to_parent ? fk->parent_column : fk->child_column);
            const std::string cond = chance(rng_, 0.5) ? lhs + " = " + rhs : rhs + " = " + lhs;
            const std::string table_sql = quote(nt->name) + (alias ? " AS " + ns.ref : "");
            const double r = unit(rng_);
            if (r < 0.12 && cfg_.allow_left_join) {
                ns.left = true;
                from += " LEFT JOIN " + table_sql + " ON " + cond;
            } else if (r < 0.22) {
                from += ", " + table_sql;
                comma_where += (comma_where.empty() ? "" : " AND ") + cond;
            } else {
                from += (chance(rng_, 0.3) ? " INNER JOIN " : " JOIN ") + table_sql + " ON " + cond;
            }
            sources_.push_back(ns);
        }
        qualify_ = sources_.size() > 1 || chance(rng_, 0.4);

        std::string where = comma_where;
        const int preds = static_cast<int>(uniform(rng_, 0, 2));
        for (int p = 0; p < preds; ++p) where += (where.empty() ? "" : " AND ") + predicate(0);

        std::string select, group, having, order;
        const double shape = unit(rng_);
        star_ = false;
        arity_ = 0;
        bool aggregate = false;
        if (force_arity_ == 0 && cfg_.allow_star && shape < 0.1) {
            star_ = true;
            select = chance(rng_, 0.5) || sources_.size() == 1 ? "*" : quote(sources_[0].ref) + ".*";
        } else if (force_arity_ == 0 && shape < 0.4) {
            aggregate = true;
            std::vector<std::string> items;
            if (chance(rng_, 0.5)) {
                auto [s, ci] = any_column();
                const std::string g = col(*s, s->table->columns[ci].name, qualify_);
                group = " GROUP BY " + g;
                items.push_back(g);
                if (chance(rng_, 0.3)) having = " HAVING COUNT(*) > " + std::to_string(uniform(rng_, 0, 2));
            }
            auto [s, ci] = any_column();
            const std::string c = col(*s, s->table->columns[ci].name, qualify_);
            switch (uniform(rng_, 0, 6)) {
                case 0: items.push_back("COUNT(*)"); break;
                case 1: items.push_back("COUNT(DISTINCT " + c + ")"); break;
                case 2: items.push_back("COUNT(" + c + ")"); break;
                case 3: items.push_back(numeric(*s->table, ci) ? "SUM(" + c + ")" : "MAX(" + c + ")"); break;
                case 4: items.push_back(numeric(*s->table, ci) ? "AVG(" + c + ")" : "MIN(" + c + ")"); break;
                case 5: items.push_back("MIN(" + c + ")"); break;
                default:
                    items.push_back(numeric(*s->table, ci) ? "CAST(SUM(" + c + ") AS REAL) / COUNT(*)" : "MAX(" + c + ")");
            }
            for (std::size_t i = 0; i < items.size(); ++i) select += (i ? ", " : "") + items[i];
            arity_ = items.size();
        } else {
            const std::size_t n = force_arity_ ? force_arity_ : static_cast<std::size_t>(uniform(rng_, 1, 3));
            if (force_arity_ == 0 && chance(rng_, 0.2)) select = "DISTINCT ";
            for (std::size_t i = 0; i < n; ++i) {
                auto [s, ci] = any_column();
                std::string item = chance(rng_, 0.25) ? scalar_item(*s, ci) : col(*s, s->table->columns[ci].name, qualify_);
                select += (i ? ", " : "") + item;
            }
            arity_ = n;
        }
        ordered_ = false;
        if (outer && !star_ && arity_ > 0 && chance(rng_, 0.35)) {
            order = " ORDER BY ";
            for (std::size_t i = 0; i < arity_; ++i)
                order += (i ? ", " : "") + std::to_string(i + 1) + (chance(rng_, 0.4) ? " DESC" : "");
            if (chance(rng_, 0.6)) order += " LIMIT " + std::to_string(uniform(rng_, 1, 5));
            ordered_ = true;
        }
        (void)aggregate;
        return "SELECT " + select + " FROM " + from + (where.empty() ? "" : " WHERE " + where) + group + having + order;
    }

    const Database& db_;
    std::mt19937_64& rng_;
    QueryGenConfig cfg_;
    std::vector<Source> sources_;
    bool qualify_ = false;
    bool star_ = false;
    bool ordered_ = false;
    std::size_t arity_ = 0;
    std::size_t force_arity_ = 0;
};

}  // namespace

std::string random_query_on(const Database& db, const std::string& table, std::mt19937_64& rng,
                            const QueryGenConfig& cfg) {
    const Table* t = db.schema.find_table(table);
    if (!t) throw InvalidArgument("no table " + table);
    return QueryBuilder(db, rng, cfg).build(*t);
}

std::string random_query(const Database& db, std::mt19937_64& rng, const QueryGenConfig& cfg) {
    const auto& tables = db.schema.tables;
    if (tables.empty()) return "SELECT 1";
    const Table& t = tables[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(tables.size()) - 1))];
    return random_query_on(db, t.name, rng, cfg);
}

}  // namespace schemashift::testkit
