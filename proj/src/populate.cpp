#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "generate.hpp"
#include "schemashift/ddl.hpp"
#include "schemashift/errors.hpp"
#include "schemashift/patterns.hpp"
#include "schemashift/random.hpp"

namespace schemashift {

namespace {

constexpr std::array kWords = {
    "amber", "birch", "cedar", "delta", "ember", "fjord", "grove", "harbor", "iris",  "juniper",
    "kestrel", "lumen", "maple", "nectar", "onyx", "pebble", "quartz", "river", "sierra", "tundra",
};
constexpr std::array kGiven = {"Anna", "Ben", "Clara", "David", "Elena", "Farid", "Grace", "Hugo",
                               "Ines", "Jonas", "Kara", "Liam", "Maya", "Nils", "Olga", "Pavel"};
constexpr std::array kFamily = {"Smith", "Berg", "Costa", "Dahl", "Evans", "Fischer", "Garcia", "Hansen",
                                "Ito",   "Jensen", "Khan", "Lopez", "Moreau", "Novak", "Olsen", "Park"};
constexpr std::array kStreets = {"Oak", "Pine", "Elm", "Lake", "Hill", "Mill", "Park", "Bay"};
constexpr std::array kCities = {"Oslo", "Lyon", "Austin", "Denver", "Porto", "Malmo", "Tampa", "Leeds"};
constexpr std::array kStates = {"CA", "NY", "TX", "WA", "OR", "FL", "IL", "MA"};

template <typename A>
const char* pick(const A& arr, std::mt19937_64& rng) {
    return arr[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(arr.size()) - 1))];
}

std::string two(int v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", v);
    return buf;
}

std::string date_from_days(std::int64_t z) {
    // Days since 1970-01-01 to a civil date.
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = yoe + era * 400;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) ++y;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", static_cast<int>(y), static_cast<int>(m), static_cast<int>(d));
    return buf;
}

enum class Base { Integer, Real, Date, Text };

Base base_kind(const std::string& declared) {
    const std::string t = upper(declared);
    if (t.find("INT") != std::string::npos) return Base::Integer;
    if (t.rfind("REAL", 0) == 0 || t.rfind("FLOAT", 0) == 0 || t.rfind("DOUBLE", 0) == 0 ||
        t.rfind("NUM", 0) == 0 || t.rfind("DEC", 0) == 0)
        return Base::Real;
    if (t.find("DATE") != std::string::npos || t.find("TIME") != std::string::npos) return Base::Date;
    return Base::Text;
}

}  // namespace

namespace detail {

Value random_value(const Column& c, std::mt19937_64& rng, bool allow_null) {
    const ValueShape shape = value_shape(c);
    Value v;
    switch (shape) {
        case ValueShape::FullName: v = std::string(pick(kGiven, rng)) + " " + pick(kFamily, rng); break;
        case ValueShape::GivenName: v = pick(kGiven, rng); break;
        case ValueShape::FamilyName: v = pick(kFamily, rng); break;
        case ValueShape::Date:
            v = std::to_string(uniform(rng, 1950, 2020)) + "-" + two(static_cast<int>(uniform(rng, 1, 12))) + "-" +
                two(static_cast<int>(uniform(rng, 1, 28)));
            break;
        case ValueShape::Address:
            v = std::to_string(uniform(rng, 1, 999)) + " " + pick(kStreets, rng) + " St, " + pick(kCities, rng) +
                ", " + pick(kStates, rng);
            break;
        case ValueShape::Street: v = std::to_string(uniform(rng, 1, 999)) + " " + pick(kStreets, rng) + " St"; break;
        case ValueShape::City: v = pick(kCities, rng); break;
        case ValueShape::State: v = pick(kStates, rng); break;
        case ValueShape::Year: v = std::to_string(uniform(rng, 1950, 2020)); break;
        case ValueShape::Month: v = two(static_cast<int>(uniform(rng, 1, 12))); break;
        case ValueShape::Day: v = two(static_cast<int>(uniform(rng, 1, 28))); break;
        case ValueShape::Plain: {
            if (allow_null && c.nullable && uniform(rng, 0, 9) == 0) return Value();
            switch (base_kind(c.data_type)) {
                case Base::Integer: v = uniform(rng, 1, 20); break;
                case Base::Real: v = static_cast<double>(uniform(rng, 0, 100000)) / 100.0; break;
                case Base::Date: v = date_from_days(uniform(rng, -7300, 18000)); break;
                case Base::Text: v = pick(kWords, rng); break;
            }
            break;
        }
    }
    return apply_affinity(v, affinity_of(c.data_type));
}

Value key_value(const Column& c, std::int64_t k) {
    Value v;
    switch (base_kind(c.data_type)) {
        case Base::Integer: v = k + 1; break;
        case Base::Real: v = static_cast<double>(k + 1); break;
        case Base::Date: v = date_from_days(10957 + k); break;
        case Base::Text:
            v = std::string(kWords[static_cast<std::size_t>(k) % kWords.size()]) + "_" +
                std::to_string(k / static_cast<std::int64_t>(kWords.size()) + 1);
            break;
    }
    return apply_affinity(v, affinity_of(c.data_type));
}

namespace {

struct ValueLess {
    bool operator()(const Value& a, const Value& b) const { return compare_values(a, b) < 0; }
};
struct RowLess {
    bool operator()(const Row& a, const Row& b) const {
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
            if (int c = compare_values(a[i], b[i])) return c < 0;
        return a.size() < b.size();
    }
};

std::vector<Value> distinct_non_null(const std::vector<Row>& rows, std::size_t col) {
    std::set<Value, ValueLess> seen;
    std::vector<Value> out;
    for (const auto& r : rows)
        if (!r[col].is_null() && seen.insert(r[col]).second) out.push_back(r[col]);
    return out;
}

void fill_one(Database& db, const Table& t, const std::set<const ForeignKey*>& nulled, std::size_t n,
              std::uint64_t seed) {
    const Schema& s = db.schema;
    auto rng = make_stream(seed, "populate", t.name);
    const std::size_t width = t.columns.size();

    enum class Source { Plain, Key, Fk, SelfFk, Null };
    std::vector<Source> source(width, Source::Plain);
    std::vector<std::vector<Value>> pools(width);
    std::vector<std::vector<Value>> required(width);
    std::vector<std::size_t> self_parent(width, 0);

    const bool single_pk = t.primary_key.size() == 1;
    for (std::size_t i = 0; i < width; ++i)
        if (single_pk && t.is_pk_member(t.columns[i].name)) source[i] = Source::Key;

    for (const auto& fk : s.foreign_keys) {
        if (iequals(fk.child_table, t.name)) {
            const std::size_t ci = *t.column_index(fk.child_column);
            if (source[ci] == Source::Fk || source[ci] == Source::Null) continue;
            if (nulled.count(&fk)) {
                source[ci] = Source::Null;
                continue;
            }
            if (iequals(fk.parent_table, t.name)) {
                if (!t.is_pk_member(fk.child_column)) {
                    source[ci] = Source::SelfFk;
                    self_parent[ci] = *t.column_index(fk.parent_column);
                }
                continue;
            }
            const Table* parent = s.find_table(fk.parent_table);
            const std::size_t pi = *parent->column_index(fk.parent_column);
            const Affinity aff = affinity_of(t.columns[ci].data_type);
            for (const auto& v : distinct_non_null(db.rows[parent->name], pi)) pools[ci].push_back(apply_affinity(v, aff));
            source[ci] = Source::Fk;
        } else if (iequals(fk.parent_table, t.name)) {
            auto it = db.rows.find(fk.child_table);
            if (it == db.rows.end()) continue;
            const Table* child = s.find_table(fk.child_table);
            const std::size_t ci = *child->column_index(fk.child_column);
            const std::size_t pi = *t.column_index(fk.parent_column);
            const Affinity aff = affinity_of(t.columns[pi].data_type);
            std::set<Value, ValueLess> have(required[pi].begin(), required[pi].end());
            for (const auto& v : distinct_non_null(it->second, ci))
                if (have.insert(apply_affinity(v, aff)).second) required[pi].push_back(apply_affinity(v, aff));
        }
    }

    std::size_t count = n;
    for (const auto& r : required) count = std::max(count, r.size());

    // Single-column keys drawn from a parent pool go without replacement.
    std::vector<Value> key_pool;
    std::size_t key_col = width;
    if (single_pk) {
        key_col = *t.column_index(t.primary_key[0]);
        if (source[key_col] == Source::Fk) {
            key_pool = pools[key_col];
            shuffle(key_pool, rng);
            std::set<Value, ValueLess> have(key_pool.begin(), key_pool.end());
            for (const auto& v : required[key_col])
                if (!have.count(v)) key_pool.push_back(v);
            count = std::min(count, key_pool.size());
        }
    }

    std::vector<std::size_t> pk_cols;
    for (const auto& k : t.primary_key) pk_cols.push_back(*t.column_index(k));

    std::vector<Row> rows;
    std::set<Row, RowLess> used_keys;
    std::set<Value, ValueLess> used_single;
    std::int64_t next_key = 0;
    if (key_col < width) used_single.insert(required[key_col].begin(), required[key_col].end());

    for (std::size_t r = 0; r < count; ++r) {
        bool placed = false;
        for (int attempt = 0; attempt < 30 && !placed; ++attempt) {
            Row row(width);
            bool ok = true;
            for (std::size_t i = 0; i < width && ok; ++i) {
                if (r < required[i].size()) {
                    row[i] = required[i][r];
                    continue;
                }
                switch (source[i]) {
                    case Source::Plain:
                        row[i] = random_value(t.columns[i], rng, !t.is_pk_member(t.columns[i].name));
                        break;
                    case Source::Key:
                        do row[i] = key_value(t.columns[i], next_key++);
                        while (used_single.count(row[i]));
                        break;
                    case Source::Fk:
                        if (i == key_col) {
                            row[i] = key_pool[r];
                        } else if (pools[i].empty()) {
                            if (!t.columns[i].nullable || t.is_pk_member(t.columns[i].name)) ok = false;
                        } else {
                            row[i] = pools[i][static_cast<std::size_t>(
                                uniform(rng, 0, static_cast<std::int64_t>(pools[i].size()) - 1))];
                        }
                        break;
                    case Source::SelfFk:
                    case Source::Null: break;
                }
            }
            if (!ok) break;
            if (!pk_cols.empty()) {
                Row key;
                for (auto k : pk_cols) key.push_back(row[k]);
                if (!used_keys.insert(key).second) continue;
            }
            rows.push_back(std::move(row));
            placed = true;
        }
    }

    for (std::size_t i = 0; i < width; ++i) {
        if (source[i] != Source::SelfFk) continue;
        std::vector<Value> pool = distinct_non_null(rows, self_parent[i]);
        const Affinity aff = affinity_of(t.columns[i].data_type);
        for (auto& row : rows) {
            if (pool.empty() || (t.columns[i].nullable && uniform(rng, 0, 4) == 0)) {
                row[i] = Value();
                continue;
            }
            row[i] = apply_affinity(pool[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(pool.size()) - 1))], aff);
        }
    }
    db.rows[t.name] = std::move(rows);
}

}  // namespace

void fill_tables(Database& db, const std::vector<std::string>& tables, std::size_t n, std::uint64_t seed) {
    const Schema& s = db.schema;
    std::vector<const Table*> pending;
    for (const auto& t : s.tables)
        for (const auto& name : tables)
            if (iequals(t.name, name)) pending.push_back(&t);

    auto is_pending = [&](std::string_view name) {
        return std::any_of(pending.begin(), pending.end(), [&](const Table* t) { return iequals(t->name, name); });
    };
    std::set<const ForeignKey*> nulled;
    while (!pending.empty()) {
        const Table* ready = nullptr;
        for (const Table* t : pending) {
            bool blocked = false;
            for (const auto& fk : s.foreign_keys)
                if (iequals(fk.child_table, t->name) && !iequals(fk.parent_table, t->name) &&
                    is_pending(fk.parent_table) && !nulled.count(&fk))
                    blocked = true;
            if (!blocked) {
                ready = t;
                break;
            }
        }
        if (!ready) {
            const ForeignKey* breaker = nullptr;
            for (const Table* t : pending) {
                for (const auto& fk : s.foreign_keys) {
                    if (!iequals(fk.child_table, t->name) || iequals(fk.parent_table, t->name) ||
                        !is_pending(fk.parent_table) || nulled.count(&fk))
                        continue;
                    const Column* c = t->find_column(fk.child_column);
                    if (c && c->nullable && !t->is_pk_member(c->name)) {
                        breaker = &fk;
                        break;
                    }
                }
                if (breaker) break;
            }
            if (!breaker) throw CyclicFkUnsatisfiable("foreign-key cycle among non-nullable columns");
            nulled.insert(breaker);
            continue;
        }
        fill_one(db, *ready, nulled, n, seed);
        std::erase(pending, ready);
    }
}

}  // namespace detail

Database populate(const Schema& schema, const PopulateConfig& cfg) {
    Database db;
    db.schema = schema;
    std::vector<std::string> names;
    for (const auto& t : schema.tables) names.push_back(t.name);
    detail::fill_tables(db, names, cfg.rows_per_table, cfg.seed);
    return db;
}

std::vector<std::string> Database::check() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : rows)
        if (!schema.find_table(name)) out.push_back("rows for unknown table " + name);
    for (const auto& t : schema.tables) {
        auto it = rows.find(t.name);
        if (it == rows.end()) continue;
        std::set<Row, detail::RowLess> keys;
        for (std::size_t r = 0; r < it->second.size(); ++r) {
            const Row& row = it->second[r];
            if (row.size() != t.columns.size()) {
                out.push_back(t.name + "[" + std::to_string(r) + "]: arity " + std::to_string(row.size()));
                continue;
            }
            if (t.primary_key.empty()) continue;
            Row key;
            for (const auto& k : t.primary_key) key.push_back(row[*t.column_index(k)]);
            if (!keys.insert(key).second) out.push_back(t.name + "[" + std::to_string(r) + "]: duplicate primary key");
        }
    }
    for (const auto& fk : schema.foreign_keys) {
        const Table* child = schema.find_table(fk.child_table);
        const Table* parent = schema.find_table(fk.parent_table);
        if (!child || !parent) continue;
        auto cr = rows.find(child->name);
        auto pr = rows.find(parent->name);
        if (cr == rows.end()) continue;
        const std::size_t ci = *child->column_index(fk.child_column);
        const std::size_t pi = *parent->column_index(fk.parent_column);
        const Affinity paff = affinity_of(parent->columns[pi].data_type);
        std::set<Value, detail::ValueLess> have;
        if (pr != rows.end())
            for (const auto& row : pr->second)
                if (row.size() > pi && !row[pi].is_null()) have.insert(row[pi]);
        for (std::size_t r = 0; r < cr->second.size(); ++r) {
            const Row& row = cr->second[r];
            if (row.size() <= ci || row[ci].is_null()) continue;
            if (!have.count(apply_affinity(row[ci], paff)))
                out.push_back(child->name + "[" + std::to_string(r) + "]." + fk.child_column + ": no parent in " +
                              parent->name);
        }
    }
    return out;
}

std::string export_sql_dump(const Database& db) {
    std::ostringstream out;
    out << "BEGIN TRANSACTION;\n" << render_ddl(db.schema);
    for (const auto& t : db.schema.tables) {
        auto it = db.rows.find(t.name);
        if (it == db.rows.end()) continue;
        for (const auto& row : it->second) {
            out << "INSERT INTO " << quote_ident(t.name) << " VALUES(";
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << sql_literal(row[i]);
            out << ");\n";
        }
    }
    out << "COMMIT;\n";
    return out.str();
}

}  // namespace schemashift
