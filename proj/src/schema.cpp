#include "schemashift/schema.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

#include "schemashift/ident.hpp"

namespace schemashift {

namespace {

// Words that cannot appear unquoted as identifiers in our own parser.
constexpr std::array<std::string_view, 66> kReserved = {
    "ABORT",   "ALL",     "AND",       "AS",        "ASC",      "BETWEEN",  "BY",
    "CASE",    "CAST",    "CHECK",     "COLLATE",   "CONSTRAINT", "CREATE", "CROSS",
    "DEFAULT", "DESC",    "DISTINCT",  "ELSE",      "END",      "ESCAPE",   "EXCEPT",
    "EXISTS",  "FOREIGN", "FROM",      "FULL",      "GLOB",     "GROUP",    "HAVING",
    "IN",      "INDEX",   "INNER",     "INSERT",    "INTERSECT", "INTO",    "IS",
    "ISNULL",  "JOIN",    "KEY",       "LEFT",      "LIKE",     "LIMIT",    "NATURAL",
    "NOT",     "NOTNULL", "NULL",      "OFFSET",    "ON",       "OR",       "ORDER",
    "OUTER",   "PRIMARY", "REFERENCES", "RIGHT",    "SELECT",   "SET",      "TABLE",
    "THEN",    "UNION",   "UNIQUE",    "UPDATE",    "USING",    "VALUES",   "WHEN",
    "WHERE",   "WITH",    "REGEXP",
};

}  // namespace

bool is_reserved_word(std::string_view word) {
    return std::any_of(kReserved.begin(), kReserved.end(),
                       [&](std::string_view kw) { return iequals(kw, word); });
}

std::string quote_ident(std::string_view name) {
    bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) plain = false;
    if (plain && !is_reserved_word(name)) return std::string(name);
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

const Column* Table::find_column(std::string_view column) const {
    auto idx = column_index(column);
    return idx ? &columns[*idx] : nullptr;
}

std::optional<std::size_t> Table::column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (iequals(columns[i].name, column)) return i;
    return std::nullopt;
}

bool Table::is_pk_member(std::string_view column) const {
    return std::any_of(primary_key.begin(), primary_key.end(),
                       [&](const std::string& pk) { return iequals(pk, column); });
}

std::vector<std::string> Table::non_pk_columns() const {
    std::vector<std::string> out;
    for (const auto& c : columns)
        if (!is_pk_member(c.name)) out.push_back(c.name);
    return out;
}

const Table* Schema::find_table(std::string_view table) const {
    for (const auto& t : tables)
        if (iequals(t.name, table)) return &t;
    return nullptr;
}

Table* Schema::find_table(std::string_view table) {
    for (auto& t : tables)
        if (iequals(t.name, table)) return &t;
    return nullptr;
}

bool Schema::same_structure(const Schema& other) const {
    if (tables != other.tables || foreign_keys.size() != other.foreign_keys.size()) return false;
    auto key = [](const ForeignKey& fk) {
        return std::tie(fk.child_table, fk.child_column, fk.parent_table, fk.parent_column);
    };
    auto a = foreign_keys;
    auto b = other.foreign_keys;
    auto less = [&](const ForeignKey& x, const ForeignKey& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    return a == b;
}

void canonicalize_fk_order(Schema& schema) {
    auto rank = [&](const ForeignKey& fk) {
        for (std::size_t i = 0; i < schema.tables.size(); ++i)
            if (iequals(schema.tables[i].name, fk.child_table)) return i;
        return schema.tables.size();
    };
    std::stable_sort(schema.foreign_keys.begin(), schema.foreign_keys.end(),
                     [&](const ForeignKey& a, const ForeignKey& b) { return rank(a) < rank(b); });
}

std::string_view to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::EmptyName: return "EMPTY_NAME";
        case ViolationCode::DupTable: return "DUP_TABLE";
        case ViolationCode::DupColumn: return "DUP_COLUMN";
        case ViolationCode::BadPrimaryKey: return "BAD_PRIMARY_KEY";
        case ViolationCode::DanglingFk: return "DANGLING_FK";
        case ViolationCode::SelfFk: return "SELF_FK";
    }
    return "UNKNOWN";
}

std::vector<Violation> validate(const Schema& schema) {
    std::vector<Violation> out;
    std::set<std::string, ILess> table_names;
    for (const auto& t : schema.tables) {
        if (t.name.empty()) out.push_back({ViolationCode::EmptyName, "<table>", ""});
        if (!table_names.insert(t.name).second)
            out.push_back({ViolationCode::DupTable, t.name, t.name});

        std::set<std::string, ILess> column_names;
        for (const auto& c : t.columns) {
            if (c.name.empty()) out.push_back({ViolationCode::EmptyName, t.name + ".<column>", ""});
            if (!column_names.insert(c.name).second)
                out.push_back({ViolationCode::DupColumn, t.name + "." + c.name, c.name});
        }
        std::set<std::string, ILess> pk_seen;
        for (const auto& pk : t.primary_key) {
            if (!t.has_column(pk) || !pk_seen.insert(pk).second)
                out.push_back({ViolationCode::BadPrimaryKey, t.name + ".pk." + pk, pk});
        }
    }

    for (std::size_t i = 0; i < schema.foreign_keys.size(); ++i) {
        const auto& fk = schema.foreign_keys[i];
        const std::string path = "fk[" + std::to_string(i) + "] " + fk.child_table + "." +
                                 fk.child_column + "->" + fk.parent_table + "." + fk.parent_column;
        const Table* child = schema.find_table(fk.child_table);
        const Table* parent = schema.find_table(fk.parent_table);
        if (!child) {
            out.push_back({ViolationCode::DanglingFk, path, fk.child_table});
            continue;
        }
        if (!child->has_column(fk.child_column)) {
            out.push_back({ViolationCode::DanglingFk, path, fk.child_column});
            continue;
        }
        if (!parent) {
            out.push_back({ViolationCode::DanglingFk, path, fk.parent_table});
            continue;
        }
        if (!parent->has_column(fk.parent_column)) {
            out.push_back({ViolationCode::DanglingFk, path, fk.parent_column});
            continue;
        }
        if (iequals(fk.child_table, fk.parent_table) && iequals(fk.child_column, fk.parent_column))
            out.push_back({ViolationCode::SelfFk, path, fk.child_column});
    }
    return out;
}

Schema subschema(const Schema& schema, const std::vector<std::string>& tables) {
    auto wanted = [&](std::string_view name) {
        return std::any_of(tables.begin(), tables.end(),
                           [&](const std::string& t) { return iequals(t, name); });
    };
    Schema out;
    out.db_id = schema.db_id;
    for (const auto& t : schema.tables)
        if (wanted(t.name)) out.tables.push_back(t);
    for (const auto& fk : schema.foreign_keys)
        if (wanted(fk.child_table) && wanted(fk.parent_table)) out.foreign_keys.push_back(fk);
    return out;
}

void prune_dangling_fks(Schema& schema) {
    std::erase_if(schema.foreign_keys, [&](const ForeignKey& fk) {
        const Table* child = schema.find_table(fk.child_table);
        const Table* parent = schema.find_table(fk.parent_table);
        return !child || !parent || !child->has_column(fk.child_column) ||
               !parent->has_column(fk.parent_column);
    });
}

}  // namespace schemashift
