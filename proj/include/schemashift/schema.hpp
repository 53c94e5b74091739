#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace schemashift {

struct Column {
    std::string name;
    std::string data_type;  // carried verbatim, e.g. "INTEGER", "varchar(40)"
    bool nullable = true;

    bool operator==(const Column&) const = default;
};

struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::string> primary_key;  // ordered, possibly composite or empty

    const Column* find_column(std::string_view column) const;
    std::optional<std::size_t> column_index(std::string_view column) const;
    bool has_column(std::string_view column) const { return column_index(column).has_value(); }
    bool is_pk_member(std::string_view column) const;
    // Non-PK columns in declaration order.
    std::vector<std::string> non_pk_columns() const;

    bool operator==(const Table&) const = default;
};

struct ForeignKey {
    std::string child_table;
    std::string child_column;
    std::string parent_table;
    std::string parent_column;

    bool operator==(const ForeignKey&) const = default;
};

struct Schema {
    std::string db_id;
    std::vector<Table> tables;
    std::vector<ForeignKey> foreign_keys;

    const Table* find_table(std::string_view table) const;
    Table* find_table(std::string_view table);
    bool has_table(std::string_view table) const { return find_table(table) != nullptr; }

    // Structural equality ignores db_id, which DDL text does not carry, and
    // the relative order of foreign keys.
    bool same_structure(const Schema& other) const;
    bool operator==(const Schema&) const = default;
};

enum class ViolationCode {
    EmptyName,
    DupTable,
    DupColumn,
    BadPrimaryKey,
    DanglingFk,
    SelfFk,
};

std::string_view to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string path;     // e.g. "patient.city" or "fk[2]"
    std::string subject;  // the offending identifier
};

std::vector<Violation> validate(const Schema& schema);

// Returns a schema restricted to the named tables (case-insensitive), keeping
// only foreign keys whose endpoints both survive. Table order follows `schema`.
Schema subschema(const Schema& schema, const std::vector<std::string>& tables);

// Stable-sorts foreign keys by the position of their child table, the order
// render_ddl emits them in.
void canonicalize_fk_order(Schema& schema);

// Drops foreign keys touching a table/column that no longer exists.
void prune_dangling_fks(Schema& schema);

}  // namespace schemashift
