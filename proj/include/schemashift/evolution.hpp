#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "schemashift/ident.hpp"
#include "schemashift/schema.hpp"

namespace schemashift {

enum class PerturbationType {
    AddColumns,
    RemoveColumns,
    RemoveColumnsInSql,
    RenameColumns,
    SplitColumns,
    MergeColumns,
    AddTables,
    RemoveTables,
    RenameTables,
    SplitTables,
    MergeTables,
};

inline constexpr PerturbationType kAllPerturbationTypes[] = {
    PerturbationType::AddColumns,   PerturbationType::RemoveColumns,
    PerturbationType::RemoveColumnsInSql, PerturbationType::RenameColumns,
    PerturbationType::SplitColumns, PerturbationType::MergeColumns,
    PerturbationType::AddTables,    PerturbationType::RemoveTables,
    PerturbationType::RenameTables, PerturbationType::SplitTables,
    PerturbationType::MergeTables,
};

std::string_view to_string(PerturbationType type);
std::optional<PerturbationType> parse_perturbation_type(std::string_view name);
bool is_column_level(PerturbationType type);
// The two out-of-scope types whose gold becomes a refusal sentinel.
bool is_refusal_type(PerturbationType type);

// Old -> new identifier mapping. Column keys use the pre-rename table name.
class RenameMap {
public:
    void rename_table(std::string old_name, std::string new_name);
    void rename_column(std::string table, std::string old_column, std::string new_column);

    std::optional<std::string> table_target(std::string_view table) const;
    std::optional<std::string> column_target(std::string_view table, std::string_view column) const;

    bool empty() const { return tables_.empty() && columns_.empty(); }
    std::size_t size() const { return tables_.size() + columns_.size(); }

    // Maps the renamed schema back onto the original one.
    RenameMap inverse() const;

    // Invariant violations against the pre-rename schema: unknown sources,
    // non-injective targets, or targets colliding with untouched names.
    std::vector<std::string> check(const Schema& schema) const;

    struct PairILess {
        bool operator()(const std::pair<std::string, std::string>& a,
                        const std::pair<std::string, std::string>& b) const {
            ILess less;
            if (less(a.first, b.first)) return true;
            if (less(b.first, a.first)) return false;
            return less(a.second, b.second);
        }
    };
    using ColumnMap = std::map<std::pair<std::string, std::string>, std::string, PairILess>;

    const std::map<std::string, std::string, ILess>& tables() const { return tables_; }
    // ((table, old column), new column)
    const ColumnMap& columns() const { return columns_; }

    bool operator==(const RenameMap&) const = default;

private:
    std::map<std::string, std::string, ILess> tables_;
    ColumnMap columns_;
};

struct SplitPart {
    std::string name;
    std::vector<std::string> columns;  // non-PK columns owned by this part
    bool operator==(const SplitPart&) const = default;
};

struct SplitPlan {
    std::string source_table;
    std::vector<SplitPart> parts;  // parts[0] is the anchor
    std::vector<std::string> pk;   // copied into every part

    // Index of the part owning `column`; the anchor for PK columns.
    std::optional<std::size_t> owning_part(std::string_view column) const;
    std::vector<std::string> check(const Schema& schema) const;
    bool operator==(const SplitPlan&) const = default;
};

struct MergePlan {
    std::vector<std::string> source_tables;
    std::string merged_name;
    std::string kept_pk_table;              // whose primary key survives
    std::vector<std::string> kept_pk;       // its columns
    // (source table, column) -> name in the merged table, for non-PK clashes.
    std::vector<std::pair<std::pair<std::string, std::string>, std::string>> column_renames;
    std::vector<ForeignKey> join_links;     // FK links among sources aligning rows

    std::vector<std::string> check(const Schema& schema) const;
    bool operator==(const MergePlan&) const = default;
};

// Resolved layout of a merged table.
struct MergedLayout {
    Table table;
    // Every source column and the merged column it lands in.
    std::vector<std::pair<std::pair<std::string, std::string>, std::string>> mapping;

    std::optional<std::string> target(std::string_view table, std::string_view column) const;
};
MergedLayout merged_layout(const Schema& schema, const MergePlan& plan);

enum class CompositeKind { Name, Date, Address };
std::string_view to_string(CompositeKind kind);
std::optional<CompositeKind> parse_composite_kind(std::string_view s);

struct ColumnSplitSpec {
    std::string table;
    std::string column;
    std::vector<std::string> components;
    std::string delimiter;
    CompositeKind kind = CompositeKind::Name;
    bool operator==(const ColumnSplitSpec&) const = default;
};

struct ColumnMergeSpec {
    std::string table;
    std::vector<std::string> components;
    std::string merged;
    std::string delimiter;
    CompositeKind kind = CompositeKind::Name;
    bool operator==(const ColumnMergeSpec&) const = default;
};

// Fixed-width layout of a YYYY-MM-DD value: (start, length) per component.
inline constexpr std::pair<int, int> kDateFields[3] = {{1, 4}, {6, 2}, {9, 2}};

struct AddedColumn {
    std::string table;
    Column column;
    std::size_t position = 0;  // index in the evolved table
    bool operator==(const AddedColumn&) const = default;
};

struct AddedTable {
    Table table;
    std::vector<ForeignKey> foreign_keys;  // FKs touching the added table
    bool operator==(const AddedTable&) const = default;
};

struct RemovedItem {
    std::string table;
    std::string column;  // empty when the whole table was removed
    bool operator==(const RemovedItem&) const = default;
};

// Machine-readable diff of one perturbation.
struct EvolutionRecord {
    PerturbationType ptype = PerturbationType::AddColumns;
    RenameMap renames;
    std::optional<SplitPlan> split_plan;
    std::optional<MergePlan> merge_plan;
    std::vector<ColumnSplitSpec> column_splits;
    std::vector<ColumnMergeSpec> column_merges;
    std::vector<AddedColumn> added_columns;
    std::vector<AddedTable> added_tables;
    std::vector<RemovedItem> removed;
    int manipulated_count = 0;
    // Column-level types only: manipulated columns per touched table.
    std::vector<std::pair<std::string, int>> manipulated_per_table;

    bool operator==(const EvolutionRecord&) const = default;
};

// Applies the structural part of `record` to `base`, cascading foreign keys.
// Throws MigrationUnsupported when the record's plans do not fit `base`.
Schema apply_to_schema(const Schema& base, const EvolutionRecord& record);

}  // namespace schemashift
