#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace schemashift::sql {

// Byte range of a token in the text a query was parsed from. Nodes created
// by rewriters carry an invalid span.
struct Span {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t offset = npos;
    std::size_t length = 0;
    bool valid() const { return offset != npos; }
};

struct Query;
struct FromEntry;
struct Expr;
using ExprPtr = std::unique_ptr<Expr>;
using QueryPtr = std::unique_ptr<Query>;

enum class ExprKind {
    Literal,
    Column,
    Unary,     // op in {"-", "+", "~", "NOT"}
    Binary,    // arithmetic, comparison, "||", "AND", "OR", "IS", "IS NOT"
    Function,  // name in `text`; aggregates included
    Case,
    Cast,      // target type in `text`
    Between,
    InList,
    InSelect,
    Exists,
    Subquery,  // scalar subquery
    IsNull,    // IS NULL / ISNULL; negated for IS NOT NULL / NOTNULL
    Like,      // op is "LIKE" or "GLOB"; args[2] is the optional ESCAPE
    Collate,   // collation name in `text`
};

enum class LiteralKind { Null, Integer, Real, String };

// Result of name resolution for a Column expression (filled by bind()).
struct ColumnBinding {
    enum class Kind { Unbound, Source, SelectItem, StringLiteral };
    Kind kind = Kind::Unbound;
    FromEntry* source = nullptr;  // Source: the FROM entry providing the column
    int column = -1;              // Source: index into source->columns
    int item = -1;                // SelectItem: index into the owning core's items
};

struct Expr {
    ExprKind kind = ExprKind::Literal;

    // Literal value text, operator, function name, cast type or collation.
    std::string text;
    LiteralKind literal = LiteralKind::Null;

    // Column references.
    std::string qualifier;  // table or alias; empty when unqualified
    std::string name;
    Span qualifier_span;
    Span name_span;
    char name_quote = 0;  // '"' when written as a double-quoted identifier

    std::vector<ExprPtr> args;
    QueryPtr subquery;

    bool negated = false;       // NOT IN / NOT LIKE / NOT BETWEEN / IS NOT NULL / NOT EXISTS
    bool distinct = false;      // aggregate DISTINCT
    bool star_arg = false;      // COUNT(*)
    bool has_operand = false;   // CASE x WHEN ... (args[0] is the operand)
    bool has_else = false;      // CASE ... ELSE (last arg)

    ColumnBinding binding;

    static ExprPtr literal_of(LiteralKind kind, std::string text);
    static ExprPtr column(std::string qualifier, std::string name);
    static ExprPtr binary(std::string op, ExprPtr lhs, ExprPtr rhs);
    static ExprPtr function(std::string name, std::vector<ExprPtr> args);

    ExprPtr clone() const;
};

struct SelectItem {
    ExprPtr expr;                 // null for star items
    std::string alias;
    Span alias_span;
    bool star = false;
    std::string star_qualifier;   // `T1.*`
    Span star_qualifier_span;

    SelectItem clone() const;
};

enum class JoinKind { First, Comma, Inner, Left, Cross };

struct FromEntry {
    JoinKind join = JoinKind::First;
    bool natural = false;

    std::string table;  // base table name; empty when subquery is set
    Span table_span;
    QueryPtr subquery;

    std::string alias;
    Span alias_span;

    ExprPtr on;
    std::vector<std::string> using_columns;

    // Filled by bind(): visible column names and declared types.
    std::vector<std::string> columns;
    std::vector<std::string> column_types;

    bool is_table() const { return !subquery; }
    // The name this entry is referenced by: alias if present, else table name.
    const std::string& exposed_name() const { return alias.empty() ? table : alias; }

    FromEntry clone() const;
};

struct SelectCore {
    bool distinct = false;
    std::vector<SelectItem> items;
    std::vector<FromEntry> from;
    ExprPtr where;
    std::vector<ExprPtr> group_by;
    ExprPtr having;

    SelectCore clone() const;
};

enum class SetOp { Union, UnionAll, Intersect, Except };

struct OrderItem {
    ExprPtr expr;
    bool desc = false;
    int nulls = 0;  // 0 default, 1 NULLS FIRST, 2 NULLS LAST
    int ordinal = -1;  // bind(): output column index when ORDER BY refers to one

    OrderItem clone() const;
};

struct Query {
    std::vector<SelectCore> cores;  // >= 1
    std::vector<SetOp> ops;         // cores.size() - 1
    std::vector<OrderItem> order_by;
    ExprPtr limit;
    ExprPtr offset;

    bool is_compound() const { return cores.size() > 1; }
    QueryPtr clone() const;
};

// Parses one SELECT statement (optionally compound, optional trailing ';').
// Throws SqlSyntaxError.
QueryPtr parse_query(std::string_view sql);

// Renders SQLite-compatible SQL text.
std::string to_sql(const Query& query);
std::string to_sql(const Expr& expr);

std::string_view to_string(SetOp op);

bool is_aggregate_function(std::string_view name, std::size_t arg_count);

// Depth-first visitation of every expression in a query, including nested
// subqueries. The callback may not restructure the tree.
template <typename F>
void visit_exprs(Expr& e, F&& f);
template <typename F>
void visit_exprs(Query& q, F&& f);

template <typename F>
void visit_exprs(Expr& e, F&& f) {
    f(e);
    for (auto& a : e.args)
        if (a) visit_exprs(*a, f);
    if (e.subquery) visit_exprs(*e.subquery, f);
}

template <typename F>
void visit_exprs(Query& q, F&& f) {
    for (auto& core : q.cores) {
        for (auto& item : core.items)
            if (item.expr) visit_exprs(*item.expr, f);
        for (auto& entry : core.from) {
            if (entry.subquery) visit_exprs(*entry.subquery, f);
            if (entry.on) visit_exprs(*entry.on, f);
        }
        if (core.where) visit_exprs(*core.where, f);
        for (auto& g : core.group_by) visit_exprs(*g, f);
        if (core.having) visit_exprs(*core.having, f);
    }
    for (auto& o : q.order_by) visit_exprs(*o.expr, f);
    if (q.limit) visit_exprs(*q.limit, f);
    if (q.offset) visit_exprs(*q.offset, f);
}

// Visits the expressions owned directly by `q` (select items, ON, WHERE,
// GROUP BY, HAVING, ORDER BY, LIMIT) without entering any subquery.
template <typename F>
void visit_exprs_shallow(Expr& e, F&& f) {
    f(e);
    for (auto& a : e.args)
        if (a) visit_exprs_shallow(*a, f);
}

template <typename F>
void visit_exprs_shallow(Query& q, F&& f) {
    for (auto& core : q.cores) {
        for (auto& item : core.items)
            if (item.expr) visit_exprs_shallow(*item.expr, f);
        for (auto& entry : core.from)
            if (entry.on) visit_exprs_shallow(*entry.on, f);
        if (core.where) visit_exprs_shallow(*core.where, f);
        for (auto& g : core.group_by) visit_exprs_shallow(*g, f);
        if (core.having) visit_exprs_shallow(*core.having, f);
    }
    for (auto& o : q.order_by) visit_exprs_shallow(*o.expr, f);
    if (q.limit) visit_exprs_shallow(*q.limit, f);
    if (q.offset) visit_exprs_shallow(*q.offset, f);
}

// Visits every query block (q itself, FROM subqueries, expression subqueries)
// exactly once, outermost first.
template <typename F>
void visit_queries(Query& q, F&& f) {
    f(q);
    for (auto& core : q.cores)
        for (auto& entry : core.from)
            if (entry.subquery) visit_queries(*entry.subquery, f);
    visit_exprs_shallow(q, [&](Expr& e) {
        if (e.subquery) visit_queries(*e.subquery, f);
    });
}

// Visits every FROM entry at any nesting depth.
template <typename F>
void visit_from_entries(Query& q, F&& f) {
    visit_queries(q, [&](Query& block) {
        for (auto& core : block.cores)
            for (auto& entry : core.from) f(entry);
    });
}

}  // namespace schemashift::sql
