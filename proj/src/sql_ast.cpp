#include <sstream>

#include "schemashift/ident.hpp"
#include "schemashift/sql_ast.hpp"

namespace schemashift::sql {

ExprPtr Expr::literal_of(LiteralKind kind, std::string text) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Literal;
    e->literal = kind;
    e->text = std::move(text);
    return e;
}

ExprPtr Expr::column(std::string qualifier, std::string name) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Column;
    e->qualifier = std::move(qualifier);
    e->name = std::move(name);
    return e;
}

ExprPtr Expr::binary(std::string op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Binary;
    e->text = std::move(op);
    e->args.push_back(std::move(lhs));
    e->args.push_back(std::move(rhs));
    return e;
}

ExprPtr Expr::function(std::string name, std::vector<ExprPtr> args) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Function;
    e->text = std::move(name);
    e->args = std::move(args);
    return e;
}

ExprPtr Expr::clone() const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->text = text;
    e->literal = literal;
    e->qualifier = qualifier;
    e->name = name;
    e->qualifier_span = qualifier_span;
    e->name_span = name_span;
    e->name_quote = name_quote;
    for (const auto& a : args) e->args.push_back(a ? a->clone() : nullptr);
    if (subquery) e->subquery = subquery->clone();
    e->negated = negated;
    e->distinct = distinct;
    e->star_arg = star_arg;
    e->has_operand = has_operand;
    e->has_else = has_else;
    return e;
}

SelectItem SelectItem::clone() const {
    SelectItem s;
    if (expr) s.expr = expr->clone();
    s.alias = alias;
    s.alias_span = alias_span;
    s.star = star;
    s.star_qualifier = star_qualifier;
    s.star_qualifier_span = star_qualifier_span;
    return s;
}

FromEntry FromEntry::clone() const {
    FromEntry f;
    f.join = join;
    f.natural = natural;
    f.table = table;
    f.table_span = table_span;
    if (subquery) f.subquery = subquery->clone();
    f.alias = alias;
    f.alias_span = alias_span;
    if (on) f.on = on->clone();
    f.using_columns = using_columns;
    return f;
}

SelectCore SelectCore::clone() const {
    SelectCore c;
    c.distinct = distinct;
    for (const auto& i : items) c.items.push_back(i.clone());
    for (const auto& f : from) c.from.push_back(f.clone());
    if (where) c.where = where->clone();
    for (const auto& g : group_by) c.group_by.push_back(g->clone());
    if (having) c.having = having->clone();
    return c;
}

OrderItem OrderItem::clone() const {
    OrderItem o;
    o.expr = expr->clone();
    o.desc = desc;
    o.nulls = nulls;
    return o;
}

QueryPtr Query::clone() const {
    auto q = std::make_unique<Query>();
    for (const auto& c : cores) q->cores.push_back(c.clone());
    q->ops = ops;
    for (const auto& o : order_by) q->order_by.push_back(o.clone());
    if (limit) q->limit = limit->clone();
    if (offset) q->offset = offset->clone();
    return q;
}

std::string_view to_string(SetOp op) {
    switch (op) {
        case SetOp::Union: return "UNION";
        case SetOp::UnionAll: return "UNION ALL";
        case SetOp::Intersect: return "INTERSECT";
        case SetOp::Except: return "EXCEPT";
    }
    return "UNION";
}

bool is_aggregate_function(std::string_view name, std::size_t arg_count) {
    if (iequals(name, "COUNT") || iequals(name, "SUM") || iequals(name, "AVG") ||
        iequals(name, "TOTAL") || iequals(name, "GROUP_CONCAT"))
        return true;
    // MIN/MAX with a single argument aggregate; with more they are scalar.
    if ((iequals(name, "MIN") || iequals(name, "MAX")) && arg_count == 1) return true;
    return false;
}

namespace {

// Binding strength, higher binds tighter.
int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Binary: {
            const std::string& op = e.text;
            if (op == "OR") return 1;
            if (op == "AND") return 2;
            if (op == "=" || op == "<>" || op == "IS" || op == "IS NOT") return 4;
            if (op == "<" || op == "<=" || op == ">" || op == ">=") return 5;
            if (op == "&" || op == "|" || op == "<<" || op == ">>") return 6;
            if (op == "+" || op == "-") return 7;
            if (op == "*" || op == "/" || op == "%") return 8;
            if (op == "||") return 9;
            return 4;
        }
        case ExprKind::Unary: return e.text == "NOT" ? 3 : 10;
        case ExprKind::Between:
        case ExprKind::InList:
        case ExprKind::InSelect:
        case ExprKind::IsNull:
        case ExprKind::Like: return 4;
        case ExprKind::Collate: return 11;
        default: return 12;
    }
}

class Printer {
public:
    std::string str() const { return out_.str(); }

    void query(const Query& q) {
        for (std::size_t i = 0; i < q.cores.size(); ++i) {
            if (i) out_ << ' ' << to_string(q.ops[i - 1]) << ' ';
            core(q.cores[i]);
        }
        if (!q.order_by.empty()) {
            out_ << " ORDER BY ";
            for (std::size_t i = 0; i < q.order_by.size(); ++i) {
                if (i) out_ << ", ";
                expr(*q.order_by[i].expr, 0);
                if (q.order_by[i].desc) out_ << " DESC";
                if (q.order_by[i].nulls == 1) out_ << " NULLS FIRST";
                if (q.order_by[i].nulls == 2) out_ << " NULLS LAST";
            }
        }
        if (q.limit) {
            out_ << " LIMIT ";
            expr(*q.limit, 0);
        }
        if (q.offset) {
            out_ << " OFFSET ";
            expr(*q.offset, 0);
        }
    }

    void core(const SelectCore& c) {
        out_ << "SELECT ";
        if (c.distinct) out_ << "DISTINCT ";
        for (std::size_t i = 0; i < c.items.size(); ++i) {
            if (i) out_ << ", ";
            const auto& item = c.items[i];
            if (item.star) {
                if (!item.star_qualifier.empty()) out_ << quote_ident(item.star_qualifier) << '.';
                out_ << '*';
            } else {
                expr(*item.expr, 0);
                if (!item.alias.empty()) out_ << " AS " << quote_ident(item.alias);
            }
        }
        if (!c.from.empty()) {
            out_ << " FROM ";
            for (const auto& entry : c.from) from_entry(entry);
        }
        if (c.where) {
            out_ << " WHERE ";
            expr(*c.where, 0);
        }
        if (!c.group_by.empty()) {
            out_ << " GROUP BY ";
            for (std::size_t i = 0; i < c.group_by.size(); ++i) {
                if (i) out_ << ", ";
                expr(*c.group_by[i], 0);
            }
        }
        if (c.having) {
            out_ << " HAVING ";
            expr(*c.having, 0);
        }
    }

    void from_entry(const FromEntry& e) {
        switch (e.join) {
            case JoinKind::First: break;
            case JoinKind::Comma: out_ << ", "; break;
            case JoinKind::Inner: out_ << (e.natural ? " NATURAL JOIN " : " JOIN "); break;
            case JoinKind::Left: out_ << (e.natural ? " NATURAL LEFT JOIN " : " LEFT JOIN "); break;
            case JoinKind::Cross: out_ << " CROSS JOIN "; break;
        }
        if (e.subquery) {
            out_ << '(';
            query(*e.subquery);
            out_ << ')';
        } else {
            out_ << quote_ident(e.table);
        }
        if (!e.alias.empty()) out_ << " AS " << quote_ident(e.alias);
        if (e.on) {
            out_ << " ON ";
            expr(*e.on, 0);
        }
        if (!e.using_columns.empty()) {
            out_ << " USING (";
            for (std::size_t i = 0; i < e.using_columns.size(); ++i)
                out_ << (i ? ", " : "") << quote_ident(e.using_columns[i]);
            out_ << ')';
        }
    }

    void literal(const Expr& e) {
        switch (e.literal) {
            case LiteralKind::Null: out_ << "NULL"; break;
            case LiteralKind::Integer:
            case LiteralKind::Real: out_ << e.text; break;
            case LiteralKind::String: {
                out_ << '\'';
                for (char c : e.text) {
                    if (c == '\'') out_ << '\'';
                    out_ << c;
                }
                out_ << '\'';
                break;
            }
        }
    }

    // Prints `e`, parenthesising when it binds looser than `min_prec`.
    void expr(const Expr& e, int min_prec) {
        const int prec = precedence(e);
        const bool paren = prec < min_prec;
        if (paren) out_ << '(';
        switch (e.kind) {
            case ExprKind::Literal: literal(e); break;
            case ExprKind::Column:
                if (!e.qualifier.empty()) out_ << quote_ident(e.qualifier) << '.';
                if (e.qualifier.empty() && e.name_quote == '"') {
                    out_ << '"';
                    for (char c : e.name) {
                        if (c == '"') out_ << '"';
                        out_ << c;
                    }
                    out_ << '"';
                } else {
                    out_ << quote_ident(e.name);
                }
                break;
            case ExprKind::Unary:
                if (e.text == "NOT") {
                    out_ << "NOT ";
                    expr(*e.args[0], prec);
                } else {
                    out_ << e.text;
                    // Avoid "--" which would start a comment.
                    if (e.args[0]->kind == ExprKind::Unary ||
                        (e.args[0]->kind == ExprKind::Literal && e.args[0]->text.starts_with('-')))
                        out_ << ' ';
                    expr(*e.args[0], prec);
                }
                break;
            case ExprKind::Binary:
                expr(*e.args[0], prec);
                out_ << ' ' << e.text << ' ';
                expr(*e.args[1], prec + 1);
                break;
            case ExprKind::Function:
                out_ << e.text << '(';
                if (e.star_arg) out_ << '*';
                if (e.distinct) out_ << "DISTINCT ";
                for (std::size_t i = 0; i < e.args.size(); ++i) {
                    if (i) out_ << ", ";
                    expr(*e.args[i], 0);
                }
                out_ << ')';
                break;
            case ExprKind::Case: {
                out_ << "CASE";
                std::size_t i = 0;
                if (e.has_operand) {
                    out_ << ' ';
                    expr(*e.args[0], 0);
                    i = 1;
                }
                const std::size_t end = e.args.size() - (e.has_else ? 1 : 0);
                for (; i + 1 < end; i += 2) {
                    out_ << " WHEN ";
                    expr(*e.args[i], 0);
                    out_ << " THEN ";
                    expr(*e.args[i + 1], 0);
                }
                if (e.has_else) {
                    out_ << " ELSE ";
                    expr(*e.args.back(), 0);
                }
                out_ << " END";
                break;
            }
            case ExprKind::Cast:
                out_ << "CAST(";
                expr(*e.args[0], 0);
                out_ << " AS " << e.text << ')';
                break;
            case ExprKind::Between:
                expr(*e.args[0], prec + 1);
                out_ << (e.negated ? " NOT BETWEEN " : " BETWEEN ");
                expr(*e.args[1], prec + 1);
                out_ << " AND ";
                expr(*e.args[2], prec + 1);
                break;
            case ExprKind::InList:
                expr(*e.args[0], prec + 1);
                out_ << (e.negated ? " NOT IN (" : " IN (");
                for (std::size_t i = 1; i < e.args.size(); ++i) {
                    if (i > 1) out_ << ", ";
                    expr(*e.args[i], 0);
                }
                out_ << ')';
                break;
            case ExprKind::InSelect:
                expr(*e.args[0], prec + 1);
                out_ << (e.negated ? " NOT IN (" : " IN (");
                query(*e.subquery);
                out_ << ')';
                break;
            case ExprKind::Exists:
                out_ << (e.negated ? "NOT EXISTS (" : "EXISTS (");
                query(*e.subquery);
                out_ << ')';
                break;
            case ExprKind::Subquery:
                out_ << '(';
                query(*e.subquery);
                out_ << ')';
                break;
            case ExprKind::IsNull:
                expr(*e.args[0], prec + 1);
                out_ << (e.negated ? " IS NOT NULL" : " IS NULL");
                break;
            case ExprKind::Like:
                expr(*e.args[0], prec + 1);
                out_ << (e.negated ? " NOT " : " ") << e.text << ' ';
                expr(*e.args[1], prec + 1);
                if (e.args.size() > 2) {
                    out_ << " ESCAPE ";
                    expr(*e.args[2], prec + 1);
                }
                break;
            case ExprKind::Collate:
                expr(*e.args[0], prec);
                out_ << " COLLATE " << e.text;
                break;
        }
        if (paren) out_ << ')';
    }

private:
    std::ostringstream out_;
};

}  // namespace

std::string to_sql(const Query& query) {
    Printer p;
    p.query(query);
    return p.str();
}

std::string to_sql(const Expr& expr) {
    Printer p;
    p.expr(expr, 0);
    return p.str();
}

}  // namespace schemashift::sql
