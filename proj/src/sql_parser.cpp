#include <array>

#include "schemashift/errors.hpp"
#include "schemashift/ident.hpp"
#include "schemashift/lexer.hpp"
#include "schemashift/sql_ast.hpp"

namespace schemashift::sql {

namespace {

// Words that end an expression or introduce a clause and therefore cannot
// serve as an implicit alias.
bool is_clause_word(const Token& t) {
    static constexpr std::array<std::string_view, 14> extra = {
        "LIMIT", "OFFSET", "NATURAL", "INNER", "LEFT", "CROSS", "JOIN", "OUTER",
        "RIGHT", "FULL",   "WINDOW",  "RETURNING", "INDEXED", "NOT"};
    if (t.kind != TokenKind::Word) return false;
    if (is_reserved_word(t.text)) return true;
    for (auto w : extra)
        if (iequals(w, t.text)) return true;
    return false;
}

Span span_of(const Token& t) { return Span{t.offset, t.length}; }

class Parser {
public:
    explicit Parser(std::string_view sql) : tokens_(tokenize(sql)) {}

    QueryPtr parse_statement() {
        if (peek().is_word("WITH"))
            throw SqlSyntaxError("WITH clauses are not supported", peek().offset);
        auto q = parse_query();
        while (accept_symbol(";")) {
        }
        if (!at_end()) fail("unexpected trailing input");
        return q;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    bool at_end() const { return peek().kind == TokenKind::End; }
    const Token& next() {
        const Token& t = peek();
        if (!at_end()) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        throw SqlSyntaxError(msg + (t.kind == TokenKind::End ? " (end of input)" : " near '" + t.text + "'"),
                             t.offset);
    }
    bool accept_word(std::string_view kw) {
        if (peek().is_word(kw)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect_word(std::string_view kw) {
        if (!accept_word(kw)) fail("expected " + std::string(kw));
    }
    bool accept_symbol(std::string_view s) {
        if (peek().is_symbol(s)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect_symbol(std::string_view s) {
        if (!accept_symbol(s)) fail("expected '" + std::string(s) + "'");
    }

    const Token& identifier_token() {
        const Token& t = peek();
        if (t.kind == TokenKind::QuotedIdent || (t.kind == TokenKind::Word && !is_reserved_word(t.text))) {
            ++pos_;
            return t;
        }
        fail("expected identifier");
    }

    QueryPtr parse_query() {
        auto q = std::make_unique<Query>();
        q->cores.push_back(parse_core());
        for (;;) {
            if (accept_word("UNION")) {
                q->ops.push_back(accept_word("ALL") ? SetOp::UnionAll : SetOp::Union);
            } else if (accept_word("INTERSECT")) {
                q->ops.push_back(SetOp::Intersect);
            } else if (accept_word("EXCEPT")) {
                q->ops.push_back(SetOp::Except);
            } else {
                break;
            }
            q->cores.push_back(parse_core());
        }
        if (accept_word("ORDER")) {
            expect_word("BY");
            do {
                OrderItem item;
                item.expr = parse_expr();
                if (accept_word("DESC"))
                    item.desc = true;
                else
                    accept_word("ASC");
                if (accept_word("NULLS")) {
                    if (accept_word("FIRST"))
                        item.nulls = 1;
                    else if (accept_word("LAST"))
                        item.nulls = 2;
                    else
                        fail("expected FIRST or LAST");
                }
                q->order_by.push_back(std::move(item));
            } while (accept_symbol(","));
        }
        if (accept_word("LIMIT")) {
            auto first = parse_expr();
            if (accept_word("OFFSET")) {
                q->limit = std::move(first);
                q->offset = parse_expr();
            } else if (accept_symbol(",")) {
                q->offset = std::move(first);
                q->limit = parse_expr();
            } else {
                q->limit = std::move(first);
            }
        }
        return q;
    }

    SelectCore parse_core() {
        if (peek().is_symbol("(")) fail("parenthesised compound members are not supported");
        expect_word("SELECT");
        SelectCore core;
        if (accept_word("DISTINCT"))
            core.distinct = true;
        else
            accept_word("ALL");
        do {
            core.items.push_back(parse_select_item());
        } while (accept_symbol(","));

        if (accept_word("FROM")) parse_from(core);
        if (accept_word("WHERE")) core.where = parse_expr();
        if (accept_word("GROUP")) {
            expect_word("BY");
            do {
                core.group_by.push_back(parse_expr());
            } while (accept_symbol(","));
        }
        if (accept_word("HAVING")) core.having = parse_expr();
        if (peek().is_word("WINDOW")) fail("window clauses are not supported");
        return core;
    }

    SelectItem parse_select_item() {
        SelectItem item;
        if (accept_symbol("*")) {
            item.star = true;
            return item;
        }
        if (peek().is_identifier() && peek(1).is_symbol(".") && peek(2).is_symbol("*")) {
            const Token& q = next();
            item.star = true;
            item.star_qualifier = q.text;
            item.star_qualifier_span = span_of(q);
            pos_ += 2;
            return item;
        }
        item.expr = parse_expr();
        if (accept_word("AS")) {
            const Token& a = peek();
            if (a.kind == TokenKind::String || a.is_identifier()) {
                ++pos_;
            } else {
                fail("expected alias");
            }
            item.alias = a.text;
            item.alias_span = span_of(a);
        } else if ((peek().kind == TokenKind::QuotedIdent || peek().kind == TokenKind::String ||
                    peek().kind == TokenKind::Word) &&
                   !is_clause_word(peek())) {
            const Token& a = next();
            item.alias = a.text;
            item.alias_span = span_of(a);
        }
        return item;
    }

    void parse_from(SelectCore& core) {
        core.from.push_back(parse_from_source(JoinKind::First, false));
        for (;;) {
            if (accept_symbol(",")) {
                core.from.push_back(parse_from_source(JoinKind::Comma, false));
                continue;
            }
            bool natural = accept_word("NATURAL");
            JoinKind kind;
            if (accept_word("LEFT")) {
                accept_word("OUTER");
                kind = JoinKind::Left;
            } else if (accept_word("INNER")) {
                kind = JoinKind::Inner;
            } else if (accept_word("CROSS")) {
                kind = JoinKind::Cross;
            } else if (peek().is_word("RIGHT") || peek().is_word("FULL")) {
                fail("RIGHT/FULL joins are not supported");
            } else if (peek().is_word("JOIN")) {
                kind = JoinKind::Inner;
            } else {
                if (natural) fail("expected JOIN");
                break;
            }
            expect_word("JOIN");
            FromEntry entry = parse_from_source(kind, natural);
            if (accept_word("ON")) {
                entry.on = parse_expr();
            } else if (accept_word("USING")) {
                expect_symbol("(");
                do {
                    entry.using_columns.push_back(identifier_token().text);
                } while (accept_symbol(","));
                expect_symbol(")");
            }
            core.from.push_back(std::move(entry));
        }
    }

    FromEntry parse_from_source(JoinKind kind, bool natural) {
        FromEntry entry;
        entry.join = kind;
        entry.natural = natural;
        if (accept_symbol("(")) {
            if (!peek().is_word("SELECT")) fail("parenthesised joins are not supported");
            entry.subquery = parse_query();
            expect_symbol(")");
        } else {
            const Token* t = &identifier_token();
            if (accept_symbol(".")) t = &identifier_token();  // schema-qualified name
            entry.table = t->text;
            entry.table_span = span_of(*t);
        }
        if (accept_word("AS")) {
            const Token& a = identifier_token();
            entry.alias = a.text;
            entry.alias_span = span_of(a);
        } else if ((peek().kind == TokenKind::Word && !is_clause_word(peek())) ||
                   peek().kind == TokenKind::QuotedIdent) {
            const Token& a = next();
            entry.alias = a.text;
            entry.alias_span = span_of(a);
        }
        if (accept_word("INDEXED")) {
            expect_word("BY");
            identifier_token();
        } else if (peek().is_word("NOT") && peek(1).is_word("INDEXED")) {
            pos_ += 2;
        }
        return entry;
    }

    // Precedence climbing, lowest first.
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        auto lhs = parse_and();
        while (accept_word("OR")) lhs = Expr::binary("OR", std::move(lhs), parse_and());
        return lhs;
    }

    ExprPtr parse_and() {
        auto lhs = parse_not();
        while (accept_word("AND")) lhs = Expr::binary("AND", std::move(lhs), parse_not());
        return lhs;
    }

    ExprPtr parse_not() {
        if (accept_word("NOT")) {
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Unary;
            e->text = "NOT";
            e->args.push_back(parse_not());
            return e;
        }
        return parse_equality();
    }

    ExprPtr parse_equality() {
        auto lhs = parse_relational();
        for (;;) {
            const Token& t = peek();
            if (t.is_symbol("=") || t.is_symbol("==") || t.is_symbol("!=") || t.is_symbol("<>")) {
                std::string op = next().text;
                if (op == "==") op = "=";
                if (op == "!=") op = "<>";
                lhs = Expr::binary(op, std::move(lhs), parse_relational());
                continue;
            }
            if (t.is_word("IS")) {
                ++pos_;
                bool negated = accept_word("NOT");
                if (accept_word("NULL")) {
                    auto e = std::make_unique<Expr>();
                    e->kind = ExprKind::IsNull;
                    e->negated = negated;
                    e->args.push_back(std::move(lhs));
                    lhs = std::move(e);
                } else {
                    lhs = Expr::binary(negated ? "IS NOT" : "IS", std::move(lhs), parse_relational());
                }
                continue;
            }
            if (t.is_word("ISNULL") || t.is_word("NOTNULL")) {
                auto e = std::make_unique<Expr>();
                e->kind = ExprKind::IsNull;
                e->negated = next().is_word("NOTNULL");
                e->args.push_back(std::move(lhs));
                lhs = std::move(e);
                continue;
            }
            bool negated = false;
            if (t.is_word("NOT") &&
                (peek(1).is_word("IN") || peek(1).is_word("LIKE") || peek(1).is_word("GLOB") ||
                 peek(1).is_word("BETWEEN") || peek(1).is_word("NULL"))) {
                ++pos_;
                negated = true;
            }
            if (accept_word("NULL")) {  // "x NOT NULL"
                auto e = std::make_unique<Expr>();
                e->kind = ExprKind::IsNull;
                e->negated = true;
                e->args.push_back(std::move(lhs));
                lhs = std::move(e);
                continue;
            }
            if (accept_word("IN")) {
                lhs = parse_in(std::move(lhs), negated);
                continue;
            }
            if (peek().is_word("LIKE") || peek().is_word("GLOB")) {
                auto e = std::make_unique<Expr>();
                e->kind = ExprKind::Like;
                e->text = upper(next().text);
                e->negated = negated;
                e->args.push_back(std::move(lhs));
                e->args.push_back(parse_relational());
                if (accept_word("ESCAPE")) e->args.push_back(parse_relational());
                lhs = std::move(e);
                continue;
            }
            if (accept_word("BETWEEN")) {
                auto e = std::make_unique<Expr>();
                e->kind = ExprKind::Between;
                e->negated = negated;
                e->args.push_back(std::move(lhs));
                e->args.push_back(parse_relational());
                expect_word("AND");
                e->args.push_back(parse_relational());
                lhs = std::move(e);
                continue;
            }
            if (negated) fail("dangling NOT");
            return lhs;
        }
    }

    ExprPtr parse_in(ExprPtr lhs, bool negated) {
        expect_symbol("(");
        auto e = std::make_unique<Expr>();
        e->negated = negated;
        e->args.push_back(std::move(lhs));
        if (peek().is_word("SELECT")) {
            e->kind = ExprKind::InSelect;
            e->subquery = parse_query();
        } else {
            e->kind = ExprKind::InList;
            if (!peek().is_symbol(")")) {
                do {
                    e->args.push_back(parse_expr());
                } while (accept_symbol(","));
            }
        }
        expect_symbol(")");
        return e;
    }

    ExprPtr parse_relational() {
        auto lhs = parse_bitwise();
        for (;;) {
            const Token& t = peek();
            if (t.is_symbol("<") || t.is_symbol("<=") || t.is_symbol(">") || t.is_symbol(">=")) {
                std::string op = next().text;
                lhs = Expr::binary(op, std::move(lhs), parse_bitwise());
                continue;
            }
            return lhs;
        }
    }

    ExprPtr parse_bitwise() {
        auto lhs = parse_additive();
        for (;;) {
            const Token& t = peek();
            if (t.is_symbol("&") || t.is_symbol("|") || t.is_symbol("<<") || t.is_symbol(">>")) {
                std::string op = next().text;
                lhs = Expr::binary(op, std::move(lhs), parse_additive());
                continue;
            }
            return lhs;
        }
    }

    ExprPtr parse_additive() {
        auto lhs = parse_multiplicative();
        for (;;) {
            const Token& t = peek();
            if (t.is_symbol("+") || t.is_symbol("-")) {
                std::string op = next().text;
                lhs = Expr::binary(op, std::move(lhs), parse_multiplicative());
                continue;
            }
            return lhs;
        }
    }

    ExprPtr parse_multiplicative() {
        auto lhs = parse_concat();
        for (;;) {
            const Token& t = peek();
            if (t.is_symbol("*") || t.is_symbol("/") || t.is_symbol("%")) {
                std::string op = next().text;
                lhs = Expr::binary(op, std::move(lhs), parse_concat());
                continue;
            }
            return lhs;
        }
    }

    ExprPtr parse_concat() {
        auto lhs = parse_unary();
        while (peek().is_symbol("||") || peek().is_symbol("->")) {
            if (peek().is_symbol("->")) fail("JSON operators are not supported");
            ++pos_;
            lhs = Expr::binary("||", std::move(lhs), parse_unary());
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        const Token& t = peek();
        if (t.is_symbol("-") || t.is_symbol("+") || t.is_symbol("~")) {
            std::string op = next().text;
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Unary;
            e->text = op;
            e->args.push_back(parse_unary());
            return e;
        }
        auto e = parse_primary();
        while (accept_word("COLLATE")) {
            auto c = std::make_unique<Expr>();
            c->kind = ExprKind::Collate;
            c->text = identifier_token().text;
            c->args.push_back(std::move(e));
            e = std::move(c);
        }
        return e;
    }

    ExprPtr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Number: {
                ++pos_;
                const bool real = t.text.find_first_of(".eE") != std::string::npos;
                return Expr::literal_of(real ? LiteralKind::Real : LiteralKind::Integer, t.text);
            }
            case TokenKind::String:
                ++pos_;
                return Expr::literal_of(LiteralKind::String, t.text);
            case TokenKind::Symbol:
                if (t.is_symbol("(")) {
                    ++pos_;
                    if (peek().is_word("SELECT")) {
                        auto e = std::make_unique<Expr>();
                        e->kind = ExprKind::Subquery;
                        e->subquery = parse_query();
                        expect_symbol(")");
                        return e;
                    }
                    auto inner = parse_expr();
                    if (peek().is_symbol(",")) fail("row values are not supported");
                    expect_symbol(")");
                    return inner;
                }
                fail("unexpected symbol");
            case TokenKind::End:
                fail("unexpected end of query");
            case TokenKind::Word:
            case TokenKind::QuotedIdent:
                break;
        }

        if (t.kind == TokenKind::Word) {
            if (t.is_word("NULL")) {
                ++pos_;
                return Expr::literal_of(LiteralKind::Null, "NULL");
            }
            if (t.is_word("TRUE") || t.is_word("FALSE")) {
                ++pos_;
                return Expr::literal_of(LiteralKind::Integer, t.is_word("TRUE") ? "1" : "0");
            }
            if (t.is_word("CASE")) return parse_case();
            if (t.is_word("CAST")) return parse_cast();
            if (t.is_word("EXISTS") || (t.is_word("NOT") && peek(1).is_word("EXISTS"))) {
                auto e = std::make_unique<Expr>();
                e->kind = ExprKind::Exists;
                e->negated = accept_word("NOT");
                expect_word("EXISTS");
                expect_symbol("(");
                e->subquery = parse_query();
                expect_symbol(")");
                return e;
            }
            if (peek(1).is_symbol("(") && !is_reserved_word(t.text)) return parse_function();
            if (is_reserved_word(t.text)) fail("unexpected keyword");
        }

        // Column reference: name | qualifier.name | schema.qualifier.name
        const Token& first = next();
        if (accept_symbol(".")) {
            const Token* qual = &first;
            const Token* name = &identifier_token();
            if (accept_symbol(".")) {
                qual = name;
                name = &identifier_token();
            }
            auto e = Expr::column(qual->text, name->text);
            e->qualifier_span = span_of(*qual);
            e->name_span = span_of(*name);
            e->name_quote = name->quote;
            return e;
        }
        auto e = Expr::column("", first.text);
        e->name_span = span_of(first);
        e->name_quote = first.quote;
        return e;
    }

    ExprPtr parse_function() {
        const Token& name = next();
        expect_symbol("(");
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Function;
        e->text = name.text;
        if (accept_symbol("*")) {
            e->star_arg = true;
        } else if (!peek().is_symbol(")")) {
            if (accept_word("DISTINCT")) e->distinct = true;
            do {
                e->args.push_back(parse_expr());
            } while (accept_symbol(","));
        }
        expect_symbol(")");
        if (peek().is_word("FILTER") || peek().is_word("OVER"))
            fail("window/filter clauses are not supported");
        return e;
    }

    ExprPtr parse_case() {
        expect_word("CASE");
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Case;
        if (!peek().is_word("WHEN")) {
            e->has_operand = true;
            e->args.push_back(parse_expr());
        }
        if (!peek().is_word("WHEN")) fail("expected WHEN");
        while (accept_word("WHEN")) {
            e->args.push_back(parse_expr());
            expect_word("THEN");
            e->args.push_back(parse_expr());
        }
        if (accept_word("ELSE")) {
            e->has_else = true;
            e->args.push_back(parse_expr());
        }
        expect_word("END");
        return e;
    }

    ExprPtr parse_cast() {
        expect_word("CAST");
        expect_symbol("(");
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Cast;
        e->args.push_back(parse_expr());
        expect_word("AS");
        std::string type;
        while (peek().kind == TokenKind::Word) {
            if (!type.empty()) type += ' ';
            type += next().text;
        }
        if (type.empty()) fail("expected type name");
        if (accept_symbol("(")) {
            type += '(';
            while (!accept_symbol(")")) {
                if (at_end()) fail("unterminated type");
                type += next().text;
            }
            type += ')';
        }
        e->text = type;
        expect_symbol(")");
        return e;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace

QueryPtr parse_query(std::string_view sql) { return Parser(sql).parse_statement(); }

}  // namespace schemashift::sql
