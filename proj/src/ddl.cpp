#include "schemashift/ddl.hpp"

#include <sstream>

#include "schemashift/errors.hpp"
#include "schemashift/ident.hpp"
#include "schemashift/lexer.hpp"

namespace schemashift {

namespace {

struct PendingFk {
    std::string child_table;
    std::vector<std::string> child_columns;
    std::string parent_table;
    std::vector<std::string> parent_columns;  // empty: parent's primary key
    std::size_t line = 0;
    std::size_t offset = 0;
};

class DdlParser {
public:
    explicit DdlParser(std::string_view text) {
        try {
            tokens_ = tokenize(text);
        } catch (const SqlSyntaxError& e) {
            throw SyntaxError(e.what(), line_of(text, e.offset()), e.offset());
        }
    }

    Schema parse(std::string db_id) {
        Schema schema;
        schema.db_id = std::move(db_id);
        while (!at_end()) {
            if (peek().is_symbol(";")) {
                ++pos_;
                continue;
            }
            schema.tables.push_back(parse_create_table());
        }
        resolve_foreign_keys(schema);
        return schema;
    }

private:
    static std::size_t line_of(std::string_view text, std::size_t offset) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < offset && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        return line;
    }

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
        throw SyntaxError(msg + (t.kind == TokenKind::End ? " at end of input" : " near '" + t.text + "'"),
                          t.line, t.offset);
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

    std::string identifier() {
        const Token& t = peek();
        if (t.kind == TokenKind::QuotedIdent || t.kind == TokenKind::Word ||
            t.kind == TokenKind::String) {
            ++pos_;
            return t.text;
        }
        fail("expected identifier");
    }

    // Skips a parenthesised group whose opening '(' is the current token.
    void skip_group() {
        expect_symbol("(");
        int depth = 1;
        while (depth > 0) {
            if (at_end()) fail("unbalanced parentheses");
            const Token& t = next();
            if (t.is_symbol("(")) ++depth;
            if (t.is_symbol(")")) --depth;
        }
    }

    std::vector<std::string> column_list() {
        std::vector<std::string> cols;
        expect_symbol("(");
        do {
            cols.push_back(identifier());
            accept_word("COLLATE") ? (void)identifier() : (void)0;
            if (!accept_word("ASC")) accept_word("DESC");
        } while (accept_symbol(","));
        expect_symbol(")");
        return cols;
    }

    void skip_conflict_clause() {
        if (accept_word("ON")) {
            expect_word("CONFLICT");
            identifier();
        }
    }

    // REFERENCES parent [(cols)] [actions...]; the REFERENCES keyword is consumed.
    void parse_references(PendingFk& fk) {
        fk.parent_table = identifier();
        if (peek().is_symbol("(")) fk.parent_columns = column_list();
        for (;;) {
            if (accept_word("ON")) {
                if (!accept_word("DELETE")) expect_word("UPDATE");
                if (accept_word("SET")) {
                    if (!accept_word("NULL")) expect_word("DEFAULT");
                } else if (accept_word("NO")) {
                    expect_word("ACTION");
                } else if (!accept_word("CASCADE") && !accept_word("RESTRICT")) {
                    fail("expected foreign key action");
                }
            } else if (accept_word("MATCH")) {
                identifier();
            } else if (peek().is_word("NOT") && peek(1).is_word("DEFERRABLE")) {
                pos_ += 2;
                skip_deferrable_tail();
            } else if (accept_word("DEFERRABLE")) {
                skip_deferrable_tail();
            } else {
                break;
            }
        }
    }

    void skip_deferrable_tail() {
        if (accept_word("INITIALLY")) {
            if (!accept_word("DEFERRED")) expect_word("IMMEDIATE");
        }
    }

    bool at_column_constraint() const {
        static constexpr std::string_view kws[] = {"CONSTRAINT", "PRIMARY", "NOT",     "NULL",
                                                   "UNIQUE",     "CHECK",   "DEFAULT", "COLLATE",
                                                   "REFERENCES", "GENERATED", "AS"};
        for (auto kw : kws)
            if (peek().is_word(kw)) return true;
        return false;
    }

    std::string type_name() {
        std::string type;
        while (peek().kind == TokenKind::Word && !at_column_constraint()) {
            if (!type.empty()) type += ' ';
            type += next().text;
        }
        if (!type.empty() && peek().is_symbol("(")) {
            type += '(';
            expect_symbol("(");
            bool first = true;
            while (!peek().is_symbol(")")) {
                if (at_end()) fail("unterminated type arguments");
                const Token& t = next();
                if (t.is_symbol(",")) {
                    type += ',';
                    first = true;
                    continue;
                }
                if (!first && !t.is_symbol("-") && !t.is_symbol("+")) type += ' ';
                type += t.text;
                first = t.is_symbol("-") || t.is_symbol("+");
            }
            expect_symbol(")");
            type += ')';
        }
        return type;
    }

    void skip_default_value() {
        if (peek().is_symbol("(")) {
            skip_group();
            return;
        }
        if (accept_symbol("-") || accept_symbol("+")) {
            next();
            return;
        }
        if (at_end()) fail("expected default value");
        next();
    }

    Table parse_create_table() {
        expect_word("CREATE");
        if (!accept_word("TEMP")) accept_word("TEMPORARY");
        expect_word("TABLE");
        if (accept_word("IF")) {
            expect_word("NOT");
            expect_word("EXISTS");
        }
        Table table;
        table.name = identifier();
        if (accept_symbol(".")) table.name = identifier();  // schema-qualified
        expect_symbol("(");

        bool table_constraints = false;
        do {
            if (peek().is_word("CONSTRAINT") || peek().is_word("PRIMARY") ||
                peek().is_word("FOREIGN") || peek().is_word("UNIQUE") || peek().is_word("CHECK")) {
                table_constraints = true;
                parse_table_constraint(table);
            } else {
                if (table_constraints) fail("column definition after table constraint");
                parse_column(table);
            }
        } while (accept_symbol(","));
        expect_symbol(")");
        while (accept_word("WITHOUT") || accept_word("STRICT") || accept_symbol(",")) {
            if (peek().is_word("ROWID")) ++pos_;
        }
        if (!at_end() && !accept_symbol(";")) fail("expected ';'");
        return table;
    }

    void parse_column(Table& table) {
        Column col;
        col.name = identifier();
        col.data_type = type_name();
        for (;;) {
            if (accept_word("CONSTRAINT")) {
                identifier();
                continue;
            }
            if (accept_word("PRIMARY")) {
                expect_word("KEY");
                if (!accept_word("ASC")) accept_word("DESC");
                skip_conflict_clause();
                accept_word("AUTOINCREMENT");
                if (!table.primary_key.empty())
                    throw SyntaxError("table " + table.name + " has more than one primary key",
                                      peek().line, peek().offset);
                table.primary_key.push_back(col.name);
                continue;
            }
            if (accept_word("NOT")) {
                expect_word("NULL");
                skip_conflict_clause();
                col.nullable = false;
                continue;
            }
            if (accept_word("NULL")) continue;
            if (accept_word("UNIQUE")) {
                skip_conflict_clause();
                continue;
            }
            if (accept_word("CHECK")) {
                skip_group();
                continue;
            }
            if (accept_word("DEFAULT")) {
                skip_default_value();
                continue;
            }
            if (accept_word("COLLATE")) {
                identifier();
                continue;
            }
            if (peek().is_word("REFERENCES")) {
                const Token& at = next();
                PendingFk fk;
                fk.child_table = table.name;
                fk.child_columns = {col.name};
                fk.line = at.line;
                fk.offset = at.offset;
                parse_references(fk);
                pending_.push_back(std::move(fk));
                continue;
            }
            if (accept_word("GENERATED")) {
                expect_word("ALWAYS");
            }
            if (accept_word("AS")) {
                skip_group();
                if (!accept_word("STORED")) accept_word("VIRTUAL");
                continue;
            }
            break;
        }
        table.columns.push_back(std::move(col));
    }

    void parse_table_constraint(Table& table) {
        if (accept_word("CONSTRAINT")) identifier();
        if (accept_word("PRIMARY")) {
            expect_word("KEY");
            auto cols = column_list();
            skip_conflict_clause();
            if (!table.primary_key.empty())
                throw SyntaxError("table " + table.name + " has more than one primary key",
                                  peek().line, peek().offset);
            table.primary_key = std::move(cols);
            return;
        }
        if (accept_word("UNIQUE")) {
            column_list();
            skip_conflict_clause();
            return;
        }
        if (accept_word("CHECK")) {
            skip_group();
            return;
        }
        if (peek().is_word("FOREIGN")) {
            const Token& at = next();
            expect_word("KEY");
            PendingFk fk;
            fk.child_table = table.name;
            fk.child_columns = column_list();
            fk.line = at.line;
            fk.offset = at.offset;
            expect_word("REFERENCES");
            parse_references(fk);
            pending_.push_back(std::move(fk));
            return;
        }
        fail("expected table constraint");
    }

    void resolve_foreign_keys(Schema& schema) {
        for (const auto& fk : pending_) {
            const Table* parent = schema.find_table(fk.parent_table);
            if (!parent)
                throw IntegrityError("foreign key of " + fk.child_table +
                                         " references missing table " + fk.parent_table,
                                     fk.parent_table);
            std::vector<std::string> parent_cols = fk.parent_columns;
            if (parent_cols.empty()) parent_cols = parent->primary_key;
            if (parent_cols.size() != fk.child_columns.size())
                throw SyntaxError("foreign key column count mismatch on " + fk.child_table, fk.line,
                                  fk.offset);
            for (std::size_t i = 0; i < parent_cols.size(); ++i) {
                schema.foreign_keys.push_back(
                    {fk.child_table, fk.child_columns[i], parent->name, parent_cols[i]});
            }
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<PendingFk> pending_;
};

}  // namespace

Schema parse_ddl(std::string_view text, std::string db_id) {
    Schema schema = DdlParser(text).parse(std::move(db_id));
    for (const auto& v : validate(schema)) {
        switch (v.code) {
            case ViolationCode::DupTable:
                throw IntegrityError("duplicate table name " + v.subject, v.subject);
            case ViolationCode::DupColumn:
                throw IntegrityError("duplicate column name " + v.path, v.subject);
            case ViolationCode::BadPrimaryKey:
                throw IntegrityError("primary key names unknown or repeated column " + v.path,
                                     v.subject);
            case ViolationCode::DanglingFk:
                throw IntegrityError("dangling foreign key " + v.path, v.subject);
            case ViolationCode::SelfFk:
                throw IntegrityError("foreign key references itself " + v.path, v.subject);
            case ViolationCode::EmptyName:
                throw IntegrityError("empty identifier at " + v.path, v.subject);
        }
    }
    return schema;
}

std::string render_table_ddl(const Schema& schema, const Table& table) {
    std::ostringstream out;
    out << "CREATE TABLE " << quote_ident(table.name) << " (\n";
    bool first = true;
    auto sep = [&] {
        if (!first) out << ",\n";
        first = false;
    };
    for (const auto& c : table.columns) {
        sep();
        out << "  " << quote_ident(c.name);
        if (!c.data_type.empty()) out << ' ' << c.data_type;
        if (!c.nullable) out << " NOT NULL";
    }
    if (!table.primary_key.empty()) {
        sep();
        out << "  PRIMARY KEY (";
        for (std::size_t i = 0; i < table.primary_key.size(); ++i)
            out << (i ? ", " : "") << quote_ident(table.primary_key[i]);
        out << ')';
    }
    for (const auto& fk : schema.foreign_keys) {
        if (!iequals(fk.child_table, table.name)) continue;
        sep();
        out << "  FOREIGN KEY (" << quote_ident(fk.child_column) << ") REFERENCES "
            << quote_ident(fk.parent_table) << " (" << quote_ident(fk.parent_column) << ')';
    }
    out << "\n);\n";
    return out.str();
}

std::string render_ddl(const Schema& schema) {
    std::string out;
    for (const auto& t : schema.tables) out += render_table_ddl(schema, t);
    return out;
}

}  // namespace schemashift
