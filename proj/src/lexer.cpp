#include "schemashift/lexer.hpp"

#include <array>
#include <cctype>

#include "schemashift/errors.hpp"
#include "schemashift/ident.hpp"

namespace schemashift {

bool Token::is_word(std::string_view kw) const {
    return kind == TokenKind::Word && iequals(text, kw);
}

bool Token::is_symbol(std::string_view sym) const {
    return kind == TokenKind::Symbol && text == sym;
}

namespace {

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool ident_char(char c) {
    return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '$';
}

}  // namespace

std::vector<Token> tokenize(std::string_view sql) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t line = 1;
    const std::size_t n = sql.size();

    auto advance_lines = [&](std::size_t from, std::size_t to) {
        for (std::size_t k = from; k < to; ++k)
            if (sql[k] == '\n') ++line;
    };

    while (i < n) {
        const char c = sql[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (c == '\n') ++line;
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
            while (i < n && sql[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
            const auto end = sql.find("*/", i + 2);
            if (end == std::string_view::npos) throw SqlSyntaxError("unterminated comment", i);
            advance_lines(i, end + 2);
            i = end + 2;
            continue;
        }

        Token tok;
        tok.offset = i;
        tok.line = line;

        if (c == '\'' || c == '"' || c == '`' || c == '[') {
            const char close = c == '[' ? ']' : c;
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < n) {
                if (sql[j] == close) {
                    if (close != ']' && j + 1 < n && sql[j + 1] == close) {
                        value.push_back(close);
                        j += 2;
                        continue;
                    }
                    closed = true;
                    ++j;
                    break;
                }
                value.push_back(sql[j]);
                ++j;
            }
            if (!closed) throw SqlSyntaxError("unterminated quoted token", i);
            tok.kind = c == '\'' ? TokenKind::String : TokenKind::QuotedIdent;
            tok.text = std::move(value);
            tok.quote = c;
            tok.length = j - i;
            advance_lines(i, j);
            i = j;
            out.push_back(std::move(tok));
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(sql[j]))) ++j;
            if (j < n && sql[j] == '.') {
                ++j;
                while (j < n && std::isdigit(static_cast<unsigned char>(sql[j]))) ++j;
            }
            if (j < n && (sql[j] == 'e' || sql[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < n && (sql[k] == '+' || sql[k] == '-')) ++k;
                if (k < n && std::isdigit(static_cast<unsigned char>(sql[k]))) {
                    j = k;
                    while (j < n && std::isdigit(static_cast<unsigned char>(sql[j]))) ++j;
                }
            }
            tok.kind = TokenKind::Number;
            tok.text = std::string(sql.substr(i, j - i));
            tok.length = j - i;
            i = j;
            out.push_back(std::move(tok));
            continue;
        }

        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < n && ident_char(sql[j])) ++j;
            tok.kind = TokenKind::Word;
            tok.text = std::string(sql.substr(i, j - i));
            tok.length = j - i;
            i = j;
            out.push_back(std::move(tok));
            continue;
        }

        static constexpr std::array<std::string_view, 9> two_char = {"<=", ">=", "<>", "!=", "==",
                                                                      "||", "<<", ">>", "->"};
        std::string_view sym;
        if (i + 1 < n) {
            const auto pair = sql.substr(i, 2);
            for (auto candidate : two_char)
                if (pair == candidate) sym = candidate;
        }
        if (sym.empty()) {
            static constexpr std::string_view singles = "(),;.*+-/%<>=&|~";
            if (singles.find(c) == std::string_view::npos)
                throw SqlSyntaxError(std::string("unexpected character '") + c + "'", i);
            sym = sql.substr(i, 1);
        }
        tok.kind = TokenKind::Symbol;
        tok.text = std::string(sym);
        tok.length = sym.size();
        i += sym.size();
        out.push_back(std::move(tok));
    }

    Token end;
    end.kind = TokenKind::End;
    end.offset = n;
    end.line = line;
    out.push_back(end);
    return out;
}

}  // namespace schemashift
