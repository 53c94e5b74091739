#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace schemashift {

enum class TokenKind {
    Word,         // bare identifier or keyword
    QuotedIdent,  // "x", `x` or [x]
    String,       // 'x'
    Number,
    Symbol,       // operators and punctuation
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;         // unquoted/unescaped value
    std::size_t offset = 0;   // byte offset of the raw token in the source
    std::size_t length = 0;   // raw byte length including quotes
    std::size_t line = 1;
    char quote = 0;           // opening quote character for QuotedIdent/String

    bool is_word(std::string_view kw) const;
    bool is_symbol(std::string_view sym) const;
    bool is_identifier() const { return kind == TokenKind::Word || kind == TokenKind::QuotedIdent; }
};

// Tokenizes SQLite-flavoured SQL. Comments are dropped; every token keeps its
// source offset so callers can splice edits into the original text.
// Throws SqlSyntaxError on unterminated literals or stray characters.
std::vector<Token> tokenize(std::string_view sql);

}  // namespace schemashift
