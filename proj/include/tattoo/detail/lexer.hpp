#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "tattoo/error.hpp"

namespace tattoo::detail {

enum class Tok {
    name,      // atom, possibly quoted; numbers are atoms too
    var,
    lparen,
    rparen,
    lbracket,
    rbracket,
    bar,
    comma,
    semicolon,
    end,       // clause-terminating '.'
    neck,      // :-
    rule,      // -->
    arrow,     // ->
    equals,
    eof
};

struct Token {
    Tok kind = Tok::eof;
    std::string text;
    bool quoted = false;
    std::size_t offset = 0;
    std::size_t line = 1;
    std::size_t column = 1;
};

inline constexpr std::string_view kReservedVar = "$VAR";

/// Tokenizer for the Edinburgh-style subset shared by program and type files.
class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& what, const Token& at) const {
        throw ParseError(what, at.line, at.column);
    }

    Token expect(Tok kind, const char* what) {
        if (current_.kind != kind)
            fail(std::string("expected ") + what + describe(current_), current_);
        return next();
    }

    /// Offset just past the last consumed token.
    std::size_t consumed_end() const { return last_end_; }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::eof)
            return ", found end of input";
        return ", found '" + t.text + "'";
    }

private:
    char at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_layout() {
        for (;;) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                bump();
            if (at(pos_) == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    bump();
                continue;
            }
            if (at(pos_) == '/' && at(pos_ + 1) == '*') {
                Token open{Tok::eof, "/*", false, pos_, line_, col_};
                bump();
                bump();
                while (pos_ < text_.size() && !(at(pos_) == '*' && at(pos_ + 1) == '/'))
                    bump();
                if (pos_ >= text_.size())
                    fail("unterminated block comment", open);
                bump();
                bump();
                continue;
            }
            return;
        }
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    void advance() {
        last_end_ = end_of_current_;
        skip_layout();
        Token t;
        t.offset = pos_;
        t.line = line_;
        t.column = col_;
        if (pos_ >= text_.size()) {
            t.kind = Tok::eof;
            current_ = t;
            end_of_current_ = pos_;
            return;
        }
        const char c = text_[pos_];
        const std::size_t start = pos_;
        auto take = [&](Tok kind, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i)
                bump();
            t.kind = kind;
            t.text = std::string(text_.substr(start, n));
        };
        if (std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c))) {
            const bool digits = std::isdigit(static_cast<unsigned char>(c));
            while (pos_ < text_.size() && (digits ? std::isdigit(static_cast<unsigned char>(text_[pos_])) : ident_char(text_[pos_])))
                bump();
            t.kind = Tok::name;
            t.text = std::string(text_.substr(start, pos_ - start));
        } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() && ident_char(text_[pos_]))
                bump();
            t.kind = Tok::var;
            t.text = std::string(text_.substr(start, pos_ - start));
        } else if (c == '\'') {
            bump();
            std::string value;
            for (;;) {
                if (pos_ >= text_.size())
                    fail("unterminated quoted atom", t);
                if (text_[pos_] == '\'') {
                    if (at(pos_ + 1) == '\'') {
                        value += '\'';
                        bump();
                        bump();
                        continue;
                    }
                    bump();
                    break;
                }
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                    bump();
                    const char e = text_[pos_];
                    value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    bump();
                    continue;
                }
                value += text_[pos_];
                bump();
            }
            t.kind = Tok::name;
            t.text = std::move(value);
            t.quoted = true;
        } else if (c == '$') {
            bump();
            while (pos_ < text_.size() && ident_char(text_[pos_]))
                bump();
            t.kind = Tok::name;
            t.text = std::string(text_.substr(start, pos_ - start));
            if (t.text != kReservedVar)
                fail("unexpected character '$'", t);
        } else if (c == '(') {
            take(Tok::lparen, 1);
        } else if (c == ')') {
            take(Tok::rparen, 1);
        } else if (c == '[') {
            take(Tok::lbracket, 1);
        } else if (c == ']') {
            take(Tok::rbracket, 1);
        } else if (c == '|') {
            take(Tok::bar, 1);
        } else if (c == ',') {
            take(Tok::comma, 1);
        } else if (c == ';') {
            take(Tok::semicolon, 1);
        } else if (c == '=') {
            take(Tok::equals, 1);
        } else if (c == '.') {
            take(Tok::end, 1);
        } else if (c == ':' && at(pos_ + 1) == '-') {
            take(Tok::neck, 2);
        } else if (c == '-' && at(pos_ + 1) == '-' && at(pos_ + 2) == '>') {
            take(Tok::rule, 3);
        } else if (c == '-' && at(pos_ + 1) == '>') {
            take(Tok::arrow, 2);
        } else {
            t.text = std::string(1, c);
            fail(std::string("unexpected character '") + c + "'", t);
        }
        current_ = t;
        end_of_current_ = pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    Token current_;
    std::size_t end_of_current_ = 0;
    std::size_t last_end_ = 0;
};

} // namespace tattoo::detail
