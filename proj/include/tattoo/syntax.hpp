#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tattoo/detail/lexer.hpp"
#include "tattoo/error.hpp"

namespace tattoo {

/// Function symbol with its arity.
struct Functor {
    std::string name;
    std::size_t arity = 0;

    auto operator<=>(const Functor&) const = default;
    bool operator==(const Functor&) const = default;

    std::string str() const { return name + "/" + std::to_string(arity); }
};

/// Predicate symbol with its arity. Kept apart from Functor so the two tables never mix.
struct Predicate {
    std::string name;
    std::size_t arity = 0;

    auto operator<=>(const Predicate&) const = default;
    bool operator==(const Predicate&) const = default;

    std::string str() const { return name + "/" + std::to_string(arity); }
};

inline const Functor kNil{"[]", 0};
inline const Functor kCons{".", 2};
inline const Functor kVarConstant{"$VAR", 0};
inline const Predicate kUnify{"=", 2};

/// First-order term. Constants are compounds of arity 0.
struct Term {
    enum class Kind { variable, compound };

    Kind kind = Kind::compound;
    std::string name;
    std::vector<Term> args;

    static Term variable(std::string name) { return Term{Kind::variable, std::move(name), {}}; }
    static Term constant(std::string name) { return Term{Kind::compound, std::move(name), {}}; }
    static Term compound(std::string name, std::vector<Term> args) {
        return Term{Kind::compound, std::move(name), std::move(args)};
    }
    static Term cons(Term head, Term tail) {
        return compound(kCons.name, {std::move(head), std::move(tail)});
    }
    static Term nil() { return constant(kNil.name); }

    bool is_var() const { return kind == Kind::variable; }
    Functor functor() const { return {name, args.size()}; }

    bool is_ground() const {
        if (is_var())
            return false;
        return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
    }

    std::size_t depth() const {
        std::size_t d = 0;
        for (const auto& a : args)
            d = std::max(d, a.depth() + 1);
        return d;
    }

    bool operator==(const Term&) const = default;
    std::strong_ordering operator<=>(const Term& other) const {
        if (auto c = kind <=> other.kind; c != 0)
            return c;
        if (auto c = name <=> other.name; c != 0)
            return c;
        return std::lexicographical_compare_three_way(args.begin(), args.end(), other.args.begin(), other.args.end());
    }
};

/// Half-open byte range into the source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    auto operator<=>(const Span&) const = default;
    bool operator==(const Span&) const = default;
};

struct Atom {
    std::string name;
    std::vector<Term> args;
    Span span;

    Predicate predicate() const { return {name, args.size()}; }
    bool operator==(const Atom&) const = default;
};

struct Clause {
    Atom head;
    std::vector<Atom> body;
    std::size_t index = 0;
    Span span;

    bool is_fact() const { return body.empty(); }
    bool operator==(const Clause&) const = default;
};

/// (clause index, body position), both 0-based.
struct BodyCoord {
    std::size_t clause = 0;
    std::size_t position = 0;

    auto operator<=>(const BodyCoord&) const = default;
    bool operator==(const BodyCoord&) const = default;
};

using Signature = std::set<Functor>;

struct Program {
    std::vector<Clause> clauses;
    std::vector<std::string> diagnostics;

    /// Predicates with at least one clause.
    std::set<Predicate> defined() const {
        std::set<Predicate> out;
        for (const auto& c : clauses)
            out.insert(c.head.predicate());
        return out;
    }

    /// Defined predicates plus every predicate called in a body.
    std::set<Predicate> predicates() const {
        std::set<Predicate> out = defined();
        for (const auto& c : clauses)
            for (const auto& b : c.body)
                out.insert(b.predicate());
        return out;
    }

    std::vector<const Clause*> clauses_of(const Predicate& p) const {
        std::vector<const Clause*> out;
        for (const auto& c : clauses)
            if (c.head.predicate() == p)
                out.push_back(&c);
        return out;
    }

    std::size_t body_literal_count() const {
        std::size_t n = 0;
        for (const auto& c : clauses)
            n += c.body.size();
        return n;
    }

    bool operator==(const Program& other) const { return clauses == other.clauses; }
};

// ---------------------------------------------------------------------------
// Variables

inline void collect_variables(const Term& t, std::vector<std::string>& out) {
    if (t.is_var()) {
        if (std::find(out.begin(), out.end(), t.name) == out.end())
            out.push_back(t.name);
        return;
    }
    for (const auto& a : t.args)
        collect_variables(a, out);
}

/// Variables of a clause in order of first occurrence (head first).
inline std::vector<std::string> clause_variables(const Clause& c) {
    std::vector<std::string> out;
    for (const auto& a : c.head.args)
        collect_variables(a, out);
    for (const auto& b : c.body)
        for (const auto& a : b.args)
            collect_variables(a, out);
    return out;
}

// ---------------------------------------------------------------------------
// Printing

inline bool plain_atom_name(std::string_view s) {
    if (s.empty())
        return false;
    if (s == "[]")
        return true;
    if (std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return true;
    if (!std::islower(static_cast<unsigned char>(s[0])))
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline std::string quote_atom(std::string_view s) {
    if (plain_atom_name(s))
        return std::string(s);
    std::string out = "'";
    for (char c : s) {
        if (c == '\'' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "'";
}

inline std::string to_string(const Term& t) {
    if (t.is_var())
        return t.name;
    if (t.functor() == kCons) {
        std::string out = "[" + to_string(t.args[0]);
        const Term* tail = &t.args[1];
        while (!tail->is_var() && tail->functor() == kCons) {
            out += "," + to_string(tail->args[0]);
            tail = &tail->args[1];
        }
        if (tail->is_var() || tail->functor() != kNil)
            out += "|" + to_string(*tail);
        return out + "]";
    }
    std::string out = quote_atom(t.name);
    if (!t.args.empty()) {
        out += "(";
        for (std::size_t i = 0; i < t.args.size(); ++i)
            out += (i ? "," : "") + to_string(t.args[i]);
        out += ")";
    }
    return out;
}

inline std::string to_string(const Atom& a) {
    if (a.predicate() == kUnify)
        return to_string(a.args[0]) + " = " + to_string(a.args[1]);
    std::string out = quote_atom(a.name);
    if (!a.args.empty()) {
        out += "(";
        for (std::size_t i = 0; i < a.args.size(); ++i)
            out += (i ? "," : "") + to_string(a.args[i]);
        out += ")";
    }
    return out;
}

inline std::string to_string(const Clause& c) {
    std::string out = to_string(c.head);
    if (!c.body.empty()) {
        out += " :- ";
        for (std::size_t i = 0; i < c.body.size(); ++i)
            out += (i ? ", " : "") + to_string(c.body[i]);
    }
    return out + ".";
}

/// Canonical text: one clause per line. Re-parsing it yields the same clauses modulo spans.
inline std::string print_program(const Program& p) {
    std::string out;
    for (const auto& c : p.clauses)
        out += to_string(c) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class TermParser {
public:
    explicit TermParser(std::string_view text) : lex_(text) {}

    Lexer& lexer() { return lex_; }

    Term term() {
        const Token t = lex_.peek();
        switch (t.kind) {
        case Tok::var: {
            lex_.next();
            if (t.text == "_")
                return Term::variable("_G" + std::to_string(++anon_));
            return Term::variable(t.text);
        }
        case Tok::name: {
            lex_.next();
            if (t.text == kReservedVar)
                lex_.fail("reserved name $VAR may not appear in program text", t);
            if (lex_.peek().kind == Tok::lparen && lex_.peek().offset == lex_.consumed_end()) {
                lex_.next();
                std::vector<Term> args = arguments();
                lex_.expect(Tok::rparen, "')' closing argument list");
                return Term::compound(t.text, std::move(args));
            }
            return Term::constant(t.text);
        }
        case Tok::lbracket: {
            lex_.next();
            if (lex_.peek().kind == Tok::rbracket) {
                lex_.next();
                return Term::nil();
            }
            std::vector<Term> items = arguments();
            Term tail = Term::nil();
            if (lex_.peek().kind == Tok::bar) {
                lex_.next();
                tail = term();
            }
            lex_.expect(Tok::rbracket, "']' closing list");
            for (auto it = items.rbegin(); it != items.rend(); ++it)
                tail = Term::cons(std::move(*it), std::move(tail));
            return tail;
        }
        default:
            lex_.fail("expected a term" + Lexer::describe(t), t);
        }
    }

    std::vector<Term> arguments() {
        std::vector<Term> args;
        args.push_back(term());
        while (lex_.peek().kind == Tok::comma) {
            lex_.next();
            args.push_back(term());
        }
        return args;
    }

private:
    Lexer lex_;
    std::size_t anon_ = 0;
};

inline Atom term_to_atom(Term t, const Token& at, Lexer& lex, Span span) {
    if (t.is_var())
        lex.fail("a variable cannot be used as a goal", at);
    return Atom{std::move(t.name), std::move(t.args), span};
}

} // namespace detail

/// Parses a single term, e.g. a goal such as `app(list,dynamic,dynamic)`.
inline Term parse_term(std::string_view text) {
    detail::TermParser p(text);
    Term t = p.term();
    if (p.lexer().peek().kind == detail::Tok::end)
        p.lexer().next();
    if (p.lexer().peek().kind != detail::Tok::eof)
        p.lexer().fail("unexpected text after term", p.lexer().peek());
    return t;
}

inline Program parse_program(std::string_view text) {
    using detail::Tok;
    detail::TermParser p(text);
    auto& lex = p.lexer();
    Program prog;

    auto goal = [&]() {
        const detail::Token start = lex.peek();
        Term lhs = p.term();
        if (lex.peek().kind == Tok::equals) {
            lex.next();
            Term rhs = p.term();
            return Atom{kUnify.name, {std::move(lhs), std::move(rhs)}, Span{start.offset, lex.consumed_end()}};
        }
        return detail::term_to_atom(std::move(lhs), start, lex, Span{start.offset, lex.consumed_end()});
    };

    while (lex.peek().kind != Tok::eof) {
        const detail::Token start = lex.peek();
        Clause c;
        c.index = prog.clauses.size();
        c.head = goal();
        if (c.head.predicate() == kUnify)
            lex.fail("cannot define the builtin =/2", start);
        if (std::isdigit(static_cast<unsigned char>(c.head.name[0])) && !start.quoted)
            lex.fail("a number cannot be used as a clause head", start);
        if (lex.peek().kind == Tok::neck) {
            lex.next();
            c.body.push_back(goal());
            while (lex.peek().kind == Tok::comma) {
                lex.next();
                c.body.push_back(goal());
            }
        }
        lex.expect(Tok::end, "'.' ending the clause");
        c.span = Span{start.offset, lex.consumed_end()};
        prog.clauses.push_back(std::move(c));
    }

    std::map<std::string, std::set<std::size_t>> arities;
    for (const auto& pred : prog.predicates())
        arities[pred.name].insert(pred.arity);
    for (const auto& [name, set] : arities) {
        if (set.size() < 2)
            continue;
        std::string msg = "warning: predicate " + quote_atom(name) + " is used with arities";
        for (auto a : set)
            msg += " " + std::to_string(a);
        msg += "; treated as distinct predicates";
        prog.diagnostics.push_back(std::move(msg));
    }
    return prog;
}

// ---------------------------------------------------------------------------
// Signature

inline void collect_functors(const Term& t, Signature& out) {
    if (t.is_var())
        return;
    out.insert(t.functor());
    for (const auto& a : t.args)
        collect_functors(a, out);
}

/// Function symbols of the program's argument terms and of `extra`, plus $VAR/0.
/// Predicate symbols are not function symbols and are excluded.
inline Signature signature_of(const Program& program, const std::vector<Term>& extra = {}) {
    Signature sig{kVarConstant};
    for (const auto& c : program.clauses) {
        for (const auto& a : c.head.args)
            collect_functors(a, sig);
        for (const auto& b : c.body)
            for (const auto& a : b.args)
                collect_functors(a, sig);
    }
    for (const auto& t : extra)
        collect_functors(t, sig);
    return sig;
}

} // namespace tattoo
