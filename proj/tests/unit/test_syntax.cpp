#include <gtest/gtest.h>

#include "support/helpers.hpp"
#include "tattoo/syntax.hpp"

using namespace tattoo;

TEST(Parse, SingleFact) {
    const Program p = parse_program("app([],Y,Y).");
    ASSERT_EQ(p.clauses.size(), 1u);
    EXPECT_TRUE(p.clauses[0].is_fact());
    EXPECT_EQ(p.predicates(), (std::set<Predicate>{{"app", 3}}));
    EXPECT_TRUE(signature_of(p).contains(kNil));
}

TEST(Parse, TransposeShape) {
    const Program p = parse_program(testsupport::read_sample("transpose.pl"));
    EXPECT_EQ(p.clauses.size(), 6u);
    EXPECT_EQ(p.defined(), (std::set<Predicate>{{"transpose", 2}, {"makerow", 3}, {"nullrows", 1}}));
    EXPECT_EQ(p.body_literal_count(), 5u);
    EXPECT_TRUE(p.diagnostics.empty());
}

TEST(Parse, ListSugarDesugars) {
    const Term t = parse_term("[a,b|T]");
    EXPECT_EQ(t, Term::cons(Term::constant("a"), Term::cons(Term::constant("b"), Term::variable("T"))));
    EXPECT_EQ(parse_term("[a]"), Term::cons(Term::constant("a"), Term::nil()));
    EXPECT_EQ(parse_term("'.'(a,[])"), parse_term("[a]"));
}

TEST(Parse, UnterminatedArgumentList) {
    try {
        parse_program("p(a) :- q(X,");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_GE(e.column(), 13u);
    }
}

TEST(Parse, ReservedVarConstant) {
    EXPECT_THROW(parse_program("p($VAR)."), ParseError);
    EXPECT_THROW(parse_program("p(X) :- q($VAR, X)."), ParseError);
}

TEST(Parse, ErrorPositionOnLaterLine) {
    try {
        parse_program("p(a).\n% comment\nq(b) :- .\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Parse, ArityConflictIsWarning) {
    const Program p = parse_program("p(a).\np(a, b).\nq :- p(a).\n");
    EXPECT_EQ(p.defined(), (std::set<Predicate>{{"p", 1}, {"p", 2}, {"q", 0}}));
    ASSERT_EQ(p.diagnostics.size(), 1u);
    EXPECT_NE(p.diagnostics[0].find("p"), std::string::npos);
}

TEST(Parse, AnonymousVariablesAreDistinct) {
    const Program p = parse_program("p(_, _).");
    const auto& args = p.clauses[0].head.args;
    ASSERT_TRUE(args[0].is_var() && args[1].is_var());
    EXPECT_NE(args[0].name, args[1].name);
}

TEST(Parse, CommentsAndQuotedAtoms) {
    const Program p = parse_program("% leading\np('hello world', /* inline */ b). % trailing\n");
    ASSERT_EQ(p.clauses.size(), 1u);
    EXPECT_EQ(p.clauses[0].head.args[0], Term::constant("hello world"));
}

TEST(Parse, UnificationGoal) {
    const Program p = parse_program("dup(X, Y) :- Y = f(X, X).");
    ASSERT_EQ(p.clauses[0].body.size(), 1u);
    EXPECT_EQ(p.clauses[0].body[0].predicate(), kUnify);
    EXPECT_THROW(parse_program("X = a."), ParseError);
}

TEST(Parse, VariableGoalRejected) { EXPECT_THROW(parse_program("p :- X."), ParseError); }

TEST(Parse, SpansCoverClausesAndLiterals) {
    const std::string text = "p(X) :- q(X), r(X).\nq(a).\n";
    const Program p = parse_program(text);
    const auto& c = p.clauses[0];
    EXPECT_EQ(text.substr(c.span.begin, c.span.end - c.span.begin), "p(X) :- q(X), r(X).");
    EXPECT_EQ(text.substr(c.body[1].span.begin, c.body[1].span.end - c.body[1].span.begin), "r(X)");
    EXPECT_EQ(text.substr(p.clauses[1].span.begin, p.clauses[1].span.end - p.clauses[1].span.begin), "q(a).");
}

TEST(Signature, ExcludesPredicates) {
    const Program p = parse_program("p(f(a)).");
    EXPECT_EQ(signature_of(p), (Signature{{"f", 1}, {"a", 0}, kVarConstant}));
}

TEST(Signature, EmptyProgram) { EXPECT_EQ(signature_of(parse_program("")), (Signature{kVarConstant})); }

TEST(Signature, TransposeWithNumerals) {
    const Program p = parse_program(testsupport::read_sample("transpose.pl"));
    const Signature s = signature_of(p, {parse_term("s(0)")});
    EXPECT_EQ(s, (Signature{kCons, kNil, {"0", 0}, {"s", 1}, kVarConstant}));
}

TEST(Print, ParsePrintParseIsFixpoint) {
    for (const char* name : {"append.pl", "transpose.pl", "nrev.pl", "mutex.pl"}) {
        const Program p = parse_program(testsupport::read_sample(name));
        const std::string printed = print_program(p);
        const Program q = parse_program(printed);
        ASSERT_EQ(q.clauses.size(), p.clauses.size()) << name;
        for (std::size_t i = 0; i < p.clauses.size(); ++i) {
            EXPECT_EQ(q.clauses[i].head.name, p.clauses[i].head.name);
            EXPECT_EQ(to_string(q.clauses[i]), to_string(p.clauses[i])) << name;
        }
        EXPECT_EQ(print_program(q), printed) << name;
    }
}

TEST(Print, QuotesWhenNeeded) {
    EXPECT_EQ(to_string(parse_term("'hello world'(X, [a, b], 'A')")), "'hello world'(X,[a,b],'A')");
    EXPECT_EQ(to_string(parse_term("[a|T]")), "[a|T]");
}
