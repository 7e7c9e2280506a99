#include <gtest/gtest.h>

#include "support/corpus.hpp"
#include "support/helpers.hpp"
#include "support/oracle.hpp"
#include "support/renaming.hpp"
#include "tattoo/regular_approx.hpp"
#include "tattoo/welltyping.hpp"

using namespace tattoo;

namespace {

PolyType P(const std::string& n) { return PolyType::parameter(n); }
PolyType T(const std::string& n, std::vector<PolyType> a = {}) { return PolyType::named(n, std::move(a)); }

WellTyping list_rules() {
    WellTyping wt;
    wt.rules.push_back({"list", {"X"}, {{kNil, {}}, {kCons, {P("X"), T("list", {P("X")})}}}});
    return wt;
}

} // namespace

TEST(WellTyping, AppendMatchesParametricList) {
    const Program p = parse_program(testsupport::read_sample("append.pl"));
    const WellTyping wt = infer_welltyping(p);
    WellTyping expected = list_rules();
    expected.signatures[{"append", 3}] = {T("list", {P("X")}), T("list", {P("X")}), T("list", {P("X")})};
    EXPECT_TRUE(testsupport::Renaming().equivalent(wt, expected)) << wt.str();
    EXPECT_EQ(wt.str(), "t1(X) --> [] ; [X|t1(X)].\nappend(t1(X),t1(X),t1(X)).\n");
}

TEST(WellTyping, TransposeIsMatrixOfRows) {
    const Program p = parse_program(testsupport::read_sample("transpose.pl"));
    const WellTyping wt = infer_welltyping(p);
    WellTyping expected = list_rules();
    const PolyType row = T("list", {P("X")});
    const PolyType matrix = T("list", {row});
    expected.signatures[{"transpose", 2}] = {matrix, matrix};
    expected.signatures[{"makerow", 3}] = {matrix, row, matrix};
    expected.signatures[{"nullrows", 1}] = {matrix};
    EXPECT_TRUE(testsupport::Renaming().equivalent(wt, expected)) << wt.str();
    EXPECT_TRUE(check_welltyping(p, wt).ok);
}

TEST(WellTyping, SingleConstant) {
    const WellTyping wt = infer_welltyping(parse_program("p(a)."));
    WellTyping expected;
    expected.rules.push_back({"t", {}, {{{"a", 0}, {}}}});
    expected.signatures[{"p", 1}] = {T("t")};
    EXPECT_TRUE(testsupport::Renaming().equivalent(wt, expected)) << wt.str();
}

TEST(WellTyping, InferredTypingsCheckOnCorpus) {
    for (const auto& e : corpus::entries()) {
        const Program p = parse_program(e.program);
        const WellTyping wt = infer_welltyping(p);
        const auto res = check_welltyping(p, wt);
        EXPECT_TRUE(res.ok) << e.name << ": " << res.reason << "\n" << wt.str();
    }
}

TEST(WellTyping, CheckAcceptsAlternativeTyping) {
    const Program p = parse_program(testsupport::read_sample("append.pl"));
    WellTyping alt = list_rules();
    alt.signatures[{"append", 3}] = {T("list", {P("X")}), P("X"), P("X")};
    EXPECT_TRUE(check_welltyping(p, alt).ok);
}

TEST(WellTyping, CheckRejects) {
    const Program p = parse_program("p(a).\np(b).\n");
    WellTyping wt;
    wt.rules.push_back({"t", {}, {{{"a", 0}, {}}}});
    wt.signatures[{"p", 1}] = {T("t")};
    const auto res = check_welltyping(p, wt);
    EXPECT_FALSE(res.ok);
    EXPECT_EQ(res.failing_clause, 1u);
}

TEST(WellTyping, ToRegularTypesDropsParameters) {
    const WellTyping wt = infer_welltyping(parse_program(testsupport::read_sample("append.pl")));
    const Fta f = to_regular_types(wt);
    EXPECT_EQ(format_fta(f), "t1 --> [] ; [dynamic|t1].\n");
    WellTyping plain;
    plain.rules.push_back({"t", {}, {{{"a", 0}, {}}, {{"f", 1}, {T("t")}}}});
    plain.signatures[{"p", 1}] = {T("t")};
    EXPECT_EQ(to_regular_types(plain).transitions,
              (std::set<Transition>{{{"a", 0}, {}, "t"}, {{"f", 1}, {"t"}, "t"}}));
}

TEST(WellTyping, ConvertedTypesDeterminize) {
    for (const auto& e : corpus::entries()) {
        const Program p = parse_program(e.program);
        const std::string text = format_fta(to_regular_types(infer_welltyping(p)));
        EXPECT_NO_THROW(determinize(testsupport::types_for(p, text, {}))) << e.name << "\n" << text;
    }
}

TEST(Rta, ReverseSecondArgumentIsDynamic) {
    const Program p = parse_program(testsupport::read_sample("nrev.pl"));
    const RegularApprox ra = infer_rta(p);
    const auto& sig = ra.signatures.at({"reverse", 2});
    EXPECT_FALSE(ra.is_dynamic(sig[0]));
    EXPECT_TRUE(ra.is_dynamic(sig[1]));
    EXPECT_NE(ra.str().find("reverse(t"), std::string::npos);
    EXPECT_NE(ra.str().find(",dynamic)."), std::string::npos);
}

TEST(Rta, RecursiveConstant) {
    const Program p = parse_program("p(a).\np(f(X)) :- p(X).\n");
    const RegularApprox ra = infer_rta(p);
    const TypeName t = ra.signatures.at({"p", 1})[0];
    EXPECT_TRUE(ra.fta.transitions.contains(Transition{{"a", 0}, {}, t}));
    EXPECT_TRUE(ra.fta.transitions.contains(Transition{{"f", 1}, {t}, t}));
    for (const char* s : {"a", "f(a)", "f(f(a))"})
        EXPECT_TRUE(accepts(ra.fta, parse_term(s)).contains(t)) << s;
}

TEST(Rta, NonProductivePredicateIsEmpty) {
    const Program p = parse_program("q(X) :- q(X).\n");
    const RegularApprox ra = infer_rta(p);
    EXPECT_TRUE(empty_states(ra.fta).contains(ra.signatures.at({"q", 1})[0]));
}

TEST(Rta, SoundOnCorpus) {
    for (const auto& e : corpus::entries()) {
        const Program p = parse_program(e.program);
        const RegularApprox ra = infer_rta(p);
        Signature sig = signature_of(p);
        sig.erase(kVarConstant);
        const auto universe = oracle::ground_terms(sig, 0);
        const auto rules = testsupport::rules_of(ra.fta);
        for (const auto& atom : oracle::bounded_tp(p, universe, 4, 3)) {
            const auto& states = ra.signatures.at(atom.predicate);
            for (std::size_t i = 0; i < atom.args.size(); ++i)
                EXPECT_TRUE(oracle::run(rules, atom.args[i]).contains(states[i]))
                    << e.name << ": " << to_string(atom.args[i]) << " not in " << states[i];
        }
    }
}

TEST(Rta, ToRegularTypesKeepsAutomaton) {
    const RegularApprox ra = infer_rta(parse_program(testsupport::read_sample("nrev.pl")));
    EXPECT_EQ(to_regular_types(ra), ra.fta);
}

TEST(Rta, IndependentOfClauseOrder) {
    const std::string a = "initial(st(tok, idle)).\ntrans(st(tok, X), st(crit, X)).\ntrans(st(crit, X), st(tok, X)).\n"
                          "reachable(S) :- initial(S).\nreachable(S2) :- reachable(S1), trans(S1, S2).\n";
    const std::string b = "reachable(S2) :- reachable(S1), trans(S1, S2).\ntrans(st(crit, X), st(tok, X)).\n"
                          "reachable(S) :- initial(S).\ntrans(st(tok, X), st(crit, X)).\ninitial(st(tok, idle)).\n";
    EXPECT_EQ(infer_rta(parse_program(a)), infer_rta(parse_program(b)));
}

TEST(Rta, EquivalentStatesAreMerged) {
    // Both heads build tok in their own position; one state remains.
    const RegularApprox ra = infer_rta(parse_program("p(f(tok)).\np(g(tok)).\n"));
    std::size_t tok_states = 0;
    for (const auto& t : ra.fta.transitions)
        tok_states += t.functor == Functor{"tok", 0} && t.result != kDynamic;
    EXPECT_EQ(tok_states, 1u);
}
