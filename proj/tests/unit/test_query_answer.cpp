#include <gtest/gtest.h>

#include "support/helpers.hpp"
#include "tattoo/query_answer.hpp"

using namespace tattoo;

namespace {

struct Setup {
    Program program;
    Fta fta;
    PreInterpretation pre;
};

Setup setup(const std::string& program_text, std::optional<std::string> types, std::vector<std::string> ctx = {}) {
    Program p = parse_program(program_text);
    Fta fta = testsupport::types_for(p, types, ctx);
    PreInterpretation pre(determinize(fta));
    return {std::move(p), std::move(fta), std::move(pre)};
}

Element element_of(const PreInterpretation& pre, std::vector<TypeName> members) {
    return static_cast<Element>(*pre.dfta().find(DState(std::move(members))));
}

std::size_t count_origin(const QaProgram& qa, QaOrigin::Kind kind) {
    std::size_t n = 0;
    for (const auto& [p, o] : qa.origins)
        n += o.kind == kind;
    return n;
}

} // namespace

TEST(Goal, ParseAndPrint) {
    const TypedGoal g = TypedGoal::parse("unsafe(dynamic)");
    EXPECT_EQ(g.predicate, (Predicate{"unsafe", 1}));
    EXPECT_EQ(g.types, (std::vector<TypeName>{"dynamic"}));
    EXPECT_EQ(g.str(), "unsafe(dynamic)");
    EXPECT_THROW(TypedGoal::parse("p(X)"), InputError);
    EXPECT_THROW(TypedGoal::parse("p(f(a))"), InputError);
    EXPECT_THROW(TypedGoal::parse("p(a"), ParseError);
}

TEST(Transform, AppendShape) {
    const Program p = parse_program(testsupport::read_sample("append.pl"));
    const QaProgram qa = qa_transform(p, TypedGoal::parse("append(list,dynamic,dynamic)"));
    EXPECT_EQ(qa.query_predicate_count(), 1u);
    EXPECT_EQ(qa.answer_clause.size(), 2u);
    EXPECT_EQ(count_origin(qa, QaOrigin::Kind::call_site), 1u);
    EXPECT_EQ(count_origin(qa, QaOrigin::Kind::goal_seed), 1u);
    // 1 call-site clause, 2 answer clauses, 1 link from the call site, 1 link from the goal.
    EXPECT_EQ(qa.program.clauses.size(), 5u);
}

TEST(Transform, FactsOnly) {
    const Program p = parse_program("p(a).\np(b).\n");
    const QaProgram qa = qa_transform(p, TypedGoal::parse("p(dynamic)"));
    EXPECT_EQ(qa.query_predicate_count(), 0u);
    for (const auto& [src, idx] : qa.answer_clause) {
        ASSERT_EQ(qa.program.clauses[idx].body.size(), 1u);
        EXPECT_EQ(qa.program.clauses[idx].body[0].predicate(), qa_names::query({"p", 1}));
    }
}

TEST(Transform, TransposeHasOneQueryPerLiteral) {
    const Program p = parse_program(testsupport::read_sample("transpose.pl"));
    const QaProgram qa = qa_transform(p, TypedGoal::parse("transpose(matrix,dynamic)"));
    EXPECT_EQ(qa.query_predicate_count(), 5u);
    EXPECT_EQ(qa.query_predicate_count(), p.body_literal_count());
}

TEST(Transform, UndefinedGoal) {
    const Program p = parse_program("p(a).");
    EXPECT_THROW(qa_transform(p, TypedGoal::parse("q(dynamic)")), InputError);
    EXPECT_THROW(qa_transform(p, TypedGoal::parse("p(dynamic,dynamic)")), InputError);
}

TEST(AnalyzeGoal, AppendListListDynamic) {
    auto s = setup(testsupport::read_sample("append.pl"), testsupport::read_sample("list.rty"));
    const QaResult r = analyze_goal(s.program, s.fta, TypedGoal::parse("append(list,list,dynamic)"));
    const Element L = element_of(s.pre, {"dynamic", "list"});
    const Element D = element_of(s.pre, {"dynamic"});
    EXPECT_EQ(r.answers.relation({"append", 3}), (std::set<Tuple>{{L, L, L}}));
    EXPECT_EQ(r.calls.at({1, 0}), (std::set<Tuple>{{L, L, L}, {L, L, D}}));

    // Same values from the hand-written query-answer program evaluated directly.
    const Program hand = parse_program(
        "q(X, Y, Z) :- seed(X, Y, Z).\n"
        "q(Xs, Ys, Zs) :- q([X|Xs], Ys, [X|Zs]).\n"
        "a([], Ys, Ys) :- q([], Ys, Ys).\n"
        "a([X|Xs], Ys, [X|Zs]) :- q([X|Xs], Ys, [X|Zs]), a(Xs, Ys, Zs).\n"
        "c(Xs, Ys, Zs) :- q([X|Xs], Ys, [X|Zs]).\n");
    ModelOptions opts;
    for (Element z = 0; z < s.pre.size(); ++z)
        opts.seed.relations[{"seed", 3}].insert({L, L, z});
    const Model m = least_model(hand, s.pre, BuiltinPolicy::all_tuples(), opts);
    EXPECT_EQ(m.relation({"a", 3}), r.answers.relation({"append", 3}));
    EXPECT_EQ(m.relation({"c", 3}), r.calls.at({1, 0}));
}

TEST(AnalyzeGoal, SingleFact) {
    auto s = setup("p(a).", std::nullopt);
    const QaResult r = analyze_goal(s.program, s.fta, TypedGoal::parse("p(dynamic)"));
    EXPECT_EQ(r.answers.relation({"p", 1}).size(), 1u);
    EXPECT_TRUE(r.calls.empty());
}

TEST(AnalyzeGoal, UnknownType) {
    auto s = setup("p(a).", std::nullopt);
    EXPECT_THROW(analyze_goal(s.program, s.fta, TypedGoal::parse("p(list)")), InputError);
}

TEST(AnalyzeGoal, EmptySeedMakesEverythingDead) {
    // `never` has no inhabitants, so no DState contains it.
    auto s = setup(testsupport::read_sample("append.pl"), "never --> f(never).");
    const QaResult r = analyze_goal(s.program, s.fta, TypedGoal::parse("append(never,dynamic,dynamic)"));
    EXPECT_TRUE(r.answers.relation({"append", 3}).empty());
    const DeadCode dc = dead_code(r, s.program);
    EXPECT_EQ(dc.dead_clauses, (std::set<std::size_t>{0, 1}));
    EXPECT_EQ(dc.sliceable, (std::set<BodyCoord>{{1, 0}}));
}

TEST(DeadCode, SliceRightOfEmptyCall) {
    auto s = setup("p :- q, r, s.\nq :- q.\nr.\ns.\n", std::nullopt);
    const QaResult r = analyze_goal(s.program, s.fta, TypedGoal::parse("p"));
    const DeadCode dc = dead_code(r, s.program);
    EXPECT_EQ(dc.sliceable, (std::set<BodyCoord>{{0, 1}, {0, 2}}));
    EXPECT_TRUE(dc.dead_clauses.contains(0));
    EXPECT_TRUE(dc.dead_clauses.contains(2));  // r is never called
    EXPECT_FALSE(dc.sliceable.contains({0, 0}));
}

TEST(DeadCode, AppendBaseClauseLive) {
    auto s = setup(testsupport::read_sample("append.pl"), testsupport::read_sample("list.rty"));
    const QaResult r = analyze_goal(s.program, s.fta, TypedGoal::parse("append(list,list,list)"));
    const DeadCode dc = dead_code(r, s.program);
    EXPECT_FALSE(dc.dead_clauses.contains(0));
    EXPECT_TRUE(dc.dead_clauses.empty());
}

TEST(AnalyzeGoal, AnswersWithinGoalIndependentModel) {
    auto s = setup(testsupport::read_sample("nrev.pl"), testsupport::read_sample("list.rty"));
    const Model full = least_model(s.program, s.pre);
    const QaResult r = analyze_goal(s.program, s.fta, TypedGoal::parse("reverse(list,dynamic)"));
    for (const auto& [p, rel] : r.answers.relations)
        for (const auto& t : rel)
            EXPECT_TRUE(full.relation(p).contains(t)) << p.str();
}

TEST(AnalyzeGoal, MutexUnsafeHasNoAnswers) {
    auto s = setup(testsupport::read_sample("mutex.pl"), testsupport::read_sample("ring.rty"));
    const QaResult r = analyze_goal(s.program, s.fta, TypedGoal::parse("unsafe(dynamic)"));
    EXPECT_TRUE(r.answers.relation({"unsafe", 1}).empty());
    const DeadCode dc = dead_code(r, s.program);
    EXPECT_TRUE(dc.dead_clauses.contains(2));
    // reachable/1 is called and answers; twocrit is called but fails.
    EXPECT_FALSE(r.answers.relation({"reachable", 1}).empty());
    EXPECT_FALSE(dc.sliceable.contains({2, 1}));
}
