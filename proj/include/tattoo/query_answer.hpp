#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tattoo/domain_model.hpp"
#include "tattoo/error.hpp"
#include "tattoo/fta.hpp"
#include "tattoo/syntax.hpp"

namespace tattoo {

/// Goal predicate with one (pre-determinization) type name per argument, e.g. `unsafe(dynamic)`.
struct TypedGoal {
    Predicate predicate;
    std::vector<TypeName> types;

    static TypedGoal parse(std::string_view text) {
        Term t = parse_term(text);
        if (t.is_var())
            throw InputError("goal must be a predicate applied to type names");
        TypedGoal g{{t.name, t.args.size()}, {}};
        for (const auto& a : t.args) {
            if (a.is_var() || !a.args.empty())
                throw InputError("goal argument '" + to_string(a) + "' is not a type name");
            g.types.push_back(a.name);
        }
        return g;
    }

    std::string str() const {
        Term t = Term::constant(predicate.name);
        for (const auto& ty : types)
            t.args.push_back(Term::constant(ty));
        return to_string(t);
    }

    bool operator==(const TypedGoal&) const = default;
};

/// Where a predicate of the transformed program comes from.
struct QaOrigin {
    enum class Kind { answer, query, call_site, goal_seed };
    Kind kind = Kind::answer;
    Predicate source;  // answer/query: the source predicate; call_site: the called predicate
    BodyCoord coord;   // call_site only

    bool operator==(const QaOrigin&) const = default;
};

struct QaProgram {
    Program program;
    std::map<Predicate, QaOrigin> origins;
    Predicate seed;
    TypedGoal goal;
    std::map<std::size_t, std::size_t> answer_clause;  // source clause -> transformed clause index
    std::map<BodyCoord, Predicate> call_site;

    std::size_t query_predicate_count() const { return call_site.size(); }
};

namespace qa_names {

inline Predicate answer(const Predicate& p) { return {"$ans:" + p.name, p.arity}; }
inline Predicate query(const Predicate& p) { return {"$query:" + p.name, p.arity}; }
inline Predicate call(const BodyCoord& c, std::size_t arity) {
    return {"$call:" + std::to_string(c.clause) + ":" + std::to_string(c.position), arity};
}
inline Predicate seed(std::size_t arity) { return {"$goal", arity}; }

} // namespace qa_names

/// Left-to-right query-answer transformation with one query predicate per body literal.
inline QaProgram qa_transform(const Program& program, const TypedGoal& goal) {
    const auto defined = program.defined();
    if (!defined.contains(goal.predicate))
        throw InputError("goal predicate " + goal.predicate.str() + " is not defined by the program");
    if (goal.types.size() != goal.predicate.arity)
        throw InputError("goal arity does not match its type list");

    QaProgram out;
    out.goal = goal;
    out.seed = qa_names::seed(goal.predicate.arity);
    out.origins[out.seed] = {QaOrigin::Kind::goal_seed, goal.predicate, {}};
    for (const auto& p : defined) {
        out.origins[qa_names::answer(p)] = {QaOrigin::Kind::answer, p, {}};
        out.origins[qa_names::query(p)] = {QaOrigin::Kind::query, p, {}};
    }

    auto make = [](const Predicate& p, std::vector<Term> args, Span span) {
        return Atom{p.name, std::move(args), span};
    };
    auto add = [&](Atom head, std::vector<Atom> body, Span span) {
        Clause c{std::move(head), std::move(body), out.program.clauses.size(), span};
        out.program.clauses.push_back(std::move(c));
        return out.program.clauses.size() - 1;
    };

    for (const auto& c : program.clauses) {
        const Predicate p = c.head.predicate();
        const Atom guard = make(qa_names::query(p), c.head.args, c.head.span);
        std::vector<Atom> solved;
        for (std::size_t i = 0; i < c.body.size(); ++i) {
            const Atom& lit = c.body[i];
            const BodyCoord coord{c.index, i};
            const Predicate site = qa_names::call(coord, lit.args.size());
            out.call_site[coord] = site;
            out.origins[site] = {QaOrigin::Kind::call_site, lit.predicate(), coord};
            std::vector<Atom> body{guard};
            body.insert(body.end(), solved.begin(), solved.end());
            add(make(site, lit.args, lit.span), std::move(body), lit.span);
            if (defined.contains(lit.predicate()))
                solved.push_back(make(qa_names::answer(lit.predicate()), lit.args, lit.span));
            else
                solved.push_back(lit);
        }
        std::vector<Atom> body{guard};
        body.insert(body.end(), solved.begin(), solved.end());
        out.answer_clause[c.index] = add(make(qa_names::answer(p), c.head.args, c.head.span), std::move(body), c.span);
    }

    auto fresh_args = [](std::size_t n) {
        std::vector<Term> args;
        for (std::size_t i = 0; i < n; ++i)
            args.push_back(Term::variable("X" + std::to_string(i + 1)));
        return args;
    };
    for (const auto& [coord, site] : out.call_site) {
        const Predicate called = out.origins[site].source;
        if (!defined.contains(called))
            continue;
        add(make(qa_names::query(called), fresh_args(called.arity), {}),
            {make(site, fresh_args(called.arity), {})}, {});
    }
    add(make(qa_names::query(goal.predicate), fresh_args(goal.predicate.arity), {}),
        {make(out.seed, fresh_args(goal.predicate.arity), {})}, {});
    return out;
}

/// Answer and call patterns projected back onto the source program.
struct QaResult {
    Model answers;                                        // per source predicate
    std::map<BodyCoord, std::set<Tuple>> calls;           // per body literal
    std::map<std::size_t, std::set<Tuple>> clause_answers;  // per source clause

    bool operator==(const QaResult&) const = default;
};

/// Goal-dependent analysis over an existing pre-interpretation. Each goal type denotes
/// the domain elements whose member set contains it.
inline QaResult analyze_goal(const Program& program, const PreInterpretation& pre, const TypedGoal& goal,
                             const BuiltinPolicy& builtins = BuiltinPolicy::all_tuples(),
                             const Deadline& deadline = Deadline::none()) {
    QaProgram qa = qa_transform(program, goal);

    std::vector<std::vector<Element>> choices;
    for (const auto& ty : goal.types) {
        std::vector<Element> c;
        for (Element d = 0; d < pre.size(); ++d)
            if (pre.domain()[d].contains(ty))
                c.push_back(d);
        choices.push_back(std::move(c));
    }
    ModelOptions opts;
    opts.deadline = deadline;
    auto& seed = opts.seed.relations[qa.seed];
    {
        Tuple t(choices.size());
        std::function<void(std::size_t)> expand = [&](std::size_t i) {
            if (i == choices.size()) {
                seed.insert(t);
                return;
            }
            for (auto d : choices[i]) {
                t[i] = d;
                expand(i + 1);
            }
        };
        expand(0);
    }
    for (const auto& p : program.defined())
        opts.seed.relations[qa_names::query(p)];

    const Model model = least_model(qa.program, pre, builtins, opts);

    QaResult out;
    for (const auto& p : program.defined())
        out.answers.relations[p] = model.relation(qa_names::answer(p));
    for (const auto& [coord, site] : qa.call_site)
        out.calls[coord] = model.relation(site);
    for (const auto& [src, idx] : qa.answer_clause)
        out.clause_answers[src] = clause_consequences(qa.program.clauses[idx], qa.program, model, pre, builtins);
    return out;
}

/// As above, determinizing `fta` first. Goal type names must be states of `fta`.
inline QaResult analyze_goal(const Program& program, const Fta& fta, const TypedGoal& goal,
                             const BuiltinPolicy& builtins = BuiltinPolicy::all_tuples(),
                             std::size_t max_states = kDefaultMaxStates,
                             const Deadline& deadline = Deadline::none()) {
    for (const auto& ty : goal.types)
        if (!fta.states.contains(ty))
            throw InputError("unknown type '" + ty + "' in goal " + goal.str());
    const PreInterpretation pre(determinize(fta, max_states, deadline));
    return analyze_goal(program, pre, goal, builtins, deadline);
}

struct DeadCode {
    std::set<std::size_t> dead_clauses;
    std::set<BodyCoord> sliceable;

    bool operator==(const DeadCode&) const = default;
};

/// A clause is dead when it contributes no answer; a call is sliceable when it is never
/// reached, and so is everything to its right.
inline DeadCode dead_code(const QaResult& qa, const Program& program) {
    DeadCode out;
    for (const auto& c : program.clauses) {
        auto it = qa.clause_answers.find(c.index);
        if (it == qa.clause_answers.end() || it->second.empty())
            out.dead_clauses.insert(c.index);
        bool cut = false;
        for (std::size_t i = 0; i < c.body.size(); ++i) {
            const BodyCoord coord{c.index, i};
            auto call = qa.calls.find(coord);
            if (call == qa.calls.end() || call->second.empty())
                cut = true;
            if (cut)
                out.sliceable.insert(coord);
        }
    }
    return out;
}

} // namespace tattoo
