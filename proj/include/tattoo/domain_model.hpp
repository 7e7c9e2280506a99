#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tattoo/error.hpp"
#include "tattoo/fta.hpp"
#include "tattoo/limits.hpp"
#include "tattoo/syntax.hpp"

namespace tattoo {

/// Domain elements are indices into PreInterpretation::domain().
using Element = std::uint32_t;
using Tuple = std::vector<Element>;

/// Interpretation of every function symbol over the finite domain of DFTA states.
class PreInterpretation {
public:
    explicit PreInterpretation(Dfta dfta) : dfta_(std::move(dfta)) {
        if (dfta_.states.empty())
            throw InputError("pre-interpretation needs a nonempty domain");
        const std::size_t n = dfta_.size();
        for (const auto& f : dfta_.signature) {
            auto it = dfta_.table.find(f);
            const std::size_t expected = detail::checked_power(n, f.arity, detail::kMaxTableEntries);
            if (it == dfta_.table.end() || it->second.size() != expected)
                throw InputError("incomplete pre-interpretation: no table for " + f.str());
            for (auto r : it->second) {
                if (r == Dfta::kMissing)
                    throw InputError("incomplete pre-interpretation: missing transition for " + f.str());
                if (r >= n)
                    throw InputError("pre-interpretation maps " + f.str() + " outside the domain");
            }
        }
        for (const auto& [f, rows] : dfta_.table) {
            if (!dfta_.signature.contains(f))
                throw InputError("pre-interpretation table for " + f.str() + " is outside the signature");
            auto& inv = inverse_[f];
            inv.resize(n);
            std::vector<Element> tuple(f.arity, 0);
            for (std::size_t off = 0; off < rows.size(); ++off) {
                std::size_t rest = off;
                for (std::size_t i = f.arity; i > 0; --i) {
                    tuple[i - 1] = static_cast<Element>(rest % n);
                    rest /= n;
                }
                inv[rows[off]].push_back(tuple);
            }
        }
    }

    const Dfta& dfta() const { return dfta_; }
    const std::vector<DState>& domain() const { return dfta_.states; }
    std::size_t size() const { return dfta_.size(); }
    const Signature& signature() const { return dfta_.signature; }

    Element apply(const Functor& f, std::span<const Element> args) const {
        auto r = dfta_.apply(f, args);
        if (r == Dfta::kMissing)
            throw InputError("functor " + f.str() + " is outside the pre-interpretation's signature");
        return r;
    }

    /// Argument tuples that `f` maps to `result`.
    const std::vector<Tuple>& preimage(const Functor& f, Element result) const {
        static const std::vector<Tuple> none;
        auto it = inverse_.find(f);
        if (it == inverse_.end())
            return none;
        return it->second[result];
    }

    /// Number of table entries (the expanded transition count).
    std::size_t table_size() const { return dfta_.transition_count(); }

private:
    Dfta dfta_;
    std::map<Functor, std::vector<std::vector<Tuple>>> inverse_;
};

inline PreInterpretation pre_interpretation(Dfta dfta) { return PreInterpretation(std::move(dfta)); }

/// Structural evaluation of `term` with variables looked up in `env`.
inline Element eval_term(const PreInterpretation& pre, const Term& term, const std::map<std::string, Element>& env) {
    if (term.is_var()) {
        auto it = env.find(term.name);
        if (it == env.end())
            throw InputError("eval_term: unbound variable " + term.name);
        return it->second;
    }
    Tuple args;
    for (const auto& a : term.args)
        args.push_back(eval_term(pre, a, env));
    return pre.apply(term.functor(), args);
}

// ---------------------------------------------------------------------------
// Models

struct DomainAtom {
    Predicate predicate;
    Tuple args;

    auto operator<=>(const DomainAtom&) const = default;
    bool operator==(const DomainAtom&) const = default;
};

/// A finite relation per predicate.
struct Model {
    std::map<Predicate, std::set<Tuple>> relations;

    const std::set<Tuple>& relation(const Predicate& p) const {
        static const std::set<Tuple> none;
        auto it = relations.find(p);
        return it == relations.end() ? none : it->second;
    }

    bool contains(const DomainAtom& a) const { return relation(a.predicate).contains(a.args); }

    std::size_t atom_count() const {
        std::size_t n = 0;
        for (const auto& [p, r] : relations)
            n += r.size();
        return n;
    }

    bool operator==(const Model&) const = default;
};

/// How predicates used but not defined are interpreted.
struct BuiltinPolicy {
    enum class Kind { all_tuples, explicit_relation, error_on_use };

    struct Entry {
        Kind kind = Kind::all_tuples;
        std::set<Tuple> relation;  // explicit_relation only
    };

    Kind fallback = Kind::all_tuples;
    std::map<Predicate, Entry> entries;

    static BuiltinPolicy all_tuples() { return {}; }
    static BuiltinPolicy strict() { return {Kind::error_on_use, {}}; }

    Entry lookup(const Predicate& p) const {
        auto it = entries.find(p);
        if (it != entries.end())
            return it->second;
        return Entry{fallback, {}};
    }
};

enum class FixpointStrategy { naive, semi_naive };

struct ModelOptions {
    FixpointStrategy strategy = FixpointStrategy::semi_naive;
    /// Initial facts. A predicate present here counts as defined even without clauses.
    Model seed;
    Deadline deadline;
    /// Called after every round with the model so far.
    std::function<void(std::size_t round, const Model&)> observer;
};

namespace detail {

/// Clause compiled against a fixed pre-interpretation: variables become slots.
struct CTerm {
    int var = -1;  // slot, or -1 for compound
    Functor functor;
    std::vector<CTerm> args;
    std::vector<int> vars;  // slots occurring in this subterm
};

struct CAtom {
    Predicate predicate;
    std::vector<CTerm> args;
    enum class Source { idb, builtin_all, builtin_explicit, unify } source = Source::idb;
    std::set<Tuple> relation;  // builtin_explicit
};

struct CClause {
    std::vector<CTerm> head;
    Predicate head_predicate;
    std::vector<CAtom> body;
    std::size_t slots = 0;
    std::vector<int> head_vars;
};

inline CTerm compile_term(const Term& t, std::map<std::string, int>& slots, const Signature& sig) {
    CTerm out;
    if (t.is_var()) {
        auto [it, fresh] = slots.emplace(t.name, static_cast<int>(slots.size()));
        out.var = it->second;
        out.vars.push_back(out.var);
        return out;
    }
    out.functor = t.functor();
    if (!sig.contains(out.functor))
        throw InputError("functor " + out.functor.str() + " does not belong to the type signature");
    for (const auto& a : t.args) {
        out.args.push_back(compile_term(a, slots, sig));
        for (int v : out.args.back().vars)
            if (std::find(out.vars.begin(), out.vars.end(), v) == out.vars.end())
                out.vars.push_back(v);
    }
    return out;
}

class Evaluator {
public:
    Evaluator(const PreInterpretation& pre, std::vector<Element>& env) : pre_(pre), env_(env) {}

    static constexpr Element kUnbound = UINT32_MAX;

    bool bound(const CTerm& t) const {
        return std::all_of(t.vars.begin(), t.vars.end(), [&](int v) { return env_[v] != kUnbound; });
    }

    Element eval(const CTerm& t) const {
        if (t.var >= 0)
            return env_[t.var];
        Tuple args;
        args.reserve(t.args.size());
        for (const auto& a : t.args)
            args.push_back(eval(a));
        return pre_.apply(t.functor, args);
    }

    using Cont = std::function<void()>;

    /// Enumerates bindings making `t` evaluate to `d`; calls `k` for each, restoring env afterwards.
    void match(const CTerm& t, Element d, const Cont& k) {
        if (t.var >= 0) {
            Element& slot = env_[t.var];
            if (slot == kUnbound) {
                slot = d;
                k();
                slot = kUnbound;
            } else if (slot == d) {
                k();
            }
            return;
        }
        if (bound(t)) {
            if (eval(t) == d)
                k();
            return;
        }
        for (const auto& pre_args : pre_.preimage(t.functor, d))
            match_all(t.args, pre_args, 0, k);
    }

    void match_all(const std::vector<CTerm>& terms, const Tuple& values, std::size_t i, const Cont& k) {
        if (i == terms.size()) {
            k();
            return;
        }
        match(terms[i], values[i], [&] { match_all(terms, values, i + 1, k); });
    }

    /// Binds each of `vars` that is still unbound to every domain element in turn.
    void enumerate(const std::vector<int>& vars, std::size_t i, const Cont& k) {
        if (i == vars.size()) {
            k();
            return;
        }
        Element& slot = env_[vars[i]];
        if (slot != kUnbound) {
            enumerate(vars, i + 1, k);
            return;
        }
        for (Element d = 0; d < pre_.size(); ++d) {
            slot = d;
            enumerate(vars, i + 1, k);
        }
        slot = kUnbound;
    }

private:
    const PreInterpretation& pre_;
    std::vector<Element>& env_;
};

inline CClause compile_clause(const Clause& c, const PreInterpretation& pre, const BuiltinPolicy& builtins,
                              const std::set<Predicate>& defined) {
    CClause out;
    std::map<std::string, int> slots;
    out.head_predicate = c.head.predicate();
    for (const auto& a : c.head.args)
        out.head.push_back(compile_term(a, slots, pre.signature()));
    for (const auto& b : c.body) {
        CAtom atom;
        atom.predicate = b.predicate();
        for (const auto& a : b.args)
            atom.args.push_back(compile_term(a, slots, pre.signature()));
        if (!defined.contains(atom.predicate)) {
            if (atom.predicate == kUnify && builtins.entries.find(kUnify) == builtins.entries.end()) {
                atom.source = CAtom::Source::unify;
            } else {
                auto entry = builtins.lookup(atom.predicate);
                switch (entry.kind) {
                case BuiltinPolicy::Kind::error_on_use:
                    throw InputError("undefined predicate " + atom.predicate.str() + " used in clause " +
                                     std::to_string(c.index));
                case BuiltinPolicy::Kind::explicit_relation:
                    atom.source = CAtom::Source::builtin_explicit;
                    atom.relation = std::move(entry.relation);
                    break;
                default:
                    atom.source = CAtom::Source::builtin_all;
                }
            }
        }
        out.body.push_back(std::move(atom));
    }
    out.slots = slots.size();
    for (const auto& h : out.head)
        for (int v : h.vars)
            if (std::find(out.head_vars.begin(), out.head_vars.end(), v) == out.head_vars.end())
                out.head_vars.push_back(v);
    return out;
}

/// Solves the body left to right as a join and reports every head tuple.
/// Body atom `delta_at` (if any) ranges over `delta` instead of `full`.
template <class Sink>
void fire(const CClause& c, const PreInterpretation& pre, const Model& full, const Model* delta,
          std::size_t delta_at, Sink&& sink) {
    std::vector<Element> env(c.slots, Evaluator::kUnbound);
    Evaluator ev(pre, env);

    std::function<void(std::size_t)> solve = [&](std::size_t i) {
        if (i == c.body.size()) {
            auto emit = [&] {
                Tuple t;
                t.reserve(c.head.size());
                for (const auto& h : c.head)
                    t.push_back(ev.eval(h));
                sink(std::move(t));
            };
            ev.enumerate(c.head_vars, 0, emit);
            return;
        }
        const CAtom& atom = c.body[i];
        const Evaluator::Cont next = [&] { solve(i + 1); };
        switch (atom.source) {
        case CAtom::Source::builtin_all:
            next();
            return;
        case CAtom::Source::unify: {
            const CTerm& l = atom.args[0];
            const CTerm& r = atom.args[1];
            if (ev.bound(l)) {
                ev.match(r, ev.eval(l), next);
            } else if (ev.bound(r)) {
                ev.match(l, ev.eval(r), next);
            } else {
                for (Element d = 0; d < pre.size(); ++d)
                    ev.match(l, d, [&] { ev.match(r, d, next); });
            }
            return;
        }
        case CAtom::Source::builtin_explicit:
            for (const auto& tuple : atom.relation)
                ev.match_all(atom.args, tuple, 0, next);
            return;
        case CAtom::Source::idb: {
            const Model& source = (delta && i == delta_at) ? *delta : full;
            for (const auto& tuple : source.relation(atom.predicate))
                ev.match_all(atom.args, tuple, 0, next);
            return;
        }
        }
    };
    solve(0);
}

inline std::set<Predicate> defined_predicates(const Program& program, const Model& seed) {
    std::set<Predicate> defined = program.defined();
    for (const auto& [p, r] : seed.relations)
        defined.insert(p);
    return defined;
}

} // namespace detail

/// Least model of `program` over the pre-interpretation.
inline Model least_model(const Program& program, const PreInterpretation& pre,
                         const BuiltinPolicy& builtins = BuiltinPolicy::all_tuples(),
                         const ModelOptions& options = {}) {
    const auto defined = detail::defined_predicates(program, options.seed);
    std::vector<detail::CClause> clauses;
    for (const auto& c : program.clauses)
        clauses.push_back(detail::compile_clause(c, pre, builtins, defined));

    Model model = options.seed;
    for (const auto& p : defined)
        model.relations[p];

    // Round 0 evaluates every clause against the seed.
    Model delta;
    for (const auto& p : defined)
        delta.relations[p];
    auto collect_into = [&](Model& out, const detail::CClause& c) {
        return [&out, &model, &c](Tuple t) {
            if (!model.relations[c.head_predicate].contains(t))
                out.relations[c.head_predicate].insert(std::move(t));
        };
    };
    for (const auto& c : clauses)
        detail::fire(c, pre, model, nullptr, 0, collect_into(delta, c));

    std::size_t round = 0;
    for (;;) {
        options.deadline.check();
        bool any = false;
        for (auto& [p, r] : delta.relations) {
            if (!r.empty())
                any = true;
            model.relations[p].insert(r.begin(), r.end());
        }
        if (options.observer)
            options.observer(round, model);
        if (!any)
            break;
        ++round;

        Model next;
        for (const auto& p : defined)
            next.relations[p];
        for (const auto& c : clauses) {
            if (options.strategy == FixpointStrategy::naive) {
                detail::fire(c, pre, model, nullptr, 0, collect_into(next, c));
                continue;
            }
            for (std::size_t i = 0; i < c.body.size(); ++i) {
                if (c.body[i].source != detail::CAtom::Source::idb)
                    continue;
                if (delta.relation(c.body[i].predicate).empty())
                    continue;
                detail::fire(c, pre, model, &delta, i, collect_into(next, c));
            }
        }
        delta = std::move(next);
    }
    return model;
}

/// Head tuples a single clause derives in one step from `model`.
inline std::set<Tuple> clause_consequences(const Clause& clause, const Program& program, const Model& model,
                                           const PreInterpretation& pre,
                                           const BuiltinPolicy& builtins = BuiltinPolicy::all_tuples()) {
    const auto defined = detail::defined_predicates(program, model);
    const auto compiled = detail::compile_clause(clause, pre, builtins, defined);
    std::set<Tuple> out;
    detail::fire(compiled, pre, model, nullptr, 0, [&](Tuple t) { out.insert(std::move(t)); });
    return out;
}

/// Defined predicates whose relation is empty.
inline std::set<Predicate> empty_predicates(const Model& model, const Program& program) {
    std::set<Predicate> out;
    for (const auto& p : program.defined())
        if (model.relation(p).empty())
            out.insert(p);
    return out;
}

} // namespace tattoo
