#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tattoo/error.hpp"
#include "tattoo/fta.hpp"
#include "tattoo/syntax.hpp"

namespace tattoo {

/// Type parameter or named type applied to type arguments, e.g. `list(X)`.
struct PolyType {
    std::string name;
    std::vector<PolyType> args;
    bool param = false;

    static PolyType parameter(std::string n) { return {std::move(n), {}, true}; }
    static PolyType named(std::string n, std::vector<PolyType> a = {}) { return {std::move(n), std::move(a), false}; }

    Term as_term() const {
        if (param)
            return Term::variable(name);
        Term t = Term::constant(name);
        for (const auto& a : args)
            t.args.push_back(a.as_term());
        return t;
    }

    std::string str() const { return to_string(as_term()); }

    bool operator==(const PolyType&) const = default;
    auto operator<=>(const PolyType& o) const {
        if (auto c = param <=> o.param; c != 0)
            return c;
        if (auto c = name <=> o.name; c != 0)
            return c;
        return std::lexicographical_compare_three_way(args.begin(), args.end(), o.args.begin(), o.args.end());
    }
};

struct TypeAlternative {
    Functor functor;
    std::vector<PolyType> args;

    bool operator==(const TypeAlternative&) const = default;
};

/// `name(params) --> alt ; alt`.
struct TypeRule {
    std::string name;
    std::vector<std::string> params;
    std::vector<TypeAlternative> alternatives;

    bool operator==(const TypeRule&) const = default;
};

struct WellTyping {
    std::vector<TypeRule> rules;
    std::map<Predicate, std::vector<PolyType>> signatures;

    const TypeRule* rule(const std::string& name) const {
        for (const auto& r : rules)
            if (r.name == name)
                return &r;
        return nullptr;
    }

    /// Display form: type rules first, then one signature per predicate.
    std::string str() const {
        std::string out;
        for (const auto& r : rules) {
            std::vector<PolyType> ps;
            for (const auto& p : r.params)
                ps.push_back(PolyType::parameter(p));
            out += PolyType::named(r.name, ps).str() + " --> ";
            for (std::size_t i = 0; i < r.alternatives.size(); ++i) {
                const auto& alt = r.alternatives[i];
                Term t = Term::constant(alt.functor.name);
                for (const auto& a : alt.args)
                    t.args.push_back(a.as_term());
                out += (i ? " ; " : "") + to_string(t);
            }
            out += ".\n";
        }
        for (const auto& [p, types] : signatures) {
            Term t = Term::constant(p.name);
            for (const auto& ty : types)
                t.args.push_back(ty.as_term());
            out += to_string(t) + ".\n";
        }
        return out;
    }

    bool operator==(const WellTyping&) const = default;
};

namespace detail {

inline std::string param_name(std::size_t i) {
    static const char* base[] = {"X", "Y", "Z", "U", "V", "W"};
    if (i < 6)
        return base[i];
    return "X" + std::to_string(i + 1);
}

/// Monomorphic type graph: union-find nodes, each with at most one case per functor.
class MonoTypes {
public:
    std::size_t fresh() {
        parent_.push_back(parent_.size());
        cases_.emplace_back();
        return parent_.size() - 1;
    }

    std::size_t find(std::size_t n) {
        while (parent_[n] != n) {
            parent_[n] = parent_[parent_[n]];
            n = parent_[n];
        }
        return n;
    }

    std::vector<std::size_t> add_case(std::size_t node, const Functor& f) {
        const std::size_t r = find(node);
        auto it = cases_[r].find(f);
        if (it != cases_[r].end())
            return it->second;
        std::vector<std::size_t> args;
        for (std::size_t i = 0; i < f.arity; ++i)
            args.push_back(fresh());
        cases_[find(node)][f] = args;
        return args;
    }

    void unite(std::size_t a, std::size_t b) {
        std::vector<std::pair<std::size_t, std::size_t>> work{{a, b}};
        while (!work.empty()) {
            auto [x, y] = work.back();
            work.pop_back();
            x = find(x);
            y = find(y);
            if (x == y)
                continue;
            if (x > y)
                std::swap(x, y);
            parent_[y] = x;
            auto moved = std::move(cases_[y]);
            cases_[y].clear();
            for (auto& [f, args] : moved) {
                auto it = cases_[x].find(f);
                if (it == cases_[x].end()) {
                    cases_[x].emplace(f, std::move(args));
                } else {
                    for (std::size_t i = 0; i < args.size(); ++i)
                        work.emplace_back(it->second[i], args[i]);
                }
            }
        }
    }

    const std::map<Functor, std::vector<std::size_t>>& cases(std::size_t n) { return cases_[find(n)]; }
    std::size_t size() const { return parent_.size(); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::map<Functor, std::vector<std::size_t>>> cases_;
};

/// Hindley-Milner style type terms over inferred type families.
class TypeTerms {
public:
    struct Node {
        std::size_t parent;
        int family = -1;  // -1: variable
        std::vector<std::size_t> args;
    };

    std::size_t var() {
        nodes_.push_back({nodes_.size(), -1, {}});
        return nodes_.size() - 1;
    }
    std::size_t app(int family, std::vector<std::size_t> args) {
        nodes_.push_back({nodes_.size(), family, std::move(args)});
        return nodes_.size() - 1;
    }

    std::size_t find(std::size_t n) {
        while (nodes_[n].parent != n) {
            nodes_[n].parent = nodes_[nodes_[n].parent].parent;
            n = nodes_[n].parent;
        }
        return n;
    }

    /// False on a family clash.
    bool unify(std::size_t a, std::size_t b) {
        std::vector<std::pair<std::size_t, std::size_t>> work{{a, b}};
        while (!work.empty()) {
            auto [x, y] = work.back();
            work.pop_back();
            x = find(x);
            y = find(y);
            if (x == y)
                continue;
            if (nodes_[x].family < 0) {
                nodes_[x].parent = y;
            } else if (nodes_[y].family < 0) {
                nodes_[y].parent = x;
            } else {
                if (nodes_[x].family != nodes_[y].family || nodes_[x].args.size() != nodes_[y].args.size())
                    return false;
                nodes_[y].parent = x;
                for (std::size_t i = 0; i < nodes_[x].args.size(); ++i)
                    work.emplace_back(nodes_[x].args[i], nodes_[y].args[i]);
            }
        }
        return true;
    }

    const Node& node(std::size_t n) { return nodes_[find(n)]; }

private:
    std::vector<Node> nodes_;
};

struct FamilyDecl {
    std::vector<Functor> functors;
    std::size_t params = 0;
    // per functor, per argument: parameter index, or -1 for a recursive occurrence
    std::map<Functor, std::vector<int>> slots;
};

struct CyclicType {};

} // namespace detail

namespace detail {

inline WellTyping collapsed_welltyping(const Program& program) {
    WellTyping wt;
    TypeRule u{"t1", {}, {}};
    for (const auto& f : signature_of(program)) {
        if (f == kVarConstant)
            continue;
        u.alternatives.push_back({f, std::vector<PolyType>(f.arity, PolyType::named("t1"))});
    }
    wt.rules.push_back(std::move(u));
    for (const auto& p : program.predicates())
        if (p != kUnify)
            wt.signatures[p] = std::vector<PolyType>(p.arity, PolyType::named("t1"));
    return wt;
}

} // namespace detail

/// Infers a parametric well-typing. Falls back to a single universal type when the
/// family structure would need an infinite type.
inline WellTyping infer_welltyping(const Program& program) {
    std::vector<Predicate> preds;
    for (const auto& p : program.predicates())
        if (p != kUnify)
            preds.push_back(p);

    // Phase 1: monomorphic types to discover which functors share a type.
    detail::MonoTypes mono;
    std::map<Predicate, std::vector<std::size_t>> mono_pos;
    for (const auto& p : preds)
        for (std::size_t i = 0; i < p.arity; ++i)
            mono_pos[p].push_back(mono.fresh());

    for (const auto& c : program.clauses) {
        std::map<std::string, std::size_t> vars;
        std::function<void(const Term&, std::size_t)> visit = [&](const Term& t, std::size_t node) {
            if (t.is_var()) {
                auto [it, fresh] = vars.emplace(t.name, node);
                if (!fresh)
                    mono.unite(it->second, node);
                return;
            }
            auto args = mono.add_case(node, t.functor());
            for (std::size_t i = 0; i < t.args.size(); ++i)
                visit(t.args[i], args[i]);
        };
        auto visit_atom = [&](const Atom& a) {
            if (a.predicate() == kUnify) {
                const std::size_t n = mono.fresh();
                visit(a.args[0], n);
                visit(a.args[1], n);
                return;
            }
            const auto& pos = mono_pos.at(a.predicate());
            for (std::size_t i = 0; i < a.args.size(); ++i)
                visit(a.args[i], pos[i]);
        };
        visit_atom(c.head);
        for (const auto& b : c.body)
            visit_atom(b);
    }

    // Functors sharing a monomorphic type form one family.
    std::map<Functor, Functor> fparent;
    std::function<Functor(const Functor&)> ffind = [&](const Functor& f) -> Functor {
        auto it = fparent.find(f);
        if (it == fparent.end() || it->second == f)
            return f;
        Functor root = ffind(it->second);
        fparent[f] = root;
        return root;
    };
    std::map<std::size_t, std::map<Functor, std::vector<std::size_t>>> roots;
    for (std::size_t n = 0; n < mono.size(); ++n) {
        const std::size_t r = mono.find(n);
        if (roots.contains(r))
            continue;
        const auto& cs = mono.cases(r);
        if (cs.empty())
            continue;
        roots[r] = cs;
        const Functor first = cs.begin()->first;
        fparent.try_emplace(first, first);
        for (const auto& [f, args] : cs) {
            fparent.try_emplace(f, f);
            Functor a = ffind(first), b = ffind(f);
            if (a != b)
                fparent[std::max(a, b)] = std::min(a, b);
        }
    }

    std::map<Functor, int> family_of;
    std::vector<detail::FamilyDecl> families;
    {
        std::map<Functor, int> root_index;
        for (const auto& [f, unused] : fparent) {
            const Functor r = ffind(f);
            auto [it, fresh] = root_index.emplace(r, static_cast<int>(families.size()));
            if (fresh)
                families.emplace_back();
            family_of[f] = it->second;
            families[it->second].functors.push_back(f);
        }
    }
    for (auto& fam : families) {
        for (const auto& f : fam.functors) {
            std::vector<int> slots(f.arity, -1);
            for (std::size_t i = 0; i < f.arity; ++i) {
                bool recursive = true;
                for (const auto& [r, cs] : roots) {
                    auto it = cs.find(f);
                    if (it != cs.end() && mono.find(it->second[i]) != r)
                        recursive = false;
                }
                if (!recursive)
                    slots[i] = static_cast<int>(fam.params++);
            }
            fam.slots[f] = std::move(slots);
        }
    }

    // Phase 2: polymorphic inference with one declaration per functor.
    detail::TypeTerms tt;
    std::map<Predicate, std::vector<std::size_t>> pos;
    for (const auto& p : preds)
        for (std::size_t i = 0; i < p.arity; ++i)
            pos[p].push_back(tt.var());

    bool ok = true;
    for (const auto& c : program.clauses) {
        std::map<std::string, std::size_t> vars;
        std::function<void(const Term&, std::size_t)> visit = [&](const Term& t, std::size_t node) {
            if (!ok)
                return;
            if (t.is_var()) {
                auto [it, fresh] = vars.emplace(t.name, node);
                if (!fresh)
                    ok = tt.unify(it->second, node);
                return;
            }
            const Functor f = t.functor();
            const int fam = family_of.at(f);
            std::vector<std::size_t> params;
            for (std::size_t i = 0; i < families[fam].params; ++i)
                params.push_back(tt.var());
            const std::size_t self = tt.app(fam, params);
            if (!tt.unify(node, self)) {
                ok = false;
                return;
            }
            const auto& slots = families[fam].slots.at(f);
            for (std::size_t i = 0; i < t.args.size(); ++i)
                visit(t.args[i], slots[i] < 0 ? self : params[static_cast<std::size_t>(slots[i])]);
        };
        auto visit_atom = [&](const Atom& a) {
            if (a.predicate() == kUnify) {
                const std::size_t n = tt.var();
                visit(a.args[0], n);
                visit(a.args[1], n);
                return;
            }
            const auto& ps = pos.at(a.predicate());
            for (std::size_t i = 0; i < a.args.size(); ++i)
                visit(a.args[i], ps[i]);
        };
        visit_atom(c.head);
        for (const auto& b : c.body)
            visit_atom(b);
        if (!ok)
            break;
    }
    if (!ok)
        return detail::collapsed_welltyping(program);

    // Name families in order of first use by the signatures, then the rest.
    std::vector<int> order;
    std::vector<bool> named(families.size(), false);
    std::function<void(std::size_t, std::set<std::size_t>&)> walk = [&](std::size_t n, std::set<std::size_t>& stack) {
        n = tt.find(n);
        const auto& nd = tt.node(n);
        if (nd.family < 0)
            return;
        if (stack.contains(n))
            throw detail::CyclicType{};
        if (!named[nd.family]) {
            named[nd.family] = true;
            order.push_back(nd.family);
        }
        stack.insert(n);
        const auto args = nd.args;
        for (auto a : args)
            walk(a, stack);
        stack.erase(n);
    };
    try {
        for (const auto& p : preds)
            for (auto n : pos[p]) {
                std::set<std::size_t> stack;
                walk(n, stack);
            }
    } catch (const detail::CyclicType&) {
        return detail::collapsed_welltyping(program);
    }
    for (std::size_t i = 0; i < families.size(); ++i)
        if (!named[i])
            order.push_back(static_cast<int>(i));
    std::map<int, std::string> fam_name;
    for (std::size_t i = 0; i < order.size(); ++i)
        fam_name[order[i]] = "t" + std::to_string(i + 1);

    WellTyping wt;
    for (int fam : order) {
        const auto& decl = families[fam];
        TypeRule rule{fam_name[fam], {}, {}};
        std::vector<PolyType> params;
        for (std::size_t i = 0; i < decl.params; ++i) {
            rule.params.push_back(detail::param_name(i));
            params.push_back(PolyType::parameter(rule.params.back()));
        }
        const PolyType self = PolyType::named(rule.name, params);
        for (const auto& f : decl.functors) {
            TypeAlternative alt{f, {}};
            for (int s : decl.slots.at(f))
                alt.args.push_back(s < 0 ? self : params[static_cast<std::size_t>(s)]);
            rule.alternatives.push_back(std::move(alt));
        }
        std::stable_sort(rule.alternatives.begin(), rule.alternatives.end(),
                         [](const TypeAlternative& a, const TypeAlternative& b) {
                             return a.functor.arity < b.functor.arity;
                         });
        wt.rules.push_back(std::move(rule));
    }
    for (const auto& p : preds) {
        std::map<std::size_t, std::string> pnames;
        std::function<PolyType(std::size_t)> resolve = [&](std::size_t n) -> PolyType {
            n = tt.find(n);
            const auto& nd = tt.node(n);
            if (nd.family < 0) {
                auto [it, fresh] = pnames.emplace(n, detail::param_name(pnames.size()));
                return PolyType::parameter(it->second);
            }
            PolyType out = PolyType::named(fam_name[nd.family]);
            const auto args = nd.args;
            for (auto a : args)
                out.args.push_back(resolve(a));
            return out;
        };
        std::vector<PolyType> sig;
        for (auto n : pos[p])
            sig.push_back(resolve(n));
        wt.signatures[p] = std::move(sig);
    }
    return wt;
}

// ---------------------------------------------------------------------------
// Checking

struct WellTypingCheck {
    bool ok = true;
    std::optional<std::size_t> failing_clause;
    std::string reason;
};

namespace detail {

/// Parameters are read as dynamic, the type of all terms; every variable must get one type per clause.
class ClauseChecker {
public:
    explicit ClauseChecker(const WellTyping& wt) : wt_(wt) {}

    using Env = std::map<std::string, PolyType>;
    struct Goal {
        const Term* term;
        PolyType type;
    };

    bool check(const Clause& c, std::string& reason) {
        std::vector<Goal> goals;
        std::vector<const Atom*> equations;
        auto add_atom = [&](const Atom& a) -> bool {
            if (a.predicate() == kUnify) {
                equations.push_back(&a);
                return true;
            }
            auto it = wt_.signatures.find(a.predicate());
            if (it == wt_.signatures.end()) {
                reason = "no signature for " + a.predicate().str();
                return false;
            }
            for (std::size_t i = 0; i < a.args.size(); ++i)
                goals.push_back({&a.args[i], ground(it->second[i])});
            return true;
        };
        if (!add_atom(c.head))
            return false;
        for (const auto& b : c.body)
            if (!add_atom(b))
                return false;
        Env env;
        if (solve(goals, 0, equations, 0, env))
            return true;
        reason = "no consistent variable typing";
        return false;
    }

private:
    static PolyType ground(const PolyType& t) {
        if (t.param)
            return PolyType::named(kDynamic);
        PolyType out = PolyType::named(t.name);
        for (const auto& a : t.args)
            out.args.push_back(ground(a));
        return out;
    }

    static PolyType substitute(const PolyType& t, const std::map<std::string, PolyType>& s) {
        if (t.param) {
            auto it = s.find(t.name);
            return it == s.end() ? PolyType::named(kDynamic) : it->second;
        }
        PolyType out = PolyType::named(t.name);
        for (const auto& a : t.args)
            out.args.push_back(substitute(a, s));
        return out;
    }

    /// Argument types for each way `f` can build a term of type `type`.
    std::vector<std::vector<PolyType>> expansions(const PolyType& type, const Functor& f) const {
        std::vector<std::vector<PolyType>> out;
        if (type.name == kDynamic && type.args.empty()) {
            out.emplace_back(f.arity, PolyType::named(kDynamic));
            return out;
        }
        const TypeRule* r = wt_.rule(type.name);
        if (!r || r->params.size() != type.args.size())
            return out;
        std::map<std::string, PolyType> s;
        for (std::size_t i = 0; i < r->params.size(); ++i)
            s[r->params[i]] = type.args[i];
        for (const auto& alt : r->alternatives) {
            if (alt.functor != f)
                continue;
            std::vector<PolyType> args;
            for (const auto& a : alt.args)
                args.push_back(substitute(a, s));
            out.push_back(std::move(args));
        }
        return out;
    }

    bool solve(std::vector<Goal>& goals, std::size_t i, const std::vector<const Atom*>& eqs, std::size_t e, Env& env) {
        if (i == goals.size())
            return solve_equations(goals, eqs, e, env);
        const Goal g = goals[i];
        if (g.term->is_var()) {
            auto it = env.find(g.term->name);
            if (it != env.end())
                return it->second == g.type && solve(goals, i + 1, eqs, e, env);
            env.emplace(g.term->name, g.type);
            if (solve(goals, i + 1, eqs, e, env))
                return true;
            env.erase(g.term->name);
            return false;
        }
        for (auto& args : expansions(g.type, g.term->functor())) {
            const std::size_t mark = goals.size();
            for (std::size_t k = 0; k < args.size(); ++k)
                goals.push_back({&g.term->args[k], std::move(args[k])});
            Env saved = env;
            if (solve(goals, i + 1, eqs, e, env))
                return true;
            env = std::move(saved);
            goals.resize(mark);
        }
        return false;
    }

    bool solve_equations(std::vector<Goal>& goals, const std::vector<const Atom*>& eqs, std::size_t e, Env& env) {
        if (e == eqs.size())
            return true;
        const Term& l = eqs[e]->args[0];
        const Term& r = eqs[e]->args[1];
        std::vector<PolyType> candidates;
        auto typed = [&](const Term& t) -> const PolyType* {
            if (!t.is_var())
                return nullptr;
            auto it = env.find(t.name);
            return it == env.end() ? nullptr : &it->second;
        };
        if (auto* t = typed(l))
            candidates.push_back(*t);
        else if (auto* t = typed(r))
            candidates.push_back(*t);
        else {
            candidates.push_back(PolyType::named(kDynamic));
            for (const auto& rule : wt_.rules)
                candidates.push_back(ground(PolyType::named(rule.name, std::vector<PolyType>(rule.params.size(), PolyType::parameter("_")))));
        }
        for (const auto& ty : candidates) {
            const std::size_t mark = goals.size();
            goals.push_back({&l, ty});
            goals.push_back({&r, ty});
            Env saved = env;
            if (solve(goals, mark, eqs, e + 1, env))
                return true;
            env = std::move(saved);
            goals.resize(mark);
        }
        return false;
    }

    const WellTyping& wt_;
};

} // namespace detail

/// Checks every clause; reports the first that admits no consistent variable typing.
inline WellTypingCheck check_welltyping(const Program& program, const WellTyping& wt) {
    detail::ClauseChecker checker(wt);
    for (const auto& c : program.clauses) {
        std::string reason;
        if (!checker.check(c, reason))
            return {false, c.index, "clause " + std::to_string(c.index) + ": " + reason};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Conversion to regular types

/// Parameters become dynamic and each instance of a parametric type becomes a plain named type.
inline Fta to_regular_types(const WellTyping& wt) {
    Fta out;
    std::map<PolyType, TypeName> names;
    std::set<TypeName> taken{kDynamic, kStatic, kNonvar, kVarType};
    std::vector<PolyType> work;

    auto ground = [](const PolyType& t) {
        std::function<PolyType(const PolyType&)> g = [&](const PolyType& x) {
            if (x.param)
                return PolyType::named(kDynamic);
            PolyType o = PolyType::named(x.name);
            for (const auto& a : x.args)
                o.args.push_back(g(a));
            return o;
        };
        return g(t);
    };
    std::function<TypeName(const PolyType&)> name_of = [&](const PolyType& t) -> TypeName {
        if (t.name == kDynamic && t.args.empty())
            return kDynamic;
        auto it = names.find(t);
        if (it != names.end())
            return it->second;
        TypeName n = t.name;
        if (std::any_of(t.args.begin(), t.args.end(), [](const PolyType& a) { return a.name != kDynamic; }))
            for (const auto& a : t.args)
                n += "_" + name_of(a);
        if (taken.contains(n)) {
            std::size_t k = 2;
            while (taken.contains(n + "_" + std::to_string(k)))
                ++k;
            n += "_" + std::to_string(k);
        }
        taken.insert(n);
        names.emplace(t, n);
        work.push_back(t);
        return n;
    };

    for (const auto& r : wt.rules)
        name_of(ground(PolyType::named(r.name, std::vector<PolyType>(r.params.size(), PolyType::parameter("_")))));
    for (const auto& [p, sig] : wt.signatures)
        for (const auto& t : sig)
            name_of(ground(t));

    while (!work.empty()) {
        const PolyType t = work.back();
        work.pop_back();
        const TypeRule* r = wt.rule(t.name);
        if (!r)
            continue;
        std::map<std::string, PolyType> s;
        for (std::size_t i = 0; i < r->params.size() && i < t.args.size(); ++i)
            s[r->params[i]] = t.args[i];
        for (const auto& alt : r->alternatives) {
            Transition tr{alt.functor, {}, names.at(t)};
            for (const auto& a : alt.args) {
                std::function<PolyType(const PolyType&)> sub = [&](const PolyType& x) {
                    if (x.param) {
                        auto it = s.find(x.name);
                        return it == s.end() ? PolyType::named(kDynamic) : it->second;
                    }
                    PolyType o = PolyType::named(x.name);
                    for (const auto& y : x.args)
                        o.args.push_back(sub(y));
                    return o;
                };
                tr.args.push_back(name_of(sub(a)));
            }
            out.add(std::move(tr));
        }
    }
    out.signature.insert(kVarConstant);
    return out;
}

} // namespace tattoo
