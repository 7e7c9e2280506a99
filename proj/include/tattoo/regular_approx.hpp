#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tattoo/fta.hpp"
#include "tattoo/syntax.hpp"

namespace tattoo {

/// Regular over-approximation of a program's least model: an FTA plus one state per argument.
struct RegularApprox {
    Fta fta;
    std::map<Predicate, std::vector<TypeName>> signatures;

    /// True when `state` has every dynamic rule (except for $VAR), i.e. it accepts every program term.
    bool is_dynamic(const TypeName& state) const {
        if (state == kDynamic)
            return true;
        for (const auto& f : fta.signature) {
            if (f == kVarConstant)
                continue;
            if (!fta.transitions.contains(Transition{f, std::vector<TypeName>(f.arity, kDynamic), state}))
                return false;
        }
        return true;
    }

    /// Signature entry as displayed: states equivalent to dynamic show as dynamic.
    TypeName display_type(const TypeName& state) const { return is_dynamic(state) ? kDynamic : state; }

    std::string str() const {
        std::string out = format_fta(fta);
        for (const auto& [p, states] : signatures) {
            Term t = Term::constant(p.name);
            for (const auto& s : states)
                t.args.push_back(Term::constant(display_type(s)));
            out += to_string(t) + ".\n";
        }
        return out;
    }

    bool operator==(const RegularApprox&) const = default;
};

namespace detail {

struct PathStep {
    Functor functor;
    std::size_t arg;
};

struct Occurrence {
    Predicate predicate;
    std::size_t arg = 0;
    std::vector<PathStep> path;
};

inline bool find_path(const Term& t, const std::string& var, std::vector<PathStep>& path) {
    if (t.is_var())
        return t.name == var;
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        path.push_back({t.functor(), i});
        if (find_path(t.args[i], var, path))
            return true;
        path.pop_back();
    }
    return false;
}

/// Merges states whose rules agree up to the merge, then names the classes t1, t2, ... in a
/// traversal that never looks at the old names. Clause order therefore cannot change the result.
inline RegularApprox canonical(const RegularApprox& in) {
    std::map<TypeName, std::vector<const Transition*>> rules;
    for (const auto& t : in.fta.transitions)
        rules[t.result].push_back(&t);
    std::vector<TypeName> states;
    std::map<TypeName, std::size_t> color{{kDynamic, 0}};
    for (const auto& s : in.fta.states)
        if (s != kDynamic) {
            states.push_back(s);
            color[s] = 1;
        }

    auto rule_keys = [&](const TypeName& s) {
        std::vector<std::pair<std::string, std::vector<std::size_t>>> keys;
        for (const auto* t : rules[s]) {
            std::vector<std::size_t> args;
            for (const auto& a : t->args)
                args.push_back(color.at(a));
            keys.emplace_back(t->functor.str(), std::move(args));
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        return keys;
    };

    std::size_t classes = states.empty() ? 0 : 1;
    for (;;) {
        std::map<TypeName, std::string> sig;
        for (const auto& s : states) {
            std::string k = std::to_string(color[s]) + "|";
            for (const auto& [f, args] : rule_keys(s)) {
                k += f;
                for (auto a : args)
                    k += "," + std::to_string(a);
                k += ";";
            }
            sig[s] = std::move(k);
        }
        std::map<std::string, std::size_t> index;
        for (const auto& [s, k] : sig)
            index.emplace(k, 0);
        std::size_t next = 1;
        for (auto& [k, i] : index)
            i = next++;
        for (const auto& s : states)
            color[s] = index.at(sig[s]);
        if (index.size() == classes)
            break;
        classes = index.size();
    }

    std::map<std::size_t, TypeName> rep;  // class -> one member
    for (const auto& s : states)
        rep.emplace(color[s], s);
    std::map<std::size_t, TypeName> name{{0, kDynamic}};
    std::size_t counter = 1;
    std::function<void(std::size_t)> visit = [&](std::size_t cls) {
        if (name.contains(cls))
            return;
        name[cls] = "t" + std::to_string(counter++);
        for (const auto& [f, args] : rule_keys(rep.at(cls)))
            for (auto a : args)
                visit(a);
    };
    for (const auto& [p, sts] : in.signatures)
        for (const auto& s : sts)
            visit(color.at(s));
    for (const auto& [cls, s] : rep)
        visit(cls);

    RegularApprox out;
    out.fta.signature = in.fta.signature;
    for (const auto& t : in.fta.transitions) {
        if (t.result != kDynamic && rep.at(color.at(t.result)) != t.result)
            continue;
        Transition c{t.functor, {}, name.at(color.at(t.result))};
        for (const auto& a : t.args)
            c.args.push_back(name.at(color.at(a)));
        out.fta.add(std::move(c));
    }
    for (const auto& [cls, n] : name)
        out.fta.states.insert(n);
    for (const auto& [p, sts] : in.signatures)
        for (const auto& s : sts)
            out.signatures[p].push_back(name.at(color.at(s)));
    return out;
}

class RtaBuilder {
public:
    explicit RtaBuilder(const Program& program) : program_(program) {
        fta_ = contextual_transitions(signature_of(program), {});
        defined_ = program.defined();
        std::size_t next = 1;
        for (const auto& p : defined_)
            for (std::size_t i = 0; i < p.arity; ++i) {
                TypeName n = "t" + std::to_string(next++);
                fta_.states.insert(n);
                arg_states_[p].push_back(std::move(n));
            }
        counter_ = next;
    }

    RegularApprox run() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& c : program_.clauses)
                changed |= apply(c);
        }
        RegularApprox out;
        out.fta = std::move(fta_);
        out.signatures = arg_states_;
        return canonical(out);
    }

private:
    std::set<TypeName> project(const TypeName& state, const std::vector<PathStep>& path) const {
        std::set<TypeName> cur{state};
        for (const auto& step : path) {
            std::set<TypeName> next;
            auto it = fta_.transitions.lower_bound(Transition{step.functor, {}, {}});
            for (; it != fta_.transitions.end() && it->functor == step.functor; ++it)
                if (cur.contains(it->result))
                    next.insert(it->args[step.arg]);
            cur = std::move(next);
            if (cur.empty())
                break;
        }
        return cur;
    }

    /// Types of the clause variables, or nullopt when the body cannot be satisfied yet.
    std::optional<std::map<std::string, std::set<TypeName>>> variable_types(const Clause& c) const {
        std::map<std::string, std::set<TypeName>> out;
        for (const auto& v : clause_variables(c)) {
            std::optional<Occurrence> occ;
            for (const auto& b : c.body) {
                if (!defined_.contains(b.predicate()))
                    continue;
                for (std::size_t i = 0; i < b.args.size() && !occ; ++i) {
                    std::vector<PathStep> path;
                    if (find_path(b.args[i], v, path))
                        occ = Occurrence{b.predicate(), i, std::move(path)};
                }
                if (occ)
                    break;
            }
            if (!occ) {
                out[v] = {kDynamic};
                continue;
            }
            auto s = project(arg_states_.at(occ->predicate)[occ->arg], occ->path);
            if (s.empty())
                return std::nullopt;
            if (s.contains(kDynamic))
                s = {kDynamic};
            out[v] = std::move(s);
        }
        return out;
    }

    bool add(Transition t) {
        if (fta_.transitions.contains(t))
            return false;
        fta_.add(std::move(t));
        return true;
    }

    /// Copies the language of `sources` into `target`.
    bool copy_into(const TypeName& target, const std::set<TypeName>& sources) {
        bool changed = false;
        if (sources.contains(kDynamic)) {
            for (const auto& f : fta_.signature)
                if (f != kVarConstant)
                    changed |= add({f, std::vector<TypeName>(f.arity, kDynamic), target});
            return changed;
        }
        std::vector<Transition> copies;
        for (const auto& t : fta_.transitions)
            if (sources.contains(t.result) && t.result != target)
                copies.push_back({t.functor, t.args, target});
        for (auto& t : copies)
            changed |= add(std::move(t));
        return changed;
    }

    TypeName generated(const std::string& key) {
        auto it = generated_.find(key);
        if (it != generated_.end())
            return it->second;
        TypeName n = "t" + std::to_string(counter_++);
        fta_.states.insert(n);
        generated_.emplace(key, n);
        return n;
    }

    bool contribute(const TypeName& target, const Term& t, const std::map<std::string, std::set<TypeName>>& types,
                    const std::string& key) {
        if (t.is_var())
            return copy_into(target, types.at(t.name));
        bool changed = false;
        Transition tr{t.functor(), {}, target};
        for (std::size_t j = 0; j < t.args.size(); ++j) {
            const Term& a = t.args[j];
            const std::string sub = key + "." + std::to_string(j);
            if (a.is_var()) {
                const auto& s = types.at(a.name);
                if (s.size() == 1) {
                    tr.args.push_back(*s.begin());
                    continue;
                }
                const TypeName u = generated(sub);
                changed |= copy_into(u, s);
                tr.args.push_back(u);
            } else {
                const TypeName g = generated(sub);
                changed |= contribute(g, a, types, sub);
                tr.args.push_back(g);
            }
        }
        changed |= add(std::move(tr));
        return changed;
    }

    bool apply(const Clause& c) {
        auto types = variable_types(c);
        if (!types)
            return false;
        bool changed = false;
        const auto& heads = arg_states_.at(c.head.predicate());
        for (std::size_t i = 0; i < c.head.args.size(); ++i)
            changed |= contribute(heads[i], c.head.args[i], *types,
                                  std::to_string(c.index) + ":" + std::to_string(i));
        return changed;
    }

    const Program& program_;
    Fta fta_;
    std::set<Predicate> defined_;
    std::map<Predicate, std::vector<TypeName>> arg_states_;
    std::map<std::string, TypeName> generated_;
    std::size_t counter_ = 1;
};

} // namespace detail

/// Monovariant regular approximation: one state per predicate argument, variables typed by
/// their first occurrence in a defined body atom, head-only variables typed dynamic.
inline RegularApprox infer_rta(const Program& program) { return detail::RtaBuilder(program).run(); }

/// Predicate signatures dropped; the automaton is passed through.
inline Fta to_regular_types(const RegularApprox& approx) { return approx.fta; }

} // namespace tattoo
