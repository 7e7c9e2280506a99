#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tattoo/detail/lexer.hpp"
#include "tattoo/error.hpp"
#include "tattoo/limits.hpp"
#include "tattoo/syntax.hpp"

namespace tattoo {

using TypeName = std::string;

inline const TypeName kDynamic = "dynamic";
inline const TypeName kStatic = "static";
inline const TypeName kNonvar = "nonvar";
inline const TypeName kVarType = "var";

/// Bottom-up rule f(q1,...,qn) -> q.
struct Transition {
    Functor functor;
    std::vector<TypeName> args;
    TypeName result;

    auto operator<=>(const Transition&) const = default;
    bool operator==(const Transition&) const = default;
};

/// A regular type definition read as a (possibly nondeterministic) finite tree automaton.
struct Fta {
    std::set<TypeName> states{kDynamic};
    std::set<Transition> transitions;
    Signature signature{kVarConstant};

    void add(Transition t) {
        states.insert(t.result);
        for (const auto& a : t.args)
            states.insert(a);
        signature.insert(t.functor);
        transitions.insert(std::move(t));
    }

    void merge(const Fta& other) {
        states.insert(other.states.begin(), other.states.end());
        signature.insert(other.signature.begin(), other.signature.end());
        transitions.insert(other.transitions.begin(), other.transitions.end());
    }

    bool operator==(const Fta&) const = default;
};

// ---------------------------------------------------------------------------
// Contextual types

enum class ContextualKind { dynamic, ground, nonvar, var };

inline const TypeName& type_name(ContextualKind k) {
    switch (k) {
    case ContextualKind::ground:
        return kStatic;
    case ContextualKind::nonvar:
        return kNonvar;
    case ContextualKind::var:
        return kVarType;
    default:
        return kDynamic;
    }
}

inline std::optional<ContextualKind> parse_contextual_kind(std::string_view s) {
    if (s == kDynamic)
        return ContextualKind::dynamic;
    if (s == kStatic)
        return ContextualKind::ground;
    if (s == kNonvar)
        return ContextualKind::nonvar;
    if (s == kVarType)
        return ContextualKind::var;
    return std::nullopt;
}

inline bool is_contextual_name(std::string_view s) { return parse_contextual_kind(s).has_value(); }

/// Rules for the selected contextual types over `signature`; dynamic is always generated.
inline Fta contextual_transitions(const Signature& signature, const std::set<ContextualKind>& kinds) {
    Fta out;
    out.signature = signature;
    out.signature.insert(kVarConstant);
    for (const auto& f : out.signature) {
        out.add({f, std::vector<TypeName>(f.arity, kDynamic), kDynamic});
        if (f == kVarConstant)
            continue;
        if (kinds.contains(ContextualKind::ground))
            out.add({f, std::vector<TypeName>(f.arity, kStatic), kStatic});
        if (kinds.contains(ContextualKind::nonvar))
            out.add({f, std::vector<TypeName>(f.arity, kDynamic), kNonvar});
    }
    if (kinds.contains(ContextualKind::var))
        out.add({kVarConstant, {}, kVarType});
    return out;
}

// ---------------------------------------------------------------------------
// Type definition text

/// Reads `name --> rhs ; ... .` rules and `f(q1,...,qn) -> q.` transitions.
/// Names in `predeclared` (and dynamic) may be referenced without a defining rule.
inline Fta parse_type_defs(std::string_view text, const Signature& signature,
                           const std::set<TypeName>& predeclared = {}) {
    using detail::Tok;
    using detail::Token;
    detail::TermParser parser(text);
    auto& lex = parser.lexer();

    struct Pending {
        Transition transition;
        std::vector<Token> arg_tokens;
    };
    std::vector<Pending> pending;
    std::set<TypeName> declared{kDynamic};
    declared.insert(predeclared.begin(), predeclared.end());

    auto type_name_of = [&](const Term& t, const Token& at) -> TypeName {
        if (t.is_var() || !t.args.empty())
            lex.fail("expected a type name but found '" + to_string(t) + "'", at);
        return t.name;
    };
    auto check_reserved = [&](const Term& t, const Token& at) {
        if (t.name == detail::kReservedVar)
            lex.fail("reserved name $VAR may not appear in a type definition", at);
    };
    auto to_transition = [&](const Term& rhs, const Token& at, TypeName result) {
        if (rhs.is_var())
            lex.fail("a type alternative cannot be a variable", at);
        check_reserved(rhs, at);
        Pending p;
        p.transition.functor = rhs.functor();
        p.transition.result = std::move(result);
        for (const auto& a : rhs.args) {
            check_reserved(a, at);
            p.transition.args.push_back(type_name_of(a, at));
            p.arg_tokens.push_back(at);
        }
        pending.push_back(std::move(p));
    };

    // The term parser rejects $VAR outright; that already covers the reserved-name rule.
    while (lex.peek().kind != Tok::eof) {
        const Token start = lex.peek();
        Term lhs = parser.term();
        if (lex.peek().kind == Tok::rule) {
            lex.next();
            TypeName name = type_name_of(lhs, start);
            declared.insert(name);
            for (;;) {
                const Token at = lex.peek();
                Term rhs = parser.term();
                to_transition(rhs, at, name);
                if (lex.peek().kind != Tok::semicolon)
                    break;
                lex.next();
            }
        } else if (lex.peek().kind == Tok::arrow) {
            lex.next();
            const Token at = lex.peek();
            Term rhs = parser.term();
            TypeName name = type_name_of(rhs, at);
            declared.insert(name);
            to_transition(lhs, start, std::move(name));
        } else {
            lex.fail("expected '-->' or '->'" + detail::Lexer::describe(lex.peek()), lex.peek());
        }
        lex.expect(Tok::end, "'.' ending the type rule");
    }

    Fta out;
    out.signature = signature;
    out.signature.insert(kVarConstant);
    for (auto& p : pending) {
        for (std::size_t i = 0; i < p.transition.args.size(); ++i)
            if (!declared.contains(p.transition.args[i]))
                lex.fail("undeclared type '" + p.transition.args[i] + "'", p.arg_tokens[i]);
        out.add(std::move(p.transition));
    }
    for (const auto& d : declared)
        out.states.insert(d);
    return out;
}

// ---------------------------------------------------------------------------
// Acceptance and emptiness

namespace detail {

inline void accepts_into(const Fta& fta, const Term& term, std::set<TypeName>& out) {
    if (term.is_var())
        throw InputError("accepts: term is not ground (variable " + term.name + ")");
    const Functor f = term.functor();
    if (!fta.signature.contains(f))
        throw InputError("accepts: functor " + f.str() + " is outside the signature");
    std::vector<std::set<TypeName>> arg_sets(term.args.size());
    for (std::size_t i = 0; i < term.args.size(); ++i)
        accepts_into(fta, term.args[i], arg_sets[i]);
    auto it = fta.transitions.lower_bound(Transition{f, {}, {}});
    for (; it != fta.transitions.end() && it->functor == f; ++it) {
        bool ok = true;
        for (std::size_t i = 0; i < it->args.size() && ok; ++i)
            ok = arg_sets[i].contains(it->args[i]);
        if (ok)
            out.insert(it->result);
    }
}

} // namespace detail

/// States at which the ground `term` is accepted, computed bottom-up.
inline std::set<TypeName> accepts(const Fta& fta, const Term& term) {
    std::set<TypeName> out;
    detail::accepts_into(fta, term, out);
    return out;
}

/// States that accept no ground term.
inline std::set<TypeName> empty_states(const Fta& fta) {
    std::set<TypeName> inhabited;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& t : fta.transitions) {
            if (inhabited.contains(t.result))
                continue;
            if (std::all_of(t.args.begin(), t.args.end(), [&](const TypeName& a) { return inhabited.contains(a); })) {
                inhabited.insert(t.result);
                changed = true;
            }
        }
    }
    std::set<TypeName> out;
    for (const auto& s : fta.states)
        if (!inhabited.contains(s))
            out.insert(s);
    return out;
}

// ---------------------------------------------------------------------------
// Determinization

/// A determinized state: the canonical (sorted) set of original states it stands for.
struct DState {
    std::vector<TypeName> members;

    DState() = default;
    explicit DState(std::vector<TypeName> m) : members(std::move(m)) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
    }

    bool contains(std::string_view q) const { return std::binary_search(members.begin(), members.end(), q); }

    /// Members other than dynamic.
    std::vector<TypeName> display() const {
        std::vector<TypeName> out;
        for (const auto& m : members)
            if (m != kDynamic)
                out.push_back(m);
        return out;
    }

    /// `{matrix,row}`; the dynamic-only state shows as `[]`.
    std::string label() const {
        auto d = display();
        if (d.empty())
            return "[]";
        std::string out = "{";
        for (std::size_t i = 0; i < d.size(); ++i)
            out += (i ? "," : "") + d[i];
        return out + "}";
    }

    /// `{dynamic,matrix,row}`.
    std::string full_label() const {
        std::string out = "{";
        for (std::size_t i = 0; i < members.size(); ++i)
            out += (i ? "," : "") + members[i];
        return out + "}";
    }

    bool operator==(const DState&) const = default;

    /// Lexicographic on the membership vector over the sorted universe of names, members first:
    /// at the first differing position the smaller name wins, and a proper prefix sorts after.
    std::strong_ordering operator<=>(const DState& other) const {
        const std::size_t n = std::min(members.size(), other.members.size());
        for (std::size_t i = 0; i < n; ++i)
            if (auto c = members[i] <=> other.members[i]; c != 0)
                return c;
        return other.members.size() <=> members.size();
    }
};

/// Bottom-up deterministic, complete automaton over sets of original states.
struct Dfta {
    static constexpr std::uint32_t kMissing = UINT32_MAX;

    std::vector<DState> states;  // canonical order; indices are domain elements
    Signature signature;
    /// Per functor, a row-major table over argument-state tuples (size |states|^arity).
    std::map<Functor, std::vector<std::uint32_t>> table;

    std::size_t size() const { return states.size(); }

    std::optional<std::size_t> find(const DState& s) const {
        auto it = std::lower_bound(states.begin(), states.end(), s);
        if (it == states.end() || *it != s)
            return std::nullopt;
        return static_cast<std::size_t>(it - states.begin());
    }

    std::size_t offset(std::span<const std::uint32_t> args) const {
        std::size_t off = 0;
        for (auto a : args)
            off = off * states.size() + a;
        return off;
    }

    /// Result state index, or kMissing.
    std::uint32_t apply(const Functor& f, std::span<const std::uint32_t> args) const {
        auto it = table.find(f);
        if (it == table.end())
            return kMissing;
        return it->second[offset(args)];
    }

    std::size_t transition_count() const {
        std::size_t n = 0;
        for (const auto& [f, rows] : table)
            n += static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](auto r) { return r != kMissing; }));
        return n;
    }
};

namespace detail {

inline std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t limit) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base)
            throw ResourceLimitError("determinized transition table is too large");
        r *= base;
    }
    return r;
}

inline constexpr std::size_t kMaxTableEntries = std::size_t{1} << 26;

} // namespace detail

/// Subset construction restricted to reachable states.
/// Requires the full dynamic rule set over the FTA's signature.
inline Dfta determinize(const Fta& fta, std::size_t max_states = kDefaultMaxStates,
                        const Deadline& deadline = Deadline::none()) {
    if (std::none_of(fta.signature.begin(), fta.signature.end(), [](const Functor& f) { return f.arity == 0; }))
        throw InputError("degenerate signature: no constants, so no ground terms exist");
    for (const auto& f : fta.signature)
        if (!fta.transitions.contains(Transition{f, std::vector<TypeName>(f.arity, kDynamic), kDynamic}))
            throw InputError("type definitions lack the dynamic rule for " + f.str());

    const std::vector<TypeName> names(fta.states.begin(), fta.states.end());
    auto id_of = [&](const TypeName& n) {
        return static_cast<std::uint32_t>(std::lower_bound(names.begin(), names.end(), n) - names.begin());
    };
    const std::size_t words = (names.size() + 63) / 64;

    struct Rule {
        std::vector<std::uint32_t> args;
        std::uint32_t result;
    };
    std::map<Functor, std::vector<Rule>> rules;
    for (const auto& f : fta.signature)
        rules[f];
    for (const auto& t : fta.transitions) {
        Rule r{{}, id_of(t.result)};
        for (const auto& a : t.args)
            r.args.push_back(id_of(a));
        rules[t.functor].push_back(std::move(r));
    }

    std::vector<std::vector<std::uint32_t>> found;     // member ids, sorted
    std::vector<std::vector<std::uint64_t>> bits;      // membership bitsets
    std::map<std::vector<std::uint32_t>, std::uint32_t> index;
    std::map<Functor, std::map<std::vector<std::uint32_t>, std::uint32_t>> raw;

    auto intern = [&](std::vector<std::uint32_t> members) -> std::uint32_t {
        auto it = index.find(members);
        if (it != index.end())
            return it->second;
        if (found.size() >= max_states)
            throw ResourceLimitError("determinization exceeded the cap of " + std::to_string(max_states) + " states");
        std::vector<std::uint64_t> b(words, 0);
        for (auto m : members)
            b[m / 64] |= std::uint64_t{1} << (m % 64);
        const auto id = static_cast<std::uint32_t>(found.size());
        index.emplace(members, id);
        found.push_back(std::move(members));
        bits.push_back(std::move(b));
        return id;
    };
    auto has = [&](std::uint32_t state, std::uint32_t q) { return (bits[state][q / 64] >> (q % 64)) & 1U; };

    std::size_t processed = 0;  // states whose tuples have all been expanded
    bool first = true;
    while (first || processed < found.size()) {
        deadline.check();
        const std::size_t n = found.size();
        for (const auto& [f, frules] : rules) {
            const std::size_t k = f.arity;
            if (k == 0) {
                if (!first)
                    continue;
            } else if (n == 0) {
                continue;
            }
            detail::checked_power(std::max<std::size_t>(n, 1), k, detail::kMaxTableEntries);
            std::vector<std::uint32_t> tuple(k, 0);
            for (;;) {
                const bool fresh = k == 0 || std::any_of(tuple.begin(), tuple.end(), [&](auto s) { return s >= processed; });
                if (fresh) {
                    std::vector<std::uint32_t> result;
                    for (const auto& r : frules) {
                        bool ok = true;
                        for (std::size_t i = 0; i < k && ok; ++i)
                            ok = has(tuple[i], r.args[i]);
                        if (ok)
                            result.push_back(r.result);
                    }
                    std::sort(result.begin(), result.end());
                    result.erase(std::unique(result.begin(), result.end()), result.end());
                    if (result.empty())
                        throw InternalError("determinize produced an empty state despite dynamic rules");
                    raw[f][tuple] = intern(std::move(result));
                }
                std::size_t i = k;
                while (i > 0 && ++tuple[i - 1] == n)
                    tuple[--i] = 0;
                if (i == 0)
                    break;
            }
        }
        if (first && found.empty())
            break;
        first = false;
        processed = n;
        if (found.size() == n)
            break;
    }

    // Canonical order and remapping.
    std::vector<DState> dstates;
    for (const auto& members : found) {
        std::vector<TypeName> m;
        for (auto id : members)
            m.push_back(names[id]);
        dstates.emplace_back(std::move(m));
    }
    std::vector<std::uint32_t> order(dstates.size());
    for (std::uint32_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return dstates[a] < dstates[b]; });
    std::vector<std::uint32_t> remap(order.size());
    Dfta out;
    out.signature = fta.signature;
    for (std::uint32_t pos = 0; pos < order.size(); ++pos) {
        remap[order[pos]] = pos;
        out.states.push_back(dstates[order[pos]]);
    }
    const std::size_t n = out.states.size();
    for (const auto& [f, entries] : raw) {
        auto& rows = out.table[f];
        rows.assign(detail::checked_power(n, f.arity, detail::kMaxTableEntries), Dfta::kMissing);
        for (const auto& [tuple, result] : entries) {
            std::vector<std::uint32_t> mapped;
            for (auto s : tuple)
                mapped.push_back(remap[s]);
            rows[out.offset(mapped)] = remap[result];
        }
    }
    return out;
}

/// The DFTA read back as an ordinary FTA whose states are named by full labels.
inline Fta as_fta(const Dfta& dfta) {
    Fta out;
    out.signature = dfta.signature;
    for (const auto& s : dfta.states)
        out.states.insert(s.full_label());
    const std::size_t n = dfta.size();
    for (const auto& [f, rows] : dfta.table) {
        std::vector<std::uint32_t> tuple(f.arity, 0);
        for (std::size_t off = 0; off < rows.size(); ++off) {
            std::size_t rest = off;
            for (std::size_t i = f.arity; i > 0; --i) {
                tuple[i - 1] = static_cast<std::uint32_t>(rest % n);
                rest /= n;
            }
            if (rows[off] == Dfta::kMissing)
                continue;
            Transition t{f, {}, dfta.states[rows[off]].full_label()};
            for (auto a : tuple)
                t.args.push_back(dfta.states[a].full_label());
            out.add(std::move(t));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Printing

/// Rule-syntax text for the non-contextual states. Transitions through empty states are dropped
/// (they can never fire), so the text re-parses with every referenced name declared.
inline std::string format_fta(const Fta& fta) {
    auto empty = empty_states(fta);
    empty.erase(kDynamic);  // completed over the program signature later, never empty there
    std::map<TypeName, std::vector<const Transition*>> alts;
    for (const auto& t : fta.transitions) {
        if (is_contextual_name(t.result) || empty.contains(t.result))
            continue;
        if (std::any_of(t.args.begin(), t.args.end(), [&](const TypeName& a) { return empty.contains(a); }))
            continue;
        alts[t.result].push_back(&t);
    }
    std::string out;
    for (auto& [name, list] : alts) {
        // Base cases first, as types are usually written.
        std::stable_sort(list.begin(), list.end(),
                         [](const Transition* a, const Transition* b) { return a->functor.arity < b->functor.arity; });
        out += quote_atom(name) + " --> ";
        for (std::size_t i = 0; i < list.size(); ++i) {
            Term rhs = Term::constant(list[i]->functor.name);
            for (const auto& a : list[i]->args)
                rhs.args.push_back(Term::constant(a));
            out += (i ? " ; " : "") + to_string(rhs);
        }
        out += ".\n";
    }
    return out;
}

} // namespace tattoo
