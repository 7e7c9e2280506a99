#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "tattoo/domain_model.hpp"
#include "tattoo/fta.hpp"
#include "tattoo/pipeline.hpp"

namespace testsupport {

inline std::string read_sample(const std::string& name) {
    std::ifstream in(std::string(TATTOO_SAMPLES_DIR) + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<oracle::Rule> rules_of(const tattoo::Fta& fta) {
    std::vector<oracle::Rule> out;
    for (const auto& t : fta.transitions)
        out.push_back({t.functor, t.args, t.result});
    return out;
}

/// Types for a program: user text plus contextual kinds, built the way the pipeline does.
inline tattoo::Fta types_for(const tattoo::Program& program, const std::optional<std::string>& text,
                             const std::vector<std::string>& contextual) {
    std::set<tattoo::ContextualKind> kinds;
    for (const auto& c : contextual)
        kinds.insert(*tattoo::parse_contextual_kind(c));
    return tattoo::detail::build_types(program, text, kinds);
}

/// Domain element of a ground term as the oracle sees it: the DState whose members are exactly
/// the NFTA states accepting the term. nullopt when no such element exists (a violation).
inline std::optional<tattoo::Element> oracle_element(const tattoo::PreInterpretation& pre,
                                                     const std::vector<oracle::Rule>& rules, const tattoo::Term& t) {
    const auto acc = oracle::run(rules, t);
    auto idx = pre.dfta().find(tattoo::DState(std::vector<std::string>(acc.begin(), acc.end())));
    if (!idx)
        return std::nullopt;
    return static_cast<tattoo::Element>(*idx);
}

inline std::optional<tattoo::Tuple> oracle_tuple(const tattoo::PreInterpretation& pre,
                                                 const std::vector<oracle::Rule>& rules,
                                                 const std::vector<tattoo::Term>& args) {
    tattoo::Tuple out;
    for (const auto& a : args) {
        auto e = oracle_element(pre, rules, a);
        if (!e)
            return std::nullopt;
        out.push_back(*e);
    }
    return out;
}

/// One small ground term per domain element, found by breadth-first search over the signature.
/// Every returned witness is re-checked against the oracle by callers that care.
inline std::map<tattoo::Element, tattoo::Term> witnesses(const tattoo::PreInterpretation& pre) {
    std::map<tattoo::Element, tattoo::Term> w;
    bool grew = true;
    while (grew && w.size() < pre.size()) {
        grew = false;
        for (const auto& f : pre.signature()) {
            std::vector<tattoo::Element> have;
            for (const auto& [e, t] : w)
                have.push_back(e);
            if (f.arity > 0 && have.empty())
                continue;
            std::vector<std::size_t> idx(f.arity, 0);
            for (;;) {
                tattoo::Tuple args;
                tattoo::Term t = tattoo::Term::compound(f.name, {});
                for (auto i : idx) {
                    args.push_back(have[i]);
                    t.args.push_back(w.at(have[i]));
                }
                const auto r = pre.apply(f, args);
                if (!w.contains(r)) {
                    w.emplace(r, std::move(t));
                    grew = true;
                }
                std::size_t k = 0;
                while (k < idx.size() && ++idx[k] == have.size())
                    idx[k++] = 0;
                if (k == idx.size())
                    break;
            }
        }
    }
    return w;
}

/// Every ground instance of `args` obtained by mapping each variable to a witness.
inline std::vector<std::vector<tattoo::Term>> witness_instances(const std::vector<tattoo::Term>& args,
                                                                const std::map<tattoo::Element, tattoo::Term>& w) {
    std::vector<std::string> vars;
    for (const auto& a : args)
        oracle::vars_of(a, vars);
    std::vector<std::vector<tattoo::Term>> out;
    oracle::Subst s;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == vars.size()) {
            std::vector<tattoo::Term> inst;
            for (const auto& a : args)
                inst.push_back(oracle::resolve(a, s));
            out.push_back(std::move(inst));
            return;
        }
        for (const auto& [e, t] : w) {
            s[vars[i]] = t;
            go(i + 1);
        }
        s.erase(vars[i]);
    };
    go(0);
    return out;
}

} // namespace testsupport
