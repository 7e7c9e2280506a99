#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tattoo/domain_model.hpp"
#include "tattoo/error.hpp"
#include "tattoo/fta.hpp"
#include "tattoo/limits.hpp"
#include "tattoo/query_answer.hpp"
#include "tattoo/regular_approx.hpp"
#include "tattoo/report.hpp"
#include "tattoo/syntax.hpp"
#include "tattoo/welltyping.hpp"

namespace tattoo {

inline constexpr std::size_t kMaxProgramBytes = std::size_t{1} << 20;
inline constexpr std::size_t kMaxTypeBytes = std::size_t{256} << 10;
inline constexpr std::chrono::milliseconds kDefaultBudget{30000};

enum class Engine { dm, wt, rta };

inline std::string_view engine_name(Engine e) {
    switch (e) {
    case Engine::wt: return "wt";
    case Engine::rta: return "rta";
    default: return "dm";
    }
}

inline Engine parse_engine(std::string_view s) {
    if (s == "dm")
        return Engine::dm;
    if (s == "wt")
        return Engine::wt;
    if (s == "rta")
        return Engine::rta;
    throw InputError("unknown engine '" + std::string(s) + "' (expected dm, wt or rta)");
}

inline ReportFormat parse_format(std::string_view s) {
    if (s == "json")
        return ReportFormat::json;
    if (s == "xml")
        return ReportFormat::xml;
    throw InputError("unknown format '" + std::string(s) + "' (expected json or xml)");
}

struct AnalysisRequest {
    std::string program;
    std::optional<std::string> types;
    std::vector<std::string> contextual;  // static, nonvar, var
    Engine engine = Engine::dm;
    std::optional<std::string> goal;
    ReportFormat format = ReportFormat::json;
    std::size_t max_states = kDefaultMaxStates;
    bool chain = false;  // wt/rta, then dm over the converted types
    std::chrono::milliseconds budget = kDefaultBudget;
};

/// Cap from TATTOO_MAX_STATES, or the default when unset.
inline std::size_t max_states_from_env() {
    const char* v = std::getenv("TATTOO_MAX_STATES");
    if (!v || !*v)
        return kDefaultMaxStates;
    char* end = nullptr;
    const unsigned long long n = std::strtoull(v, &end, 10);
    if (*end != '\0' || n == 0)
        throw InputError("TATTOO_MAX_STATES must be a positive integer, got '" + std::string(v) + "'");
    return static_cast<std::size_t>(n);
}

namespace detail {

inline void check_sizes(const AnalysisRequest& req) {
    if (req.program.size() > kMaxProgramBytes)
        throw SizeLimitError("program text exceeds " + std::to_string(kMaxProgramBytes) + " bytes");
    if (req.types && req.types->size() > kMaxTypeBytes)
        throw SizeLimitError("type text exceeds " + std::to_string(kMaxTypeBytes) + " bytes");
}

/// Sorted, deduplicated contextual names; dynamic is accepted and dropped since it is always present.
inline std::vector<std::string> canonical_contextual(const std::vector<std::string>& names,
                                                     std::set<ContextualKind>& kinds) {
    std::set<std::string> out;
    for (const auto& n : names) {
        auto k = parse_contextual_kind(n);
        if (!k)
            throw InputError("unknown contextual type '" + n + "' (expected static, nonvar or var)");
        if (*k == ContextualKind::dynamic)
            continue;
        kinds.insert(*k);
        out.insert(n);
    }
    return {out.begin(), out.end()};
}

inline Fta build_types(const Program& program, const std::optional<std::string>& text,
                       const std::set<ContextualKind>& kinds) {
    std::set<TypeName> predeclared;
    for (auto k : kinds)
        predeclared.insert(type_name(k));
    Fta user = text ? parse_type_defs(*text, signature_of(program), predeclared) : Fta{};
    user.signature.merge(signature_of(program));
    for (const auto& s : user.states)
        if (is_contextual_name(s) && s != kDynamic && !predeclared.contains(s))
            throw InputError("type '" + s + "' is contextual; select it with --contextual instead of defining it");
    Fta fta = contextual_transitions(user.signature, kinds);
    fta.merge(user);
    return fta;
}

inline AnalysisReport run_dm(const Program& program, const AnalysisRequest& req, const std::optional<std::string>& types,
                             EngineInfo info, const Deadline& deadline) {
    std::set<ContextualKind> kinds;
    info.contextual = canonical_contextual(req.contextual, kinds);
    const Fta fta = build_types(program, types, kinds);
    std::optional<TypedGoal> goal;
    if (req.goal) {
        goal = TypedGoal::parse(*req.goal);
        for (const auto& ty : goal->types)
            if (!fta.states.contains(ty))
                throw InputError("unknown type '" + ty + "' in goal " + goal->str());
        info.goal = goal->str();
    }
    const PreInterpretation pre(determinize(fta, req.max_states, deadline));
    ModelOptions opts;
    opts.deadline = deadline;
    const Model model = least_model(program, pre, BuiltinPolicy::all_tuples(), opts);
    if (!goal)
        return build_report(program, pre, model, nullptr, std::move(info));
    const QaResult qa = analyze_goal(program, pre, *goal, BuiltinPolicy::all_tuples(), deadline);
    return build_report(program, pre, model, &qa, std::move(info));
}

struct Descriptive {
    std::string text;
    std::string regular;
};

inline Descriptive run_descriptive(const Program& program, Engine engine) {
    if (engine == Engine::wt) {
        const WellTyping wt = infer_welltyping(program);
        return {wt.str(), format_fta(to_regular_types(wt))};
    }
    const RegularApprox ra = infer_rta(program);
    return {ra.str(), format_fta(to_regular_types(ra))};
}

} // namespace detail

/// Parses, analyses and assembles the report for one request.
inline AnalysisReport run_analysis(const AnalysisRequest& req) {
    detail::check_sizes(req);
    const Deadline deadline(req.budget);
    const Program program = parse_program(req.program);

    if (req.engine == Engine::dm) {
        if (req.chain)
            throw InputError("--chain needs a descriptive engine (wt or rta)");
        EngineInfo info{"dm", req.types ? "user" : "contextual", {}, std::nullopt, std::nullopt};
        return detail::run_dm(program, req, req.types, std::move(info), deadline);
    }
    if (req.goal)
        throw InputError("a goal is only valid with engine dm");

    const std::string name(engine_name(req.engine));
    const detail::Descriptive d = detail::run_descriptive(program, req.engine);
    if (!req.chain) {
        if (req.types || !req.contextual.empty())
            throw InputError("engine " + name + " infers its own types; --types and --contextual need --chain");
        return build_descriptive_report(program, {name, "none", {}, std::nullopt, std::nullopt}, d.text, d.regular);
    }
    std::string types = d.regular;
    if (req.types)
        types += *req.types;
    EngineInfo info{"dm", name, {}, std::nullopt, name};
    AnalysisReport r = detail::run_dm(program, req, types, std::move(info), deadline);
    r.inferred_types = d.text;
    r.regular_types = d.regular;
    return r;
}

/// Domain-model run over previously inferred regular types (the chaining action).
inline AnalysisReport run_chain(const AnalysisRequest& req, const std::string& regular_types,
                                const std::string& chained_from) {
    detail::check_sizes(req);
    if (regular_types.size() > kMaxTypeBytes)
        throw SizeLimitError("type text exceeds " + std::to_string(kMaxTypeBytes) + " bytes");
    const Deadline deadline(req.budget);
    const Program program = parse_program(req.program);
    std::string types = regular_types;
    if (req.types)
        types += *req.types;
    EngineInfo info{"dm", chained_from, {}, std::nullopt, chained_from};
    return detail::run_dm(program, req, types, std::move(info), deadline);
}

/// Stable content hash of the request fields that determine the report.
inline std::string request_hash(const AnalysisRequest& req) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0xff;
        h *= 1099511628211ull;
    };
    mix(req.program);
    mix(req.types ? "T" + *req.types : "-");
    std::vector<std::string> ctx = req.contextual;
    std::sort(ctx.begin(), ctx.end());
    for (const auto& c : ctx)
        mix(c);
    mix(engine_name(req.engine));
    mix(req.goal ? "G" + *req.goal : "-");
    mix(std::to_string(req.max_states));
    mix(req.chain ? "chain" : "-");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace tattoo
