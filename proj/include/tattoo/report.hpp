#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "tattoo/detail/xml.hpp"
#include "tattoo/domain_model.hpp"
#include "tattoo/error.hpp"
#include "tattoo/fta.hpp"
#include "tattoo/query_answer.hpp"
#include "tattoo/syntax.hpp"

namespace tattoo {

/// Tuples in a report use 1-based domain key indices.
using KeyTuple = std::vector<std::size_t>;

struct KeyEntry {
    std::size_t index = 0;
    std::vector<TypeName> types;  // members other than dynamic
    std::string label;

    DState state() const {
        std::vector<TypeName> m = types;
        m.push_back(kDynamic);
        return DState(std::move(m));
    }

    bool operator==(const KeyEntry&) const = default;
};

struct EngineInfo {
    std::string name;   // dm | wt | rta
    std::string types;  // user | contextual | wt | rta | none
    std::vector<std::string> contextual;
    std::optional<std::string> goal;
    std::optional<std::string> chained_from;  // wt | rta when a descriptive result fed the domain model

    bool operator==(const EngineInfo&) const = default;
};

struct HeadAnnotation {
    std::vector<KeyTuple> tuples;
    bool dead = false;

    bool operator==(const HeadAnnotation&) const = default;
};

struct BodyAnnotation {
    std::size_t position = 0;
    std::string predicate;
    Span span;
    std::optional<std::vector<KeyTuple>> call_tuples;
    bool sliceable = false;

    bool operator==(const BodyAnnotation&) const = default;
};

struct ClauseAnnotation {
    std::size_t index = 0;
    std::string predicate;
    Span span;
    std::optional<HeadAnnotation> head;
    std::vector<BodyAnnotation> body;

    bool operator==(const ClauseAnnotation&) const = default;
};

struct PredicateSummary {
    std::string predicate;
    std::vector<KeyTuple> tuples;
    bool empty = false;

    bool operator==(const PredicateSummary&) const = default;
};

struct AnalysisReport {
    EngineInfo engine;
    std::vector<std::string> diagnostics;
    std::vector<KeyEntry> domain_key;
    std::vector<PredicateSummary> predicates;
    std::vector<ClauseAnnotation> clauses;
    std::optional<std::string> inferred_types;
    std::optional<std::string> regular_types;

    bool operator==(const AnalysisReport&) const = default;
};

// ---------------------------------------------------------------------------
// Building

inline std::vector<KeyEntry> domain_key(const PreInterpretation& pre) {
    std::vector<KeyEntry> out;
    for (std::size_t i = 0; i < pre.size(); ++i) {
        const DState& s = pre.domain()[i];
        out.push_back({i + 1, s.display(), s.label()});
    }
    return out;
}

namespace detail {

inline std::vector<KeyTuple> key_tuples(const std::set<Tuple>& rel) {
    std::vector<KeyTuple> out;
    for (const auto& t : rel) {
        KeyTuple k;
        for (auto e : t)
            k.push_back(static_cast<std::size_t>(e) + 1);
        out.push_back(std::move(k));
    }
    return out;
}

inline ClauseAnnotation bare_clause(const Clause& c) {
    ClauseAnnotation ca;
    ca.index = c.index;
    ca.predicate = c.head.predicate().str();
    ca.span = c.span;
    for (std::size_t i = 0; i < c.body.size(); ++i)
        ca.body.push_back({i, c.body[i].predicate().str(), c.body[i].span, std::nullopt, false});
    return ca;
}

} // namespace detail

/// Report for a domain-model run. With `qa`, heads carry answer patterns, bodies carry call
/// patterns and deadness is per clause; without it deadness is per predicate.
inline AnalysisReport build_report(const Program& program, const PreInterpretation& pre, const Model& model,
                                   const QaResult* qa, EngineInfo engine) {
    AnalysisReport r;
    r.engine = std::move(engine);
    r.diagnostics = program.diagnostics;
    r.domain_key = domain_key(pre);

    const Model& answers = qa ? qa->answers : model;
    for (const auto& p : program.defined()) {
        const auto& rel = answers.relation(p);
        r.predicates.push_back({p.str(), detail::key_tuples(rel), rel.empty()});
    }

    std::optional<DeadCode> dead;
    if (qa) {
        for (const auto& [coord, unused] : qa->calls)
            if (coord.clause >= program.clauses.size() || coord.position >= program.clauses[coord.clause].body.size())
                throw InternalError("call pattern for a body literal that does not exist");
        dead = dead_code(*qa, program);
    }
    const auto empty = empty_predicates(answers, program);

    for (const auto& c : program.clauses) {
        ClauseAnnotation ca = detail::bare_clause(c);
        const Predicate p = c.head.predicate();
        HeadAnnotation head;
        head.tuples = detail::key_tuples(answers.relation(p));
        head.dead = dead ? dead->dead_clauses.contains(c.index) : empty.contains(p);
        ca.head = std::move(head);
        if (qa) {
            for (auto& b : ca.body) {
                const BodyCoord coord{c.index, b.position};
                auto it = qa->calls.find(coord);
                b.call_tuples = detail::key_tuples(it == qa->calls.end() ? std::set<Tuple>{} : it->second);
                b.sliceable = dead->sliceable.contains(coord);
            }
        }
        r.clauses.push_back(std::move(ca));
    }
    return r;
}

/// Report for a descriptive run: no model, just the program layout and the inferred text.
inline AnalysisReport build_descriptive_report(const Program& program, EngineInfo engine, std::string inferred,
                                               std::optional<std::string> regular = std::nullopt) {
    AnalysisReport r;
    r.engine = std::move(engine);
    r.diagnostics = program.diagnostics;
    for (const auto& c : program.clauses)
        r.clauses.push_back(detail::bare_clause(c));
    r.inferred_types = std::move(inferred);
    r.regular_types = std::move(regular);
    return r;
}

// ---------------------------------------------------------------------------
// JSON

using Json = nlohmann::ordered_json;

inline Json to_json(const AnalysisReport& r) {
    Json j;
    Json engine;
    engine["name"] = r.engine.name;
    engine["types"] = r.engine.types;
    engine["contextual"] = r.engine.contextual;
    if (r.engine.goal)
        engine["goal"] = *r.engine.goal;
    if (r.engine.chained_from)
        engine["chainedFrom"] = *r.engine.chained_from;
    j["engine"] = std::move(engine);
    j["diagnostics"] = r.diagnostics;

    Json key = Json::array();
    for (const auto& k : r.domain_key)
        key.push_back(Json{{"index", k.index}, {"types", k.types}, {"label", k.label}});
    j["domainKey"] = std::move(key);

    Json preds = Json::array();
    for (const auto& p : r.predicates)
        preds.push_back(Json{{"predicate", p.predicate}, {"tuples", p.tuples}, {"empty", p.empty}});
    j["predicates"] = std::move(preds);

    Json clauses = Json::array();
    for (const auto& c : r.clauses) {
        Json cj;
        cj["index"] = c.index;
        cj["predicate"] = c.predicate;
        cj["span"] = {c.span.begin, c.span.end};
        if (c.head)
            cj["headAnnotation"] = Json{{"tuples", c.head->tuples}, {"dead", c.head->dead}};
        Json body = Json::array();
        for (const auto& b : c.body) {
            Json bj;
            bj["position"] = b.position;
            bj["predicate"] = b.predicate;
            bj["span"] = {b.span.begin, b.span.end};
            if (b.call_tuples)
                bj["callTuples"] = *b.call_tuples;
            bj["sliceable"] = b.sliceable;
            body.push_back(std::move(bj));
        }
        cj["body"] = std::move(body);
        clauses.push_back(std::move(cj));
    }
    j["clauses"] = std::move(clauses);
    if (r.inferred_types)
        j["inferredTypes"] = *r.inferred_types;
    if (r.regular_types)
        j["regularTypes"] = *r.regular_types;
    return j;
}

namespace detail {

inline const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw InputError(std::string("report json: missing field '") + key + "'");
    return j.at(key);
}

inline std::vector<KeyTuple> read_tuples(const Json& j) {
    if (!j.is_array())
        throw InputError("report json: tuples must be an array");
    std::vector<KeyTuple> out;
    for (const auto& t : j) {
        if (!t.is_array())
            throw InputError("report json: tuple must be an array");
        KeyTuple k;
        for (const auto& e : t) {
            if (!e.is_number_unsigned() || e.get<std::size_t>() == 0)
                throw InputError("report json: tuple entries are 1-based key indices");
            k.push_back(e.get<std::size_t>());
        }
        out.push_back(std::move(k));
    }
    return out;
}

inline Span read_span(const Json& j) {
    if (!j.is_array() || j.size() != 2)
        throw InputError("report json: span must be [begin, end]");
    return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

inline void validate_key_usage(const AnalysisReport& r) {
    auto check = [&](const std::vector<KeyTuple>& ts) {
        for (const auto& t : ts)
            for (auto i : t)
                if (i > r.domain_key.size())
                    throw InputError("report: tuple uses index " + std::to_string(i) + " missing from the domain key");
    };
    for (std::size_t i = 0; i < r.domain_key.size(); ++i)
        if (r.domain_key[i].index != i + 1)
            throw InputError("report: domain key indices must be dense and 1-based");
    for (const auto& p : r.predicates)
        check(p.tuples);
    for (const auto& c : r.clauses) {
        if (c.head)
            check(c.head->tuples);
        for (const auto& b : c.body)
            if (b.call_tuples)
                check(*b.call_tuples);
    }
}

} // namespace detail

/// Parses and validates a report produced by `to_json`.
inline AnalysisReport from_json(const Json& j) {
    using detail::field;
    AnalysisReport r;
    const Json& e = field(j, "engine");
    r.engine.name = field(e, "name").get<std::string>();
    r.engine.types = field(e, "types").get<std::string>();
    r.engine.contextual = field(e, "contextual").get<std::vector<std::string>>();
    if (e.contains("goal"))
        r.engine.goal = e.at("goal").get<std::string>();
    if (e.contains("chainedFrom"))
        r.engine.chained_from = e.at("chainedFrom").get<std::string>();
    r.diagnostics = field(j, "diagnostics").get<std::vector<std::string>>();
    for (const auto& k : field(j, "domainKey"))
        r.domain_key.push_back({field(k, "index").get<std::size_t>(), field(k, "types").get<std::vector<std::string>>(),
                                field(k, "label").get<std::string>()});
    for (const auto& p : field(j, "predicates"))
        r.predicates.push_back({field(p, "predicate").get<std::string>(), detail::read_tuples(field(p, "tuples")),
                                field(p, "empty").get<bool>()});
    for (const auto& c : field(j, "clauses")) {
        ClauseAnnotation ca;
        ca.index = field(c, "index").get<std::size_t>();
        ca.predicate = field(c, "predicate").get<std::string>();
        ca.span = detail::read_span(field(c, "span"));
        if (c.contains("headAnnotation")) {
            const Json& h = c.at("headAnnotation");
            ca.head = HeadAnnotation{detail::read_tuples(field(h, "tuples")), field(h, "dead").get<bool>()};
        }
        for (const auto& b : field(c, "body")) {
            BodyAnnotation ba;
            ba.position = field(b, "position").get<std::size_t>();
            ba.predicate = field(b, "predicate").get<std::string>();
            ba.span = detail::read_span(field(b, "span"));
            if (b.contains("callTuples"))
                ba.call_tuples = detail::read_tuples(b.at("callTuples"));
            ba.sliceable = field(b, "sliceable").get<bool>();
            ca.body.push_back(std::move(ba));
        }
        r.clauses.push_back(std::move(ca));
    }
    if (j.contains("inferredTypes"))
        r.inferred_types = j.at("inferredTypes").get<std::string>();
    if (j.contains("regularTypes"))
        r.regular_types = j.at("regularTypes").get<std::string>();
    detail::validate_key_usage(r);
    return r;
}

// ---------------------------------------------------------------------------
// XML

namespace detail {

inline std::string tuple_text(const KeyTuple& t) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i)
        out += (i ? " " : "") + std::to_string(t[i]);
    return out;
}

inline void emit_tuples(std::ostringstream& os, const std::vector<KeyTuple>& ts, const char* indent) {
    for (const auto& t : ts)
        os << indent << "<tuple>" << tuple_text(t) << "</tuple>\n";
}

inline KeyTuple parse_tuple_text(const std::string& s) {
    KeyTuple out;
    std::istringstream is(s);
    std::size_t v;
    while (is >> v)
        out.push_back(v);
    return out;
}

inline std::vector<KeyTuple> read_xml_tuples(const XmlNode& n) {
    std::vector<KeyTuple> out;
    for (const auto* t : n.all("tuple"))
        out.push_back(parse_tuple_text(t->text));
    return out;
}

inline const char* boolstr(bool b) { return b ? "true" : "false"; }

inline bool xml_bool(const std::string& s) {
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    throw InputError("xml: expected true or false, found '" + s + "'");
}

} // namespace detail

inline std::string to_xml(const AnalysisReport& r) {
    using detail::boolstr;
    using detail::xml_escape;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<report>\n";
    os << "  <engine name=\"" << xml_escape(r.engine.name) << "\" types=\"" << xml_escape(r.engine.types) << "\"";
    if (r.engine.goal)
        os << " goal=\"" << xml_escape(*r.engine.goal) << "\"";
    if (r.engine.chained_from)
        os << " chainedFrom=\"" << xml_escape(*r.engine.chained_from) << "\"";
    os << ">\n";
    for (const auto& k : r.engine.contextual)
        os << "    <contextual kind=\"" << xml_escape(k) << "\"/>\n";
    os << "  </engine>\n  <diagnostics>\n";
    for (const auto& d : r.diagnostics)
        os << "    <diagnostic>" << xml_escape(d) << "</diagnostic>\n";
    os << "  </diagnostics>\n  <domainKey>\n";
    for (const auto& k : r.domain_key) {
        os << "    <element index=\"" << k.index << "\" label=\"" << xml_escape(k.label) << "\">\n";
        for (const auto& t : k.types)
            os << "      <type>" << xml_escape(t) << "</type>\n";
        os << "    </element>\n";
    }
    os << "  </domainKey>\n  <predicates>\n";
    for (const auto& p : r.predicates) {
        os << "    <predicate name=\"" << xml_escape(p.predicate) << "\" empty=\"" << boolstr(p.empty) << "\">\n";
        detail::emit_tuples(os, p.tuples, "      ");
        os << "    </predicate>\n";
    }
    os << "  </predicates>\n  <clauses>\n";
    for (const auto& c : r.clauses) {
        os << "    <clause index=\"" << c.index << "\" predicate=\"" << xml_escape(c.predicate) << "\" begin=\""
           << c.span.begin << "\" end=\"" << c.span.end << "\">\n";
        if (c.head) {
            os << "      <head dead=\"" << boolstr(c.head->dead) << "\">\n";
            detail::emit_tuples(os, c.head->tuples, "        ");
            os << "      </head>\n";
        }
        for (const auto& b : c.body) {
            os << "      <call position=\"" << b.position << "\" predicate=\"" << xml_escape(b.predicate)
               << "\" begin=\"" << b.span.begin << "\" end=\"" << b.span.end << "\" hasPatterns=\""
               << boolstr(b.call_tuples.has_value()) << "\" sliceable=\"" << boolstr(b.sliceable) << "\">\n";
            if (b.call_tuples)
                detail::emit_tuples(os, *b.call_tuples, "        ");
            os << "      </call>\n";
        }
        os << "    </clause>\n";
    }
    os << "  </clauses>\n";
    if (r.inferred_types)
        os << "  <inferredTypes>" << xml_escape(*r.inferred_types) << "</inferredTypes>\n";
    if (r.regular_types)
        os << "  <regularTypes>" << xml_escape(*r.regular_types) << "</regularTypes>\n";
    os << "</report>\n";
    return os.str();
}

inline AnalysisReport from_xml(std::string_view text) {
    using detail::xml_bool;
    const detail::XmlNode root = detail::XmlReader(text).document();
    if (root.name != "report")
        throw InputError("xml: root element must be <report>");
    auto need = [](const detail::XmlNode* n, const char* what) -> const detail::XmlNode& {
        if (!n)
            throw InputError(std::string("xml: missing <") + what + ">");
        return *n;
    };
    AnalysisReport r;
    const auto& e = need(root.child("engine"), "engine");
    r.engine.name = e.attr("name");
    r.engine.types = e.attr("types");
    if (e.has("goal"))
        r.engine.goal = e.attr("goal");
    if (e.has("chainedFrom"))
        r.engine.chained_from = e.attr("chainedFrom");
    for (const auto* k : e.all("contextual"))
        r.engine.contextual.push_back(k->attr("kind"));
    for (const auto* d : need(root.child("diagnostics"), "diagnostics").all("diagnostic"))
        r.diagnostics.push_back(d->text);
    for (const auto* k : need(root.child("domainKey"), "domainKey").all("element")) {
        KeyEntry entry{std::stoul(k->attr("index")), {}, k->attr("label")};
        for (const auto* t : k->all("type"))
            entry.types.push_back(t->text);
        r.domain_key.push_back(std::move(entry));
    }
    for (const auto* p : need(root.child("predicates"), "predicates").all("predicate"))
        r.predicates.push_back({p->attr("name"), detail::read_xml_tuples(*p), xml_bool(p->attr("empty"))});
    for (const auto* c : need(root.child("clauses"), "clauses").all("clause")) {
        ClauseAnnotation ca;
        ca.index = std::stoul(c->attr("index"));
        ca.predicate = c->attr("predicate");
        ca.span = {std::stoul(c->attr("begin")), std::stoul(c->attr("end"))};
        if (const auto* h = c->child("head"))
            ca.head = HeadAnnotation{detail::read_xml_tuples(*h), xml_bool(h->attr("dead"))};
        for (const auto* b : c->all("call")) {
            BodyAnnotation ba;
            ba.position = std::stoul(b->attr("position"));
            ba.predicate = b->attr("predicate");
            ba.span = {std::stoul(b->attr("begin")), std::stoul(b->attr("end"))};
            if (xml_bool(b->attr("hasPatterns")))
                ba.call_tuples = detail::read_xml_tuples(*b);
            ba.sliceable = xml_bool(b->attr("sliceable"));
            ca.body.push_back(std::move(ba));
        }
        r.clauses.push_back(std::move(ca));
    }
    if (const auto* t = root.child("inferredTypes"))
        r.inferred_types = t->text;
    if (const auto* t = root.child("regularTypes"))
        r.regular_types = t->text;
    detail::validate_key_usage(r);
    return r;
}

enum class ReportFormat { json, xml };

inline std::string emit(const AnalysisReport& r, ReportFormat format) {
    if (format == ReportFormat::xml)
        return to_xml(r);
    return to_json(r).dump(2) + "\n";
}

inline AnalysisReport read_report(std::string_view text, ReportFormat format) {
    if (format == ReportFormat::xml)
        return from_xml(text);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(std::string("report json: ") + ex.what());
    }
    try {
        return from_json(j);
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(std::string("report json: ") + ex.what());
    }
}

} // namespace tattoo
