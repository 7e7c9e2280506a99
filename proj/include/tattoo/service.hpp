#pragma once

#include <atomic>
#include <cstddef>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "tattoo/error.hpp"
#include "tattoo/pipeline.hpp"
#include "tattoo/report.hpp"

namespace tattoo {

/// A bundled program with its suggested inputs, served by GET /examples.
struct Example {
    std::string name;
    std::string description;
    std::string program;
    std::optional<std::string> types;
    std::vector<std::string> contextual;
    std::optional<std::string> goal;
};

/// Small LRU map from content hash to finished report.
class ResultCache {
public:
    explicit ResultCache(std::size_t capacity) : capacity_(capacity) {}

    std::optional<AnalysisReport> get(const std::string& key) {
        std::lock_guard lock(mu_);
        auto it = index_.find(key);
        if (it == index_.end())
            return std::nullopt;
        order_.splice(order_.begin(), order_, it->second);
        return it->second->second;
    }

    void put(const std::string& key, AnalysisReport report) {
        std::lock_guard lock(mu_);
        if (capacity_ == 0)
            return;
        auto it = index_.find(key);
        if (it != index_.end()) {
            it->second->second = std::move(report);
            order_.splice(order_.begin(), order_, it->second);
            return;
        }
        order_.emplace_front(key, std::move(report));
        index_[key] = order_.begin();
        if (order_.size() > capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return order_.size();
    }

private:
    using Entry = std::pair<std::string, AnalysisReport>;
    std::size_t capacity_;
    mutable std::mutex mu_;
    std::list<Entry> order_;
    std::unordered_map<std::string, std::list<Entry>::iterator> index_;
};

struct ServiceOptions {
    std::size_t cache_entries = 64;
    std::size_t max_jobs = 4;
    std::size_t max_states = kDefaultMaxStates;
    std::chrono::milliseconds budget = kDefaultBudget;
};

class Service {
public:
    Service(ServiceOptions options, std::vector<Example> examples)
        : options_(options), examples_(std::move(examples)), cache_(options.cache_entries) {}

    void mount(httplib::Server& server) {
        // Room for a maximal program and type text plus JSON escaping.
        server.set_payload_max_length(4 * (kMaxProgramBytes + kMaxTypeBytes));
        server.Post("/analyze", [this](const httplib::Request& req, httplib::Response& res) { analyze(req, res); });
        server.Post("/chain", [this](const httplib::Request& req, httplib::Response& res) { chain(req, res); });
        server.Get("/examples", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(examples_json().dump(2), "application/json");
        });
        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"status":"ok"})", "application/json");
        });
    }

    nlohmann::ordered_json examples_json() const {
        auto out = nlohmann::ordered_json::array();
        for (const auto& e : examples_) {
            nlohmann::ordered_json j;
            j["name"] = e.name;
            j["description"] = e.description;
            j["program"] = e.program;
            if (e.types)
                j["types"] = *e.types;
            j["contextual"] = e.contextual;
            if (e.goal)
                j["goal"] = *e.goal;
            out.push_back(std::move(j));
        }
        return out;
    }

    ResultCache& cache() { return cache_; }

private:
    /// Thrown for requests that are not well-formed JSON of the expected shape.
    struct BadRequest : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    struct NotFound : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    class JobSlot {
    public:
        JobSlot(std::atomic<std::size_t>& active, std::size_t limit) : active_(active) {
            acquired_ = active_.fetch_add(1) < limit;
            if (!acquired_)
                active_.fetch_sub(1);
        }
        ~JobSlot() {
            if (acquired_)
                active_.fetch_sub(1);
        }
        JobSlot(const JobSlot&) = delete;
        JobSlot& operator=(const JobSlot&) = delete;
        bool acquired() const { return acquired_; }

    private:
        std::atomic<std::size_t>& active_;
        bool acquired_ = false;
    };

    static void error(httplib::Response& res, int status, const std::string& kind, const std::string& message) {
        nlohmann::ordered_json j;
        j["error"] = kind;
        j["message"] = message;
        res.status = status;
        res.set_content(j.dump(), "application/json");
    }

    static std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
        if (!j.contains(key) || j.at(key).is_null())
            return std::nullopt;
        if (!j.at(key).is_string())
            throw BadRequest(std::string("field '") + key + "' must be a string");
        return j.at(key).get<std::string>();
    }

    AnalysisRequest parse_request(const nlohmann::json& j, bool need_engine) const {
        if (!j.is_object())
            throw BadRequest("request body must be a JSON object");
        AnalysisRequest r;
        auto program = opt_string(j, "program");
        if (!program)
            throw BadRequest("field 'program' is required");
        r.program = std::move(*program);
        r.types = opt_string(j, "types");
        if (j.contains("contextual")) {
            const auto& c = j.at("contextual");
            if (!c.is_array())
                throw BadRequest("field 'contextual' must be an array of strings");
            for (const auto& k : c) {
                if (!k.is_string())
                    throw BadRequest("field 'contextual' must be an array of strings");
                r.contextual.push_back(k.get<std::string>());
            }
        }
        r.goal = opt_string(j, "goal");
        try {
            if (need_engine) {
                if (auto e = opt_string(j, "engine"))
                    r.engine = parse_engine(*e);
            }
            if (auto f = opt_string(j, "format"))
                r.format = parse_format(*f);
        } catch (const InputError& e) {
            throw BadRequest(e.what());
        }
        if (j.contains("chain")) {
            if (!j.at("chain").is_boolean())
                throw BadRequest("field 'chain' must be a boolean");
            r.chain = j.at("chain").get<bool>();
        }
        r.max_states = options_.max_states;
        r.budget = options_.budget;
        return r;
    }

    static nlohmann::json parse_body(const httplib::Request& req) {
        try {
            return nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            throw BadRequest(std::string("malformed JSON: ") + e.what());
        }
    }

    template <class Fn>
    void guarded(httplib::Response& res, Fn&& fn) {
        JobSlot slot(active_, options_.max_jobs);
        if (!slot.acquired()) {
            error(res, 429, "busy", "too many concurrent analyses; retry later");
            return;
        }
        try {
            fn();
        } catch (const BadRequest& e) {
            error(res, 400, "bad_request", e.what());
        } catch (const NotFound& e) {
            error(res, 404, "not_found", e.what());
        } catch (const SizeLimitError& e) {
            error(res, 413, "too_large", e.what());
        } catch (const InputError& e) {
            error(res, 422, "input", e.what());
        } catch (const ResourceLimitError& e) {
            error(res, 422, "resource_limit", e.what());
        } catch (const std::exception& e) {
            error(res, 500, "internal", e.what());
        }
    }

    static void respond(httplib::Response& res, const AnalysisReport& report, ReportFormat format,
                        const std::string& id) {
        res.set_header("X-Result-Id", id);
        res.set_content(emit(report, format), format == ReportFormat::xml ? "application/xml" : "application/json");
    }

    void analyze(const httplib::Request& http, httplib::Response& res) {
        guarded(res, [&] {
            const AnalysisRequest req = parse_request(parse_body(http), true);
            const std::string id = request_hash(req);
            std::optional<AnalysisReport> report = cache_.get(id);
            if (!report) {
                report = run_analysis(req);
                cache_.put(id, *report);
            }
            respond(res, *report, req.format, id);
        });
    }

    void chain(const httplib::Request& http, httplib::Response& res) {
        guarded(res, [&] {
            const nlohmann::json body = parse_body(http);
            AnalysisRequest req = parse_request(body, false);
            if (body.contains("engine"))
                throw BadRequest("/chain always runs the domain model; drop 'engine'");
            auto result_id = opt_string(body, "resultId");
            auto inline_types = opt_string(body, "regularTypes");
            if (result_id.has_value() == inline_types.has_value())
                throw BadRequest("give exactly one of 'resultId' and 'regularTypes'");
            std::string from = "inline";
            std::string regular;
            if (result_id) {
                auto prior = cache_.get(*result_id);
                if (!prior)
                    throw NotFound("no cached result " + *result_id);
                if (!prior->regular_types)
                    throw InputError("result " + *result_id + " has no inferred types to chain from");
                regular = *prior->regular_types;
                from = prior->engine.chained_from ? *prior->engine.chained_from : prior->engine.name;
            } else {
                regular = *inline_types;
            }
            const AnalysisReport report = run_chain(req, regular, from);
            AnalysisRequest key = req;
            key.types = regular + "\n%chain\n" + req.types.value_or("");
            const std::string id = request_hash(key);
            cache_.put(id, report);
            respond(res, report, req.format, id);
        });
    }

    ServiceOptions options_;
    std::vector<Example> examples_;
    ResultCache cache_;
    std::atomic<std::size_t> active_{0};
};

} // namespace tattoo
