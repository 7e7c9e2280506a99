// tattoo: type analysis of logic programs from the command line, or as a small HTTP service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "tattoo/pipeline.hpp"
#include "tattoo/service.hpp"
#include "tattoo_samples.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitResource = 3;

std::string read_file(const std::string& path, std::size_t limit) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw tattoo::InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (text.size() > limit)
        throw tattoo::SizeLimitError(path + " exceeds " + std::to_string(limit) + " bytes");
    return text;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Type analysis workbench for logic programs"};
    app.require_subcommand(0, 1);

    std::string program_path, types_path, contextual, engine = "dm", goal, format = "json";
    std::size_t max_states = 0;
    bool chain = false;
    app.add_option("--program", program_path, "Program file");
    app.add_option("--types", types_path, "Regular type definitions");
    app.add_option("--contextual", contextual, "Comma-separated contextual types: static,nonvar,var");
    app.add_option("--engine", engine, "dm, wt or rta")->check(CLI::IsMember({"dm", "wt", "rta"}));
    app.add_option("--goal", goal, "Goal for goal-dependent analysis, e.g. \"p(list,dynamic)\"");
    app.add_option("--format", format, "json or xml")->check(CLI::IsMember({"json", "xml"}));
    app.add_option("--max-states", max_states, "Determinization state cap (overrides TATTOO_MAX_STATES)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--chain", chain, "Run wt/rta, convert to regular types, then the domain model");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string host = "127.0.0.1";
    int port = 8080;
    tattoo::ServiceOptions service_options;
    long budget_ms = tattoo::kDefaultBudget.count();
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port");
    serve->add_option("--jobs", service_options.max_jobs, "Maximum concurrent analyses")->check(CLI::PositiveNumber);
    serve->add_option("--cache", service_options.cache_entries, "Result cache entries");
    serve->add_option("--budget-ms", budget_ms, "Wall-clock budget per analysis")->check(CLI::PositiveNumber);
    serve->add_option("--max-states", max_states, "Determinization state cap")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        const std::size_t cap = max_states ? max_states : tattoo::max_states_from_env();

        if (*serve) {
            service_options.max_states = cap;
            service_options.budget = std::chrono::milliseconds(budget_ms);
            httplib::Server server;
            server.new_task_queue = [&] {
                return new httplib::ThreadPool(service_options.max_jobs + 2);
            };
            tattoo::Service service(service_options, tattoo::samples::all());
            service.mount(server);
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (!server.listen(host, port)) {
                std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
                return 1;
            }
            return 0;
        }

        if (program_path.empty())
            throw tattoo::InputError("--program is required");
        tattoo::AnalysisRequest req;
        req.program = read_file(program_path, tattoo::kMaxProgramBytes);
        if (!types_path.empty())
            req.types = read_file(types_path, tattoo::kMaxTypeBytes);
        req.contextual = split_commas(contextual);
        req.engine = tattoo::parse_engine(engine);
        if (!goal.empty())
            req.goal = goal;
        req.format = tattoo::parse_format(format);
        req.max_states = cap;
        req.chain = chain;

        const tattoo::AnalysisReport report = tattoo::run_analysis(req);
        for (const auto& d : report.diagnostics)
            std::cerr << "warning: " << d << "\n";
        std::cout << tattoo::emit(report, req.format);
        return 0;
    } catch (const tattoo::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const tattoo::ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
