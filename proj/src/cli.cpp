#include "chaintest/cli.hpp"

#include "chaintest/errors.hpp"
#include "chaintest/session_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace chaintest {

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFacts = 2;
constexpr int kExitFocal = 3;
constexpr int kExitBackend = 4;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MalformedDocumentError("cannot read file: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
}

int exit_code_for(const ChainError& error) {
    switch (error.kind()) {
    case ErrorKind::UnknownClass:
    case ErrorKind::NoSuchMethod:
        return kExitFocal;
    case ErrorKind::MalformedDocument:
    case ErrorKind::SchemaViolation:
    case ErrorKind::DuplicateClass:
    case ErrorKind::CyclicHierarchy:
    case ErrorKind::UnknownReceiver:
        return kExitFacts;
    default:
        return kExitUsage;
    }
}

} // namespace

CliConfig apply_config_file(CliConfig base, const std::string& jsonText) {
    json doc;
    try {
        doc = json::parse(jsonText);
    } catch (const json::parse_error& e) {
        throw MalformedDocumentError(std::string("config file: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaViolationError("config", "config file must hold an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        try {
            if (key == "facts")
                base.facts_path = it->get<std::string>();
            else if (key == "repo_root")
                base.repo_root = it->get<std::string>();
            else if (key == "focal_class")
                base.focal_class = it->get<std::string>();
            else if (key == "focal_method")
                base.focal_method = it->get<std::string>();
            else if (key == "out")
                base.out_dir = it->get<std::string>();
            else if (key == "depth")
                base.depth = it->get<int>();
            else if (key == "max_iters")
                base.max_iters = it->get<int>();
            else if (key == "stagnation")
                base.stagnation = it->get<int>();
            else if (key == "fix_attempts")
                base.fix_attempts = it->get<int>();
            else if (key == "paths_cap")
                base.paths_cap = it->get<int>();
            else if (key == "temperature")
                base.temperature = it->get<double>();
            else if (key == "framework")
                base.framework = it->get<std::string>();
            else if (key == "llm_endpoint")
                base.llm_endpoint = it->get<std::string>();
            else if (key == "runner_cmd")
                base.runner_cmd = it->get<std::string>();
            else if (key == "mock_script")
                base.mock_script = it->get<std::string>();
            else if (key == "roots_scope")
                base.roots_scope = it->get<std::string>();
            else
                throw SchemaViolationError("config." + key, "unknown key");
        } catch (const json::exception& e) {
            throw SchemaViolationError("config." + key, e.what());
        }
    }
    return base;
}

AnalysisResult run_analysis(const CliConfig& config) {
    AnalysisResult result;
    result.facts = parse_facts(read_file(config.facts_path));
    result.hierarchy = build_hierarchy(result.facts);
    result.maps = collect_metadata(result.facts);
    result.targets =
        collect_target_overloads(result.facts, config.focal_class, config.focal_method);

    result.roots = compute_entry_points(result.facts, result.maps);
    if (config.roots_scope == "focal-class-only") {
        std::set<MethodRef> restricted;
        for (const MethodRef& root : result.roots)
            if (root.owner == config.focal_class)
                restricted.insert(root);
        result.roots = std::move(restricted);
    }

    result.graph = build_call_graph(result.facts, result.hierarchy, result.roots);
    result.raw = extract_call_paths(result.graph, result.roots, result.targets, config.depth);
    result.filtered = filter_paths(result.raw, result.maps, config.paths_cap);
    result.closure = resolve_dependencies(result.filtered, config.focal_class, result.maps);
    result.init = build_initialization_set(result.closure, result.maps);

    result.bundle.call_chain_text = render_call_chain_context(result.filtered);
    result.bundle.init_text = render_initialization_context(result.init, result.maps);
    if (result.closure.classes != result.closure.seed) {
        DependencyClosure seedOnly;
        seedOnly.classes = result.closure.seed;
        seedOnly.seed = result.closure.seed;
        result.bundle.init_text_seed_only =
            render_initialization_context(build_initialization_set(seedOnly, result.maps),
                                          result.maps);
    }
    result.bundle.related_sources =
        select_related_sources(result.facts, result.filtered, config.focal_class, config.depth,
                               config.repo_root, &result.missing_sources);

    const ClassInfo* focal = result.facts.find_class(config.focal_class);
    if (focal && focal->source_path) {
        std::ifstream in(std::filesystem::path(config.repo_root) / *focal->source_path,
                         std::ios::binary);
        if (in) {
            std::ostringstream text;
            text << in.rdbuf();
            result.bundle.focal_source = text.str();
        }
    }
    if (result.bundle.focal_source.empty())
        result.missing_sources.push_back(config.focal_class);
    return result;
}

int cmd_context(const CliConfig& config) {
    try {
        AnalysisResult analysis = run_analysis(config);

        std::filesystem::create_directories(config.out_dir);
        std::filesystem::path out(config.out_dir);
        write_file(out / "callchain.txt", analysis.bundle.call_chain_text + "\n");
        write_file(out / "init.txt", analysis.bundle.init_text);

        json paths = json::array();
        for (const CallPath& path : analysis.filtered.paths) {
            json steps = json::array();
            for (const MethodRef& m : path.methods)
                steps.push_back(to_text(m));
            paths.push_back(std::move(steps));
        }
        write_file(out / "paths.json", json{{"paths", std::move(paths)}}.dump(2) + "\n");

        json diagnostics;
        diagnostics["unresolved_call_sites"] =
            static_cast<std::int64_t>(analysis.graph.unresolved_call_sites);
        diagnostics["missing_sources"] = analysis.missing_sources;
        diagnostics["raw_path_count"] = analysis.raw.paths.size();
        diagnostics["filtered_path_count"] = analysis.filtered.paths.size();
        write_file(out / "diagnostics.json", diagnostics.dump(2) + "\n");
        return kExitOk;
    } catch (const ChainError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return exit_code_for(error);
    }
}

int cmd_run(const CliConfig& config) {
    try {
        AnalysisResult analysis = run_analysis(config);

        // Backend selection must succeed before the first iteration.
        std::unique_ptr<LanguageModelClient> model;
        std::unique_ptr<TestRunner> runner;
        std::optional<MockScript> script;
        try {
            if (!config.mock_script.empty())
                script = load_mock_script(config.mock_script);
        } catch (const ChainError& error) {
            std::cerr << "error: " << error.what() << "\n";
            return kExitBackend;
        }
        if (!config.llm_endpoint.empty())
            model = std::make_unique<HttpModelClient>(config.llm_endpoint);
        else if (script)
            model = std::make_unique<MockModel>(script->responses);
        if (!config.runner_cmd.empty())
            runner = std::make_unique<SubprocessRunner>(config.runner_cmd);
        else if (script)
            runner = std::make_unique<MockRunner>(*script);
        if (!model) {
            std::cerr << "error: no model backend; pass --llm-endpoint or --mock-script\n";
            return kExitBackend;
        }
        if (!runner) {
            std::cerr << "error: no runner backend; pass --runner-cmd or --mock-script\n";
            return kExitBackend;
        }

        SessionConfig session;
        session.n_gen = config.max_iters;
        session.n_fix = config.fix_attempts;
        session.m = config.stagnation;
        session.d_max = config.depth;
        session.k_paths = config.paths_cap;
        session.temperature = config.temperature;
        session.framework_name = config.framework;

        AnalysisArtifacts artifacts{analysis.filtered, analysis.init, analysis.bundle};
        MethodRef focal = *analysis.targets.begin(); // canonical first overload

        std::filesystem::create_directories(config.out_dir);
        std::filesystem::path out(config.out_dir);
        std::ofstream logStream(out / "session.jsonl", std::ios::binary);
        SessionLog log(logStream);

        SessionReport report = run_session(session, artifacts, focal, *model, *runner, &log);
        write_file(out / "report.json", serialize_report(report));
        return kExitOk;
    } catch (const ChainError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return exit_code_for(error);
    } catch (const std::invalid_argument& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitUsage;
    }
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"call-chain-aware test generation context engine"};
    app.require_subcommand(1);

    CliConfig config;
    std::string configFile;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", configFile, "JSON config file (flags win on conflict)");
        cmd->add_option("--facts", config.facts_path, "program facts JSON file");
        cmd->add_option("--repo-root", config.repo_root, "root for source_path lookups");
        cmd->add_option("--focal-class", config.focal_class, "fully-qualified focal class");
        cmd->add_option("--focal-method", config.focal_method, "focal method name");
        cmd->add_option("--depth", config.depth, "max path depth d_max");
        cmd->add_option("--max-iters", config.max_iters, "generation iterations N_gen");
        cmd->add_option("--stagnation", config.stagnation, "stagnation window m");
        cmd->add_option("--fix-attempts", config.fix_attempts, "fix rounds per iteration N_fix");
        cmd->add_option("--paths-cap", config.paths_cap, "retained path cap K_paths");
        cmd->add_option("--temperature", config.temperature, "sampling temperature");
        cmd->add_option("--framework", config.framework, "test framework name");
        cmd->add_option("--llm-endpoint", config.llm_endpoint, "chat-completions endpoint URL");
        cmd->add_option("--runner-cmd", config.runner_cmd, "external runner command");
        cmd->add_option("--mock-script", config.mock_script, "scripted mock backends file");
        cmd->add_option("--roots-scope", config.roots_scope, "all-public | focal-class-only")
            ->check(CLI::IsMember({"all-public", "focal-class-only"}));
        cmd->add_option("--out", config.out_dir, "output directory");
    };

    CLI::App* context = app.add_subcommand("context", "write rendered analysis artifacts");
    add_common(context);
    CLI::App* run = app.add_subcommand("run", "run a full generation session");
    add_common(run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Normalize CLI11's exit-code scheme: --help stays success, every
        // parse failure is a plain usage error.
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* active = context->parsed() ? context : run;

    // Precedence: defaults < config file < explicit flags. Flags already
    // landed in `config`, so reload the file layer and re-apply flag values
    // on top of it.
    if (!configFile.empty()) {
        CliConfig fromFile;
        try {
            fromFile = apply_config_file(CliConfig{}, read_file(configFile));
        } catch (const ChainError& error) {
            std::cerr << "error: " << error.what() << "\n";
            return kExitUsage;
        }
        auto pick_str = [&](const char* flag, std::string CliConfig::*field) {
            if (active->count(flag) == 0)
                config.*field = fromFile.*field;
        };
        auto pick_int = [&](const char* flag, int CliConfig::*field) {
            if (active->count(flag) == 0)
                config.*field = fromFile.*field;
        };
        pick_str("--facts", &CliConfig::facts_path);
        pick_str("--repo-root", &CliConfig::repo_root);
        pick_str("--focal-class", &CliConfig::focal_class);
        pick_str("--focal-method", &CliConfig::focal_method);
        pick_str("--out", &CliConfig::out_dir);
        pick_int("--depth", &CliConfig::depth);
        pick_int("--max-iters", &CliConfig::max_iters);
        pick_int("--stagnation", &CliConfig::stagnation);
        pick_int("--fix-attempts", &CliConfig::fix_attempts);
        pick_int("--paths-cap", &CliConfig::paths_cap);
        if (active->count("--temperature") == 0)
            config.temperature = fromFile.temperature;
        pick_str("--framework", &CliConfig::framework);
        pick_str("--llm-endpoint", &CliConfig::llm_endpoint);
        pick_str("--runner-cmd", &CliConfig::runner_cmd);
        pick_str("--mock-script", &CliConfig::mock_script);
        pick_str("--roots-scope", &CliConfig::roots_scope);
    }

    if (config.facts_path.empty() || config.focal_class.empty() || config.focal_method.empty()) {
        std::cerr << "error: --facts, --focal-class, and --focal-method are required\n";
        return kExitUsage;
    }

    return context->parsed() ? cmd_context(config) : cmd_run(config);
}

} // namespace chaintest
