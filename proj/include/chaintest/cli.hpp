#pragma once

#include "chaintest/backends.hpp"
#include "chaintest/orchestrator.hpp"

#include <string>

namespace chaintest {

/// Resolved command-line configuration. Field defaults are the session
/// defaults; a config file and then explicit flags override them in that
/// order.
struct CliConfig {
    std::string facts_path;
    std::string repo_root = ".";
    std::string focal_class;
    std::string focal_method;
    std::string out_dir = ".";
    int depth = 3;          // d_max
    int max_iters = 10;     // N_gen
    int stagnation = 3;     // m
    int fix_attempts = 3;   // N_fix
    int paths_cap = 32;     // K_paths
    double temperature = 0.2;
    std::string framework = "JUnit 4";
    std::string llm_endpoint;
    std::string runner_cmd;
    std::string mock_script;
    std::string roots_scope = "all-public"; // or "focal-class-only"
};

/// Overlays config-file values (same keys as the long flags, underscores for
/// dashes) onto `base`. Unknown keys are rejected.
CliConfig apply_config_file(CliConfig base, const std::string& jsonText);

/// Everything the analysis pipeline produces for one focal method. Shared by
/// `context` and `run`.
struct AnalysisResult {
    ProgramFacts facts;
    ClassHierarchy hierarchy;
    MetadataMaps maps;
    std::set<MethodRef> roots;
    std::set<MethodRef> targets;
    CallGraph graph;
    PathSet raw;
    FilteredPathSet filtered;
    DependencyClosure closure;
    InitializationSet init;
    ContextBundle bundle;
    std::vector<TypeName> missing_sources;
};

/// Runs facts parsing through context-bundle assembly. Throws ChainError on
/// invalid facts or focal selection.
AnalysisResult run_analysis(const CliConfig& config);

/// Exit codes: 0 success, 2 facts errors, 3 unknown focal class or method,
/// 4 backend configuration errors.
int cmd_context(const CliConfig& config);
int cmd_run(const CliConfig& config);

/// Full argv entry point used by the binary and by tests.
int run_cli(int argc, const char* const* argv);

} // namespace chaintest
