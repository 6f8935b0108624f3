#pragma once

#include "chaintest/expected.hpp"
#include "chaintest/promptkit.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace chaintest {

/// Knobs of one generation session. Defaults follow the evaluated
/// configuration: 10 generation iterations, 3 fix attempts, stagnation
/// window 3, search depth 3, temperature 0.2, JUnit 4.
struct SessionConfig {
    int n_gen = 10;
    int n_fix = 3;
    int m = 3;
    int d_max = 3;
    int k_paths = 32;
    double temperature = 0.2;
    std::string framework_name = "JUnit 4";
    PromptLimits limits;
};

/// Focal-class coverage of the cumulative passing suite.
struct CoverageSnapshot {
    int line_covered = 0;
    int line_total = 0;
    int branch_covered = 0;
    int branch_total = 0;

    bool operator==(const CoverageSnapshot&) const = default;
};

enum class TestStatus { Untried, Passing, Failing, Unrepaired };

std::string_view to_string(TestStatus status);

struct TestCase {
    std::string name;
    std::string source;
    TestStatus status = TestStatus::Untried;
};

enum class TestVerdict { Pass, Fail };

/// Result of one runner invocation: per-test verdicts, digests for the
/// failing tests, and coverage of the passing tests.
struct RunOutcome {
    bool compiled = true;
    std::map<std::string, TestVerdict> per_test;
    std::vector<FailureDigest> failures;
    CoverageSnapshot coverage;
};

struct IterationRecord {
    int index = 0;
    std::vector<TestCase> generated;
    int fix_attempts_used = 0;
    RunOutcome outcome;
    bool improved = false;
};

enum class StopReason { MaxIterations, Stagnation };

std::string_view to_string(StopReason reason);

struct SessionReport {
    MethodRef focal;
    std::vector<IterationRecord> iterations;
    StopReason stop_reason = StopReason::MaxIterations;
    std::vector<TestCase> final_suite;
    CoverageSnapshot final_coverage;
};

/// Completion backend. Implementations must be deterministic whenever the
/// backing service is; errors are recoverable and reported via Expected.
class LanguageModelClient {
public:
    virtual ~LanguageModelClient() = default;
    virtual Expected<std::string> complete(const std::string& system, const std::string& user,
                                           double temperature) = 0;
};

/// Build-run-measure backend. `suite` is the cumulative passing suite,
/// `candidates` the new or patched tests under trial; coverage in the
/// outcome is that of all passing tests of the run.
class TestRunner {
public:
    virtual ~TestRunner() = default;
    virtual Expected<RunOutcome> run(const std::vector<TestCase>& suite,
                                     const std::vector<TestCase>& candidates,
                                     const TypeName& focalClass) = 0;
};

/// Append-only JSON-lines session log: one record per prompt, response, run,
/// and decision. Deterministic (no timestamps) so logged sessions can be
/// replayed and compared byte-for-byte.
class SessionLog {
public:
    explicit SessionLog(std::ostream& out) : out_(&out) {}

    void record(std::string_view event, nlohmann::ordered_json payload);

    /// Events seen so far, for in-process inspection and replay tests.
    const std::vector<nlohmann::ordered_json>& events() const { return events_; }

private:
    std::ostream* out_;
    std::vector<nlohmann::ordered_json> events_;
};

/// Analysis artifacts precomputed once per focal method and shared by every
/// iteration of a session.
struct AnalysisArtifacts {
    FilteredPathSet filtered;
    InitializationSet init;
    ContextBundle bundle;
};

/// A compilable test container in the focal class's package holding one
/// trivially-passing placeholder test, named `<OuterSimpleName>CatTest`.
TestCase make_scaffold(const TypeName& focalClass, const std::string& frameworkName);

/// Pulls fenced code blocks out of a model response and returns one TestCase
/// per declared test method (blocks may hold several). Throws
/// NoCodeFoundError when the response has no fenced block at all.
std::vector<TestCase> extract_test_code(const std::string& modelResponse);

struct FixResult {
    std::vector<TestCase> repaired;
    std::vector<TestCase> unrepaired;
    int rounds_used = 0;
    /// Outcome of the last runner invocation inside the loop, when any.
    std::optional<RunOutcome> last_outcome;
};

/// Bounded repair loop: up to n_fix rounds of fixing prompt -> replacement
/// application -> re-run over the still-failing tests. Backend errors abort
/// the loop; whatever is still failing comes back unrepaired.
FixResult fix_loop(const std::vector<TestCase>& failures,
                   const std::vector<FailureDigest>& digests, const ContextBundle& bundle,
                   const std::vector<TestCase>& suite, const MethodRef& focal,
                   LanguageModelClient& model, TestRunner& runner, const SessionConfig& config,
                   SessionLog* log = nullptr);

/// Stop when the history reached n_gen records, else when the last m records
/// all failed to improve coverage.
std::optional<StopReason> should_stop(const std::vector<IterationRecord>& history,
                                      const SessionConfig& config);

/// The full iterative workflow for one focal method against pluggable
/// backends. Backend failures make the affected iteration non-improving and
/// the session continue toward its stopping rules.
SessionReport run_session(const SessionConfig& config, const AnalysisArtifacts& analysis,
                          const MethodRef& focal, LanguageModelClient& model, TestRunner& runner,
                          SessionLog* log = nullptr);

} // namespace chaintest
