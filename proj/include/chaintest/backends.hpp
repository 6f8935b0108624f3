#pragma once

#include "chaintest/orchestrator.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace chaintest {

/// One scripted model turn: either a completion text or a simulated backend
/// error.
struct ScriptedResponse {
    std::string text;
    bool is_error = false;
    std::string error_message;
};

/// Scripted behaviour of one test name under the mock runner. A test fails
/// its first `fails` runs and passes afterwards, unless `never_passes`.
/// `lines`/`branches` are the coverage units the test contributes once it
/// passes.
struct ScriptedTest {
    int fails = 0;
    bool never_passes = false;
    std::vector<int> lines;
    std::vector<int> branches;
    std::string reason = "assertion failed";
    std::optional<int> error_line;
};

/// Parsed --mock-script file: scripted model responses plus scripted runner
/// behaviour.
struct MockScript {
    std::vector<ScriptedResponse> responses;
    int line_total = 100;
    int branch_total = 40;
    ScriptedTest default_test;
    std::map<std::string, ScriptedTest> tests;
    /// Candidate names that make the whole batch fail to compile.
    std::vector<std::string> compile_fail_names;
};

/// Loads and validates a mock-script document. Throws SchemaViolationError /
/// MalformedDocumentError on bad input.
MockScript load_mock_script(const std::filesystem::path& path);
MockScript parse_mock_script(const std::string& text);

/// Deterministic scripted model: responses are served in order and repeat
/// from the start when exhausted.
class MockModel : public LanguageModelClient {
public:
    explicit MockModel(std::vector<ScriptedResponse> responses)
        : responses_(std::move(responses)) {}

    Expected<std::string> complete(const std::string& system, const std::string& user,
                                   double temperature) override;

    std::size_t calls() const { return calls_; }

private:
    std::vector<ScriptedResponse> responses_;
    std::size_t calls_ = 0;
};

/// Core of the scripted runner, shared by the in-process mock and the
/// out-of-process fake used to exercise the subprocess protocol: evaluates
/// one run given per-test cumulative run counts (updated in place).
RunOutcome evaluate_scripted_run(const MockScript& script,
                                 std::map<std::string, int>& runCounts,
                                 const std::vector<TestCase>& suite,
                                 const std::vector<TestCase>& candidates);

/// Deterministic scripted runner. Coverage is the union of the contributions
/// of all passing tests in the run, so retained coverage is monotone.
class MockRunner : public TestRunner {
public:
    explicit MockRunner(MockScript script) : script_(std::move(script)) {}

    Expected<RunOutcome> run(const std::vector<TestCase>& suite,
                             const std::vector<TestCase>& candidates,
                             const TypeName& focalClass) override;

private:
    MockScript script_;
    std::map<std::string, int> runCounts_;
};

/// Chat-completions HTTP client. Expects an endpoint URL like
/// `http://host:port/v1/chat/completions`; reads the API key, when the
/// service wants one, from the CHAINTEST_API_KEY environment variable.
class HttpModelClient : public LanguageModelClient {
public:
    explicit HttpModelClient(std::string endpointUrl, std::string modelName = "default");

    Expected<std::string> complete(const std::string& system, const std::string& user,
                                   double temperature) override;

private:
    std::string endpoint_;
    std::string model_name_;
};

/// External-command runner speaking the subprocess protocol: the request
/// document on the child's stdin, the response document on its stdout,
/// nonzero exit treated as a backend error. The command string is split on
/// whitespace; no shell quoting.
class SubprocessRunner : public TestRunner {
public:
    explicit SubprocessRunner(std::string command) : command_(std::move(command)) {}

    Expected<RunOutcome> run(const std::vector<TestCase>& suite,
                             const std::vector<TestCase>& candidates,
                             const TypeName& focalClass) override;

private:
    std::string command_;
};

/// Protocol documents, shared with the fake runner used in tests.
nlohmann::ordered_json runner_request_json(const std::vector<TestCase>& suite,
                                           const std::vector<TestCase>& candidates,
                                           const TypeName& focalClass);
nlohmann::ordered_json runner_response_json(const RunOutcome& outcome);
RunOutcome parse_runner_response(const std::string& text);
/// Parses a request document back into (suite, candidates, focal_class).
void parse_runner_request(const std::string& text, std::vector<TestCase>& suite,
                          std::vector<TestCase>& candidates, TypeName& focalClass);

} // namespace chaintest
