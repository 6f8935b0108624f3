#include "chaintest/backends.hpp"

#include <sstream>

#include <csignal>
#include <sys/wait.h>
#include <unistd.h>

namespace chaintest {

using json = nlohmann::ordered_json;

json runner_request_json(const std::vector<TestCase>& suite,
                         const std::vector<TestCase>& candidates, const TypeName& focalClass) {
    auto tests_json = [](const std::vector<TestCase>& tests) {
        json arr = json::array();
        for (const TestCase& test : tests)
            arr.push_back({{"name", test.name}, {"source", test.source}});
        return arr;
    };
    return {{"suite", tests_json(suite)},
            {"candidates", tests_json(candidates)},
            {"focal_class", focalClass}};
}

json runner_response_json(const RunOutcome& outcome) {
    json results = json::array();
    for (const auto& [name, verdict] : outcome.per_test) {
        json entry;
        entry["name"] = name;
        entry["status"] = verdict == TestVerdict::Pass ? "pass" : "fail";
        entry["error_line"] = nullptr;
        entry["reason"] = "";
        if (verdict == TestVerdict::Fail) {
            for (const FailureDigest& digest : outcome.failures)
                if (digest.test_name == name) {
                    entry["error_line"] = digest.error_line ? json(*digest.error_line) : json(nullptr);
                    entry["reason"] = digest.reason;
                    break;
                }
        }
        results.push_back(std::move(entry));
    }
    return {{"compiled", outcome.compiled},
            {"results", std::move(results)},
            {"coverage",
             {{"line_covered", outcome.coverage.line_covered},
              {"line_total", outcome.coverage.line_total},
              {"branch_covered", outcome.coverage.branch_covered},
              {"branch_total", outcome.coverage.branch_total}}}};
}

RunOutcome parse_runner_response(const std::string& text) {
    json doc = json::parse(text); // json::exception propagates to the caller
    RunOutcome outcome;
    outcome.compiled = doc.at("compiled").get<bool>();
    for (const json& entry : doc.at("results")) {
        std::string name = entry.at("name").get<std::string>();
        std::string status = entry.at("status").get<std::string>();
        bool passed = status == "pass";
        outcome.per_test[name] = passed ? TestVerdict::Pass : TestVerdict::Fail;
        if (!passed) {
            std::optional<int> line;
            if (entry.contains("error_line") && !entry["error_line"].is_null())
                line = entry["error_line"].get<int>();
            std::string reason;
            if (entry.contains("reason") && entry["reason"].is_string())
                reason = entry["reason"].get<std::string>();
            outcome.failures.push_back(make_failure_digest(name, line, reason, 500));
        }
    }
    const json& coverage = doc.at("coverage");
    outcome.coverage.line_covered = coverage.at("line_covered").get<int>();
    outcome.coverage.line_total = coverage.at("line_total").get<int>();
    outcome.coverage.branch_covered = coverage.at("branch_covered").get<int>();
    outcome.coverage.branch_total = coverage.at("branch_total").get<int>();
    return outcome;
}

void parse_runner_request(const std::string& text, std::vector<TestCase>& suite,
                          std::vector<TestCase>& candidates, TypeName& focalClass) {
    json doc = json::parse(text);
    auto read_tests = [](const json& arr) {
        std::vector<TestCase> tests;
        for (const json& entry : arr)
            tests.push_back(TestCase{entry.at("name").get<std::string>(),
                                     entry.at("source").get<std::string>(), TestStatus::Untried});
        return tests;
    };
    suite = read_tests(doc.at("suite"));
    candidates = read_tests(doc.at("candidates"));
    focalClass = doc.at("focal_class").get<std::string>();
}

namespace {

std::vector<std::string> split_command(const std::string& command) {
    std::vector<std::string> argv;
    std::istringstream in(command);
    std::string token;
    while (in >> token)
        argv.push_back(token);
    return argv;
}

} // namespace

Expected<RunOutcome> SubprocessRunner::run(const std::vector<TestCase>& suite,
                                           const std::vector<TestCase>& candidates,
                                           const TypeName& focalClass) {
    std::vector<std::string> argv = split_command(command_);
    if (argv.empty())
        return BackendError{"empty runner command"};

    // A child that exits without draining stdin must surface as a backend
    // error, not kill us with SIGPIPE mid-write.
    static const bool sigpipeIgnored = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)sigpipeIgnored;

    int inPipe[2];  // parent -> child stdin
    int outPipe[2]; // child stdout -> parent
    if (pipe(inPipe) != 0 || pipe(outPipe) != 0)
        return BackendError{"cannot create pipes for runner"};

    pid_t pid = fork();
    if (pid < 0)
        return BackendError{"cannot fork runner process"};

    if (pid == 0) {
        dup2(inPipe[0], STDIN_FILENO);
        dup2(outPipe[1], STDOUT_FILENO);
        close(inPipe[0]);
        close(inPipe[1]);
        close(outPipe[0]);
        close(outPipe[1]);
        std::vector<char*> cargv;
        for (std::string& arg : argv)
            cargv.push_back(arg.data());
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }

    close(inPipe[0]);
    close(outPipe[1]);

    std::string request = runner_request_json(suite, candidates, focalClass).dump();
    std::size_t written = 0;
    while (written < request.size()) {
        ssize_t n = write(inPipe[1], request.data() + written, request.size() - written);
        if (n <= 0)
            break;
        written += static_cast<std::size_t>(n);
    }
    close(inPipe[1]);

    std::string response;
    char buffer[4096];
    ssize_t n;
    while ((n = read(outPipe[0], buffer, sizeof buffer)) > 0)
        response.append(buffer, static_cast<std::size_t>(n));
    close(outPipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        return BackendError{"runner command failed: " + command_};

    try {
        return parse_runner_response(response);
    } catch (const json::exception& e) {
        return BackendError{std::string("malformed runner response: ") + e.what()};
    }
}

} // namespace chaintest
