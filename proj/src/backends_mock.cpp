#include "chaintest/backends.hpp"

#include "chaintest/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace chaintest {

using json = nlohmann::ordered_json;

namespace {

ScriptedTest parse_scripted_test(const json& obj, const std::string& path) {
    if (!obj.is_object())
        throw SchemaViolationError(path, "expected an object");
    ScriptedTest test;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (key == "fails")
            test.fails = it->get<int>();
        else if (key == "never_passes")
            test.never_passes = it->get<bool>();
        else if (key == "lines")
            test.lines = it->get<std::vector<int>>();
        else if (key == "branches")
            test.branches = it->get<std::vector<int>>();
        else if (key == "reason")
            test.reason = it->get<std::string>();
        else if (key == "error_line")
            test.error_line = it->get<int>();
        else
            throw SchemaViolationError(path, "unknown key '" + key + "'");
    }
    return test;
}

} // namespace

MockScript parse_mock_script(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw MalformedDocumentError(e.what());
    }
    if (!doc.is_object())
        throw SchemaViolationError("$", "mock script must be an object");

    MockScript script;
    if (auto model = doc.find("model"); model != doc.end()) {
        const json& responses = model->at("responses");
        for (std::size_t i = 0; i < responses.size(); ++i) {
            const json& entry = responses[i];
            ScriptedResponse response;
            if (entry.is_string()) {
                response.text = entry.get<std::string>();
            } else if (entry.is_object() && entry.contains("error")) {
                response.is_error = true;
                response.error_message = entry["error"].get<std::string>();
            } else {
                throw SchemaViolationError("model.responses[" + std::to_string(i) + "]",
                                           "expected a string or an {\"error\": ...} object");
            }
            script.responses.push_back(std::move(response));
        }
    }
    if (auto runner = doc.find("runner"); runner != doc.end()) {
        for (auto it = runner->begin(); it != runner->end(); ++it) {
            const std::string& key = it.key();
            if (key == "line_total")
                script.line_total = it->get<int>();
            else if (key == "branch_total")
                script.branch_total = it->get<int>();
            else if (key == "default")
                script.default_test = parse_scripted_test(*it, "runner.default");
            else if (key == "compile_fail_names")
                script.compile_fail_names = it->get<std::vector<std::string>>();
            else if (key == "tests") {
                for (auto test = it->begin(); test != it->end(); ++test)
                    script.tests[test.key()] =
                        parse_scripted_test(*test, "runner.tests." + test.key());
            } else {
                throw SchemaViolationError("runner", "unknown key '" + key + "'");
            }
        }
    }
    return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MalformedDocumentError("cannot read mock script: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_mock_script(text.str());
}

Expected<std::string> MockModel::complete(const std::string& system, const std::string& user,
                                          double temperature) {
    (void)system;
    (void)user;
    (void)temperature;
    if (responses_.empty())
        return BackendError{"mock model has no scripted responses"};
    const ScriptedResponse& response = responses_[calls_ % responses_.size()];
    ++calls_;
    if (response.is_error)
        return BackendError{response.error_message};
    return response.text;
}

RunOutcome evaluate_scripted_run(const MockScript& script, std::map<std::string, int>& runCounts,
                                 const std::vector<TestCase>& suite,
                                 const std::vector<TestCase>& candidates) {
    RunOutcome outcome;
    outcome.coverage.line_total = script.line_total;
    outcome.coverage.branch_total = script.branch_total;

    auto spec_for = [&](const std::string& name) -> const ScriptedTest& {
        auto it = script.tests.find(name);
        return it == script.tests.end() ? script.default_test : it->second;
    };

    for (const TestCase& candidate : candidates) {
        if (std::find(script.compile_fail_names.begin(), script.compile_fail_names.end(),
                      candidate.name) != script.compile_fail_names.end())
            outcome.compiled = false;
    }

    std::set<int> lines;
    std::set<int> branches;
    auto add_coverage = [&](const ScriptedTest& spec) {
        lines.insert(spec.lines.begin(), spec.lines.end());
        branches.insert(spec.branches.begin(), spec.branches.end());
    };

    // Retained suite tests always pass and keep contributing coverage.
    for (const TestCase& test : suite) {
        outcome.per_test[test.name] = TestVerdict::Pass;
        add_coverage(spec_for(test.name));
    }

    for (const TestCase& candidate : candidates) {
        const ScriptedTest& spec = spec_for(candidate.name);
        int count = ++runCounts[candidate.name];
        bool passed = outcome.compiled && !spec.never_passes && count > spec.fails;
        outcome.per_test[candidate.name] = passed ? TestVerdict::Pass : TestVerdict::Fail;
        if (passed) {
            add_coverage(spec);
        } else {
            std::string reason = outcome.compiled ? spec.reason : "compilation failed";
            outcome.failures.push_back(
                make_failure_digest(candidate.name, spec.error_line, reason, 500));
        }
    }

    outcome.coverage.line_covered = static_cast<int>(lines.size());
    outcome.coverage.branch_covered = static_cast<int>(branches.size());
    return outcome;
}

Expected<RunOutcome> MockRunner::run(const std::vector<TestCase>& suite,
                                     const std::vector<TestCase>& candidates,
                                     const TypeName& focalClass) {
    (void)focalClass;
    return evaluate_scripted_run(script_, runCounts_, suite, candidates);
}

} // namespace chaintest
