#include "chaintest/orchestrator.hpp"

#include "chaintest/errors.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

namespace chaintest {

using json = nlohmann::ordered_json;

std::string_view to_string(TestStatus status) {
    switch (status) {
    case TestStatus::Untried: return "untried";
    case TestStatus::Passing: return "passing";
    case TestStatus::Failing: return "failing";
    case TestStatus::Unrepaired: return "unrepaired";
    }
    return "untried";
}

std::string_view to_string(StopReason reason) {
    return reason == StopReason::Stagnation ? "stagnation" : "max_iterations";
}

void SessionLog::record(std::string_view event, json payload) {
    json line;
    line["event"] = std::string(event);
    for (auto& [key, value] : payload.items())
        line[key] = value;
    events_.push_back(line);
    if (out_)
        *out_ << line.dump() << "\n";
}

TestCase make_scaffold(const TypeName& focalClass, const std::string& frameworkName) {
    bool junit5 = frameworkName.find('5') != std::string::npos;
    std::string pkg = package_name(focalClass);
    std::ostringstream src;
    if (!pkg.empty())
        src << "package " << pkg << ";\n\n";
    if (junit5) {
        src << "import org.junit.jupiter.api.Test;\n"
            << "import static org.junit.jupiter.api.Assertions.*;\n\n";
    } else {
        src << "import org.junit.Test;\n"
            << "import static org.junit.Assert.*;\n\n";
    }
    src << "public class " << outer_simple_name(focalClass) << "CatTest {\n"
        << "    @Test\n"
        << "    public void placeholder() {\n"
        << "        assertTrue(true);\n"
        << "    }\n"
        << "}\n";
    return TestCase{"placeholder", src.str(), TestStatus::Passing};
}

std::vector<TestCase> extract_test_code(const std::string& modelResponse) {
    std::vector<std::string> blocks;
    std::istringstream in(modelResponse);
    std::string line;
    std::string current;
    bool inside = false;
    while (std::getline(in, line)) {
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.rfind("```", 0) == 0) {
            if (inside) {
                blocks.push_back(current);
                current.clear();
            }
            inside = !inside;
            continue;
        }
        if (inside)
            current += line + "\n";
    }
    if (blocks.empty())
        throw NoCodeFoundError();

    static const std::regex testMethod(R"(@Test[\s\S]*?void\s+(\w+)\s*\()");
    std::vector<TestCase> tests;
    for (const std::string& block : blocks) {
        for (auto it = std::sregex_iterator(block.begin(), block.end(), testMethod);
             it != std::sregex_iterator(); ++it)
            tests.push_back(TestCase{(*it)[1].str(), block, TestStatus::Untried});
    }
    return tests;
}

namespace {

json coverage_json(const CoverageSnapshot& c) {
    return {{"line_covered", c.line_covered},
            {"line_total", c.line_total},
            {"branch_covered", c.branch_covered},
            {"branch_total", c.branch_total}};
}

json outcome_json(const RunOutcome& outcome) {
    json per = json::object();
    for (const auto& [name, verdict] : outcome.per_test)
        per[name] = verdict == TestVerdict::Pass ? "pass" : "fail";
    json failures = json::array();
    for (const FailureDigest& digest : outcome.failures) {
        json f;
        f["test_name"] = digest.test_name;
        f["error_line"] = digest.error_line ? json(*digest.error_line) : json(nullptr);
        f["reason"] = digest.reason;
        failures.push_back(std::move(f));
    }
    return {{"compiled", outcome.compiled},
            {"per_test", std::move(per)},
            {"failures", std::move(failures)},
            {"coverage", coverage_json(outcome.coverage)}};
}

// Attaches each failing test's current source to its digest so the fixing
// prompt can show the code being repaired.
std::vector<FailureDigest> digests_with_sources(const std::vector<FailureDigest>& digests,
                                                const std::vector<TestCase>& failing) {
    std::vector<FailureDigest> out = digests;
    for (FailureDigest& digest : out) {
        for (const TestCase& test : failing)
            if (test.name == digest.test_name) {
                digest.source = test.source;
                break;
            }
    }
    return out;
}

} // namespace

FixResult fix_loop(const std::vector<TestCase>& failures,
                   const std::vector<FailureDigest>& digests, const ContextBundle& bundle,
                   const std::vector<TestCase>& suite, const MethodRef& focal,
                   LanguageModelClient& model, TestRunner& runner, const SessionConfig& config,
                   SessionLog* log) {
    FixResult result;
    std::vector<TestCase> still = failures;
    std::vector<FailureDigest> current = digests_with_sources(digests, still);

    while (result.rounds_used < config.n_fix && !still.empty()) {
        PromptPair prompt = compose_fixing_prompt(current, bundle, config.limits);
        ++result.rounds_used;
        if (log)
            log->record("prompt", {{"kind", "fixing"},
                                   {"round", result.rounds_used},
                                   {"system", prompt.system},
                                   {"user", prompt.user}});
        Expected<std::string> completion =
            model.complete(prompt.system, prompt.user, config.temperature);
        if (!completion) {
            if (log)
                log->record("backend_error", {{"backend", "model"},
                                              {"message", completion.error().message}});
            break;
        }
        if (log)
            log->record("response", {{"kind", "fixing"}, {"text", completion.value()}});

        std::vector<TestCase> replacements;
        try {
            replacements = extract_test_code(completion.value());
        } catch (const NoCodeFoundError&) {
            // Nothing usable this round; re-running unchanged tests is
            // pointless but keeps round accounting simple and bounded.
        }
        for (TestCase& test : still) {
            for (const TestCase& patch : replacements)
                if (patch.name == test.name) {
                    test.source = patch.source;
                    break;
                }
        }

        Expected<RunOutcome> run = runner.run(suite, still, focal.owner);
        if (!run) {
            if (log)
                log->record("backend_error", {{"backend", "runner"},
                                              {"message", run.error().message}});
            break;
        }
        const RunOutcome& outcome = run.value();
        if (log)
            log->record("run", {{"kind", "fixing"},
                                {"round", result.rounds_used},
                                {"outcome", outcome_json(outcome)}});
        result.last_outcome = outcome;

        std::vector<TestCase> next;
        for (TestCase& test : still) {
            auto verdict = outcome.per_test.find(test.name);
            if (verdict != outcome.per_test.end() && verdict->second == TestVerdict::Pass) {
                test.status = TestStatus::Passing;
                result.repaired.push_back(test);
            } else {
                next.push_back(test);
            }
        }
        still = std::move(next);
        current = digests_with_sources(outcome.failures, still);
    }

    for (TestCase& test : still) {
        test.status = TestStatus::Unrepaired;
        result.unrepaired.push_back(test);
    }
    return result;
}

std::optional<StopReason> should_stop(const std::vector<IterationRecord>& history,
                                      const SessionConfig& config) {
    if (static_cast<int>(history.size()) >= config.n_gen)
        return StopReason::MaxIterations;
    if (static_cast<int>(history.size()) >= config.m) {
        bool stagnant = true;
        for (std::size_t i = history.size() - static_cast<std::size_t>(config.m);
             i < history.size(); ++i)
            stagnant = stagnant && !history[i].improved;
        if (stagnant)
            return StopReason::Stagnation;
    }
    return std::nullopt;
}

SessionReport run_session(const SessionConfig& config, const AnalysisArtifacts& analysis,
                          const MethodRef& focal, LanguageModelClient& model, TestRunner& runner,
                          SessionLog* log) {
    if (config.m > config.n_gen || config.n_gen <= 0 || config.m <= 0 || config.n_fix < 0)
        throw std::invalid_argument("invalid session configuration: require 0 < m <= n_gen");

    SessionReport report;
    report.focal = focal;

    std::vector<TestCase> suite{make_scaffold(focal.owner, config.framework_name)};
    std::set<std::string> usedNames{suite.front().name};
    CoverageSnapshot previous;

    if (log)
        log->record("session_start", {{"focal", to_text(focal)},
                                      {"framework", config.framework_name},
                                      {"scaffold", suite.front().source}});

    PromptPair generationPrompt =
        compose_generation_prompt(analysis.bundle, focal, config.framework_name, config.limits);

    while (true) {
        IterationRecord record;
        record.index = static_cast<int>(report.iterations.size()) + 1;
        // Synthesized fallback outcome: nothing ran, coverage unchanged.
        record.outcome.coverage = previous;
        record.outcome.compiled = true;

        if (log)
            log->record("prompt", {{"kind", "generation"},
                                   {"iteration", record.index},
                                   {"system", generationPrompt.system},
                                   {"user", generationPrompt.user}});
        Expected<std::string> completion =
            model.complete(generationPrompt.system, generationPrompt.user, config.temperature);

        if (!completion) {
            if (log)
                log->record("backend_error", {{"backend", "model"},
                                              {"message", completion.error().message}});
        } else {
            if (log)
                log->record("response", {{"kind", "generation"}, {"text", completion.value()}});
            std::vector<TestCase> tests;
            try {
                tests = extract_test_code(completion.value());
            } catch (const NoCodeFoundError&) {
                if (log)
                    log->record("decision", {{"iteration", record.index},
                                             {"note", "no test code in response"}});
            }
            // Session-unique names: later duplicates get a numeric suffix.
            for (TestCase& test : tests) {
                std::string base = test.name;
                int n = 2;
                while (!usedNames.insert(test.name).second)
                    test.name = base + "_" + std::to_string(n++);
            }

            if (!tests.empty()) {
                Expected<RunOutcome> run = runner.run(suite, tests, focal.owner);
                if (!run) {
                    if (log)
                        log->record("backend_error", {{"backend", "runner"},
                                                      {"message", run.error().message}});
                    record.generated = tests;
                } else {
                    RunOutcome outcome = run.value();
                    if (log)
                        log->record("run", {{"kind", "generation"},
                                            {"iteration", record.index},
                                            {"outcome", outcome_json(outcome)}});
                    std::vector<TestCase> failing;
                    for (TestCase& test : tests) {
                        auto verdict = outcome.per_test.find(test.name);
                        bool passed = outcome.compiled && verdict != outcome.per_test.end() &&
                                      verdict->second == TestVerdict::Pass;
                        test.status = passed ? TestStatus::Passing : TestStatus::Failing;
                        if (!passed)
                            failing.push_back(test);
                    }
                    record.outcome = outcome;

                    std::vector<TestCase> repairedTests;
                    if (!failing.empty()) {
                        FixResult fixed = fix_loop(failing, outcome.failures, analysis.bundle,
                                                   suite, focal, model, runner, config, log);
                        record.fix_attempts_used = fixed.rounds_used;
                        if (fixed.last_outcome)
                            record.outcome = *fixed.last_outcome;
                        repairedTests = fixed.repaired;
                        for (TestCase& test : tests) {
                            for (const TestCase& repaired : fixed.repaired)
                                if (repaired.name == test.name) {
                                    test = repaired;
                                    break;
                                }
                            for (const TestCase& unrepaired : fixed.unrepaired)
                                if (unrepaired.name == test.name) {
                                    test = unrepaired;
                                    break;
                                }
                        }
                    }

                    std::vector<TestCase> retained;
                    for (const TestCase& test : tests)
                        if (test.status == TestStatus::Passing)
                            retained.push_back(test);
                    record.generated = tests;

                    if (!retained.empty()) {
                        suite.insert(suite.end(), retained.begin(), retained.end());
                        Expected<RunOutcome> confirm = runner.run(suite, {}, focal.owner);
                        if (confirm) {
                            record.outcome = confirm.value();
                            if (log)
                                log->record("run",
                                            {{"kind", "retention"},
                                             {"iteration", record.index},
                                             {"outcome", outcome_json(confirm.value())}});
                        } else if (log) {
                            log->record("backend_error",
                                        {{"backend", "runner"},
                                         {"message", confirm.error().message}});
                        }
                    }
                }
            }
        }

        record.improved = record.outcome.coverage.line_covered > previous.line_covered ||
                          record.outcome.coverage.branch_covered > previous.branch_covered;
        previous = record.outcome.coverage;
        report.iterations.push_back(record);
        if (log)
            log->record("decision", {{"iteration", record.index},
                                     {"improved", record.improved},
                                     {"coverage", coverage_json(previous)}});

        if (auto stop = should_stop(report.iterations, config)) {
            report.stop_reason = *stop;
            if (log)
                log->record("stop", {{"reason", std::string(to_string(*stop))}});
            break;
        }
    }

    report.final_suite = suite;
    report.final_coverage = previous;
    return report;
}

} // namespace chaintest
