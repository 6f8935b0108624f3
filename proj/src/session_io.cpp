#include "chaintest/session_io.hpp"

namespace chaintest {

using json = nlohmann::ordered_json;

namespace {

json coverage_json(const CoverageSnapshot& c) {
    return {{"line_covered", c.line_covered},
            {"line_total", c.line_total},
            {"branch_covered", c.branch_covered},
            {"branch_total", c.branch_total}};
}

json test_json(const TestCase& test) {
    return {{"name", test.name},
            {"status", std::string(to_string(test.status))},
            {"source", test.source}};
}

} // namespace

json report_json(const SessionReport& report) {
    json doc;
    doc["focal"] = to_text(report.focal);
    doc["stop_reason"] = std::string(to_string(report.stop_reason));

    json iterations = json::array();
    for (const IterationRecord& record : report.iterations) {
        json generated = json::array();
        for (const TestCase& test : record.generated)
            generated.push_back(test_json(test));

        json per = json::object();
        for (const auto& [name, verdict] : record.outcome.per_test)
            per[name] = verdict == TestVerdict::Pass ? "pass" : "fail";
        json failures = json::array();
        for (const FailureDigest& digest : record.outcome.failures) {
            failures.push_back({{"test_name", digest.test_name},
                                {"error_line",
                                 digest.error_line ? json(*digest.error_line) : json(nullptr)},
                                {"reason", digest.reason}});
        }

        iterations.push_back({{"index", record.index},
                              {"generated", std::move(generated)},
                              {"fix_attempts_used", record.fix_attempts_used},
                              {"outcome",
                               {{"compiled", record.outcome.compiled},
                                {"per_test", std::move(per)},
                                {"failures", std::move(failures)},
                                {"coverage", coverage_json(record.outcome.coverage)}}},
                              {"improved", record.improved}});
    }
    doc["iterations"] = std::move(iterations);

    json finalSuite = json::array();
    for (const TestCase& test : report.final_suite)
        finalSuite.push_back(test_json(test));
    doc["final_suite"] = std::move(finalSuite);
    doc["final_coverage"] = coverage_json(report.final_coverage);
    return doc;
}

std::string serialize_report(const SessionReport& report) {
    return report_json(report).dump(2) + "\n";
}

} // namespace chaintest
