// Out-of-process scripted runner used to exercise the subprocess protocol.
// Speaks the same request/response documents as any real runner command and
// evaluates them with the shared scripted-run core. Per-test run counts are
// persisted in a state file so retries behave like the in-process mock.

#include "chaintest/backends.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App app{"scripted runner for subprocess-protocol tests"};
    std::string scriptPath;
    std::string statePath;
    app.add_option("--script", scriptPath, "mock script file")->required();
    app.add_option("--state", statePath, "run-count state file")->required();
    CLI11_PARSE(app, argc, argv);

    std::ostringstream request;
    request << std::cin.rdbuf();

    try {
        chaintest::MockScript script = chaintest::load_mock_script(scriptPath);

        std::map<std::string, int> counts;
        if (std::ifstream state(statePath); state) {
            auto doc = nlohmann::ordered_json::parse(state);
            for (auto it = doc.begin(); it != doc.end(); ++it)
                counts[it.key()] = it->get<int>();
        }

        std::vector<chaintest::TestCase> suite;
        std::vector<chaintest::TestCase> candidates;
        chaintest::TypeName focalClass;
        chaintest::parse_runner_request(request.str(), suite, candidates, focalClass);

        chaintest::RunOutcome outcome =
            chaintest::evaluate_scripted_run(script, counts, suite, candidates);

        nlohmann::ordered_json state = nlohmann::ordered_json::object();
        for (const auto& [name, count] : counts)
            state[name] = count;
        std::ofstream(statePath, std::ios::binary) << state.dump();

        std::cout << chaintest::runner_response_json(outcome).dump() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "fake_runner: " << e.what() << "\n";
        return 1;
    }
}
