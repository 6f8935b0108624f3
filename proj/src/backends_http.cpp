#include "chaintest/backends.hpp"

#include <cstdlib>

// httplib pulls in a lot; keep it out of the headers.
#include <httplib.h>

namespace chaintest {

using json = nlohmann::ordered_json;

HttpModelClient::HttpModelClient(std::string endpointUrl, std::string modelName)
    : endpoint_(std::move(endpointUrl)), model_name_(std::move(modelName)) {}

Expected<std::string> HttpModelClient::complete(const std::string& system,
                                                const std::string& user, double temperature) {
    // Split "scheme://host:port/path" into origin and path.
    std::size_t schemeEnd = endpoint_.find("://");
    if (schemeEnd == std::string::npos)
        return BackendError{"invalid endpoint URL: " + endpoint_};
    std::size_t pathStart = endpoint_.find('/', schemeEnd + 3);
    std::string origin = pathStart == std::string::npos ? endpoint_ : endpoint_.substr(0, pathStart);
    std::string path = pathStart == std::string::npos ? "/" : endpoint_.substr(pathStart);

    json body;
    body["model"] = model_name_;
    body["messages"] = json::array({json{{"role", "system"}, {"content", system}},
                                    json{{"role", "user"}, {"content", user}}});
    body["temperature"] = temperature;

    httplib::Client client(origin);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (const char* key = std::getenv("CHAINTEST_API_KEY"))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    httplib::Result result = client.Post(path, headers, body.dump(), "application/json");
    if (!result)
        return BackendError{"model endpoint unreachable: " + httplib::to_string(result.error())};
    if (result->status != 200)
        return BackendError{"model endpoint returned status " + std::to_string(result->status)};

    try {
        json response = json::parse(result->body);
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        return BackendError{std::string("malformed model response: ") + e.what()};
    }
}

} // namespace chaintest
