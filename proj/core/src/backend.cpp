#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ambigate/errors.hpp"
#include "ambigate/evaluators.hpp"

namespace ambigate {

namespace {

bool has_scheme(const std::string& url) {
    return url.rfind("http://", 0) == 0 || url.rfind("https://", 0) == 0;
}

}  // namespace

void BackendConfig::validate() const {
    if (!has_scheme(base_url)) {
        throw GateError("base_url must start with http:// or https://, got '" + base_url + "'");
    }
    if (trim_copy(model_name).empty()) {
        throw GateError("model_name must be non-empty");
    }
    if (timeout.count() <= 0) {
        throw GateError("timeout must be positive");
    }
    if (max_retries < 0) {
        throw GateError("max_retries must be >= 0");
    }
    if (temperature < 0.0) {
        throw GateError("temperature must be >= 0");
    }
}

HttpChatBackend::HttpChatBackend(BackendConfig config) : config_(std::move(config)) {
    config_.validate();
    const std::size_t scheme_end = config_.base_url.find("://") + 3;
    const std::size_t path_start = config_.base_url.find('/', scheme_end);
    if (path_start == std::string::npos) {
        origin_ = config_.base_url;
    } else {
        origin_ = config_.base_url.substr(0, path_start);
        path_prefix_ = config_.base_url.substr(path_start);
        while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
}

std::string HttpChatBackend::complete(const std::vector<ChatMessage>& messages) {
    nlohmann::json body;
    body["model"] = config_.model_name;
    body["messages"] = nlohmann::json::array();
    for (const auto& msg : messages) {
        body["messages"].push_back({{"role", msg.role}, {"content", msg.content}});
    }
    body["temperature"] = config_.temperature;

    // One client per call: httplib clients are not safe to share across the
    // concurrent ensemble threads.
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);

    httplib::Headers headers;
    if (config_.api_key && !config_.api_key->empty()) {
        headers.emplace("Authorization", "Bearer " + *config_.api_key);
    }

    const auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                                 "application/json");
    if (!res) {
        throw BackendUnavailable("cannot reach " + origin_ + ": " + httplib::to_string(res.error()));
    }
    if (res->status >= 500) {
        throw BackendUnavailable("backend returned HTTP " + std::to_string(res->status));
    }
    if (res->status < 200 || res->status >= 300) {
        throw GateError("backend rejected the request with HTTP " + std::to_string(res->status) +
                        ": " + res->body.substr(0, 200));
    }

    const auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) {
        throw GateError("backend response is not valid JSON");
    }
    try {
        return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw GateError("backend response lacks choices[0].message.content");
    }
}

}  // namespace ambigate
