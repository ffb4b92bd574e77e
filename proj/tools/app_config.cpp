#include "app_config.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ambigate/errors.hpp"

namespace ambigate {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : j.items()) {
        if (allowed.count(item.key()) == 0) {
            throw ParseError("unknown config key '" + item.key() + "' in " + where, 0);
        }
    }
}

}  // namespace

AppConfig load_app_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open config file: " + path.string(), 0);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError("config file is not a JSON object: " + path.string(), 0);
    }
    reject_unknown_keys(j,
                        {"alpha", "beta", "calibration_path", "template_dir", "stub_mode",
                         "stub_seed", "backend"},
                        path.string());

    AppConfig config;
    try {
        if (j.contains("alpha")) config.conformal.alpha = j["alpha"].get<double>();
        if (j.contains("beta")) config.conformal.beta = j["beta"].get<double>();
        if (j.contains("calibration_path")) {
            config.calibration_path = j["calibration_path"].get<std::string>();
        }
        if (j.contains("template_dir")) config.template_dir = j["template_dir"].get<std::string>();
        if (j.contains("stub_mode")) config.stub_mode = j["stub_mode"].get<bool>();
        if (j.contains("stub_seed")) config.stub_seed = j["stub_seed"].get<std::uint64_t>();
        if (j.contains("backend")) {
            const json& b = j["backend"];
            if (!b.is_object()) {
                throw ParseError("config key 'backend' must be an object", 0);
            }
            reject_unknown_keys(
                b, {"base_url", "model_name", "api_key", "timeout_ms", "max_retries", "temperature"},
                path.string() + " backend");
            if (b.contains("base_url")) config.backend.base_url = b["base_url"].get<std::string>();
            if (b.contains("model_name")) {
                config.backend.model_name = b["model_name"].get<std::string>();
            }
            if (b.contains("api_key")) config.backend.api_key = b["api_key"].get<std::string>();
            if (b.contains("timeout_ms")) {
                config.backend.timeout = std::chrono::milliseconds(b["timeout_ms"].get<long>());
            }
            if (b.contains("max_retries")) config.backend.max_retries = b["max_retries"].get<int>();
            if (b.contains("temperature")) {
                config.backend.temperature = b["temperature"].get<double>();
            }
        }
    } catch (const json::exception& e) {
        throw ParseError("config file " + path.string() + ": " + e.what(), 0);
    }

    config.conformal.validate();
    config.backend.validate();
    return config;
}

void apply_env_overrides(AppConfig& config) {
    if (const char* key = std::getenv("AMBIGATE_API_KEY"); key != nullptr && *key != '\0') {
        config.backend.api_key = key;
    }
}

}  // namespace ambigate
