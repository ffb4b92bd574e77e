#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "ambigate/domain.hpp"
#include "ambigate/evaluators.hpp"

namespace ambigate {

// Whole-process configuration. Flags override file values, which override
// these defaults; AMBIGATE_API_KEY overrides the file's api_key.
struct AppConfig {
    ConformalConfig conformal;
    BackendConfig backend{.base_url = "http://localhost:8000/v1",
                          .model_name = "local-model",
                          .api_key = std::nullopt};
    std::filesystem::path calibration_path = "calibration.json";
    std::filesystem::path template_dir = "data/templates";
    bool stub_mode = false;
    std::uint64_t stub_seed = 42;
};

// Parses the JSON config file. Unknown keys are rejected.
AppConfig load_app_config(const std::filesystem::path& path);

// Applies the AMBIGATE_API_KEY environment variable when set and non-empty.
void apply_env_overrides(AppConfig& config);

}  // namespace ambigate
