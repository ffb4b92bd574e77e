#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "app_config.hpp"

namespace ambigate {

// Exit codes shared by every subcommand: 0 non-ambiguous or success,
// 2 ambiguous, 3 uncertain, 1 operational error.
inline constexpr int kExitNonAmbiguous = 0;
inline constexpr int kExitOperationalError = 1;
inline constexpr int kExitAmbiguous = 2;
inline constexpr int kExitUncertain = 3;

int cmd_calibrate(const std::filesystem::path& dataset_path,
                  const std::filesystem::path& out_path,
                  const std::optional<std::filesystem::path>& cache_path, const AppConfig& config,
                  std::ostream& out, std::ostream& err);

int cmd_classify(const std::string& text, const std::optional<std::string>& context,
                 const AppConfig& config, std::ostream& out, std::ostream& err);

int cmd_evaluate(const std::filesystem::path& eval_path,
                 const std::optional<std::filesystem::path>& cache_path,
                 const std::optional<std::filesystem::path>& json_path, const AppConfig& config,
                 std::ostream& out, std::ostream& err);

int cmd_repl(const AppConfig& config, std::istream& in, std::ostream& out, std::ostream& err);

int cmd_serve(const AppConfig& config, const std::string& host, int port, std::ostream& out,
              std::ostream& err);

}  // namespace ambigate
