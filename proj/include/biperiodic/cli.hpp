#pragma once

// Batch front-end shared by the command-line tool and its tests.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace biperiodic::cli {

inline constexpr const char* tool_name = "biperiodic";
inline constexpr const char* tool_version = "0.1.0";

enum ExitCode { ok = 0, config_error = 2, numerical_failure = 3, hypothesis_warning = 4 };

const std::vector<std::string>& commands();

struct RunConfig {
    std::string command;
    nlohmann::json doc;  ///< effective configuration after overrides
    std::filesystem::path base_dir = ".";
    std::filesystem::path out_dir = "out";
    bool strict = false;
};

/// Parses the file, applies `key.path=value` overrides and fills defaults. Throws ConfigError.
RunConfig load_config(const std::string& command, const std::filesystem::path& path,
                      const std::vector<std::string>& overrides);
RunConfig make_config(const std::string& command, nlohmann::json doc, const std::vector<std::string>& overrides);

void apply_override(nlohmann::json& doc, const std::string& assignment);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

/// Runs the command, writes reports to out_dir and returns the exit code. Messages go to log.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace biperiodic::cli
