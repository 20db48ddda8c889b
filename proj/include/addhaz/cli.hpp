#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "addhaz/simulate.hpp"

namespace addhaz {

/// Parses a flat study config (see configs/*.conf) into generator and study options.
std::pair<SimStudyConfig, StudyOptions> parse_study_config(std::istream& in);
std::pair<SimStudyConfig, StudyOptions> load_study_config(const std::filesystem::path& path);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/**
 * Entry point of the `addhaz` tool. Subcommands: fit, path, cv, evaluate,
 * simulate, generate. Returns the process exit status.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace addhaz
