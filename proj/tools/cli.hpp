#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace bigset::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

/// Flat key = value settings. Keys are flag names without the leading dashes
/// and with '-' replaced by '_'.
using Settings = std::map<std::string, std::string>;

/// Reads a config or manifest file: one `key = value` per line, '#' starts a
/// comment. Throws DataError if unreadable, std::invalid_argument on a
/// malformed line.
Settings read_config(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Runs one command. `args` excludes the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bigset::cli
