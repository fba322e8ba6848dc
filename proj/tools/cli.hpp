#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "antclust/evaluation.hpp"

namespace antclust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Bad command line or config file. Maps to exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Runs one subcommand. Results go to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

/// "A", "A..B", "A..B:STEP" or "A,B,C".
std::vector<std::size_t> parse_count_list(const std::string& text);

/// Flat "key = value" lines; '#' starts a comment. Duplicate keys are rejected.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

/// "item,label" CSV. Items must be 0..n-1, each exactly once.
LabelVector read_label_csv(const std::filesystem::path& path);
std::string format_label_csv(const LabelVector& labels);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace antclust::cli
