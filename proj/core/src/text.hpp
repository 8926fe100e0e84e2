#pragma once

// Small CSV/number helpers shared by the readers and writers.

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace analogcast::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view line, char sep = ',');

/// Strict double parse; rejects trailing junk. Non-finite values parse
/// successfully (callers decide whether they are allowed).
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace analogcast::text
