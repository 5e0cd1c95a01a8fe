#pragma once

#include <string>
#include <vector>

namespace amdcast {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double x);

/// Splits a simple (unquoted) CSV line.
std::vector<std::string> split_csv_line(const std::string& line);

/// Whole-file read; throws IoError when the file cannot be opened.
std::string read_file(const std::string& path);

/// Whole-file write; throws IoError on failure.
void write_file(const std::string& path, const std::string& content);

} // namespace amdcast
