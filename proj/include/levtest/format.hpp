#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace levtest {

/// Shortest decimal text that reads back to exactly `value`.
std::string format_double(double value);

/// Parses a full decimal number; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

/// Joins values with `sep` using format_double.
std::string join_numbers(const std::vector<double>& values, char sep = ';');

/// Splits on `sep`, trimming ASCII whitespace around each piece.
std::vector<std::string> split_trimmed(std::string_view text, char sep);

std::string_view trim(std::string_view text);

}  // namespace levtest
