#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace asmc {

// Shortest decimal that parses back to the same double.
std::string format_double(double value);

// Strict parse of a whole field; throws ParseError otherwise.
double parse_double(std::string_view text);

std::string join_csv(const std::vector<std::string>& fields);
std::vector<std::string> split_csv(std::string_view line);

}  // namespace asmc
