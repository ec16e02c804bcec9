#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chronoskill {

// Shortest decimal that round-trips the exact double (to_chars).
std::string fmt_double(double v);

double parse_double(std::string_view s, const std::string& context);
long long parse_int(std::string_view s, const std::string& context);
std::uint64_t parse_u64(std::string_view s, const std::string& context);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string join_ints(const std::vector<int>& v, char sep);
std::vector<int> parse_int_list(std::string_view s, const std::string& context);

}  // namespace chronoskill
