#pragma once

// Flat "key = value" configuration files: one key per line, '#' starts a
// comment, lists are comma-separated.

#include "gmlab/common.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gmlab {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::filesystem::path& path);

/// "key=value" override; later assignments win.
void apply_assignment(KeyValues& kv, const std::string& assignment);

std::vector<std::string> split_list(const std::string& value);
double parse_double(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
std::vector<double> parse_double_list(const std::string& key, const std::string& value);
std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& value);

}  // namespace gmlab
