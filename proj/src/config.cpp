#include "gmlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace gmlab {

namespace {

std::string trim(std::string s) {
  auto space = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), space));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), space).base(), s.end());
  return s;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ParseError("config line " + std::to_string(line_no) + ": empty key");
    }
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open config file " + path.string());
  }
  return parse_key_values(in);
}

void apply_assignment(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParseError("expected key=value, got '" + assignment + "'");
  }
  kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const std::string item = trim(value.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ParseError(key + ": expected a number, got '" + value + "'");
  }
  if (pos != value.size() || !std::isfinite(x)) {
    throw ParseError(key + ": expected a number, got '" + value + "'");
  }
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw ParseError(key + ": expected a nonnegative integer, got '" + value + "'");
  }
  if (pos != value.size() || value.find('-') != std::string::npos) {
    throw ParseError(key + ": expected a nonnegative integer, got '" + value + "'");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ParseError(key + ": expected a boolean, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(value)) out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
  return out;
}

}  // namespace gmlab
