// Internal line-based `key = value` reader shared by the scene and
// config parsers. Not part of the public headers.
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fdbeam/errors.hpp"

namespace fdbeam::kv {

struct Line {
  std::string key;
  std::vector<std::string> tokens;
  int number = 0;
};

[[noreturn]] inline void fail(const std::string& origin, int line,
                              const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<Line> read_lines(std::istream& in, const std::string& origin) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(origin, number, "expected 'key = value'");
    Line line;
    line.number = number;
    line.key = trim(text.substr(0, eq));
    std::istringstream vs(text.substr(eq + 1));
    std::string tok;
    while (vs >> tok) line.tokens.push_back(tok);
    if (line.key.empty()) fail(origin, number, "empty key");
    if (line.tokens.empty()) fail(origin, number, "empty value");
    lines.push_back(std::move(line));
  }
  return lines;
}

inline double parse_double(const std::string& tok, const std::string& origin, int line) {
  std::string t = tok;
  double sign = 1.0;
  if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
    if (t[0] == '-') sign = -1.0;
    t = t.substr(1);
  }
  if (t == "inf" || t == "infinity")
    return sign * std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail(origin, line, "expected a number, got '" + tok + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& tok, const std::string& origin,
                               int line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    fail(origin, line, "expected an unsigned integer, got '" + tok + "'");
  return v;
}

inline std::optional<std::size_t> parse_index(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

inline void expect_tokens(const Line& l, const std::string& origin, std::size_t n) {
  if (l.tokens.size() != n)
    fail(origin, l.number,
         "key '" + l.key + "' expects " + std::to_string(n) + " value(s), got " +
             std::to_string(l.tokens.size()));
}

inline std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

inline std::string fmt_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Parses "START:STEP:STOP" into its three numbers.
inline std::array<double, 3> parse_range_spec(const std::string& tok,
                                              const std::string& origin, int line) {
  const auto c1 = tok.find(':');
  const auto c2 = tok.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    fail(origin, line, "expected START:STEP:STOP, got '" + tok + "'");
  return {parse_double(tok.substr(0, c1), origin, line),
          parse_double(tok.substr(c1 + 1, c2 - c1 - 1), origin, line),
          parse_double(tok.substr(c2 + 1), origin, line)};
}

}  // namespace fdbeam::kv
