#include "keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "pawsim/config.hpp"

namespace pawsim::kv {

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_identifier(std::string_view s)
{
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

// Drops a trailing comment, ignoring '#' inside a string.
std::string_view strip_comment(std::string_view line)
{
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

double parse_number(std::string_view s, int line)
{
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigParseError(line, "invalid value '" + std::string(s) + "'");
  }
  return v;
}

std::string parse_string(std::string_view s, int line)
{
  if (s.size() < 2 || s.back() != '"') {
    throw ConfigParseError(line, "unterminated string");
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '"') throw ConfigParseError(line, "unexpected quote in string");
    if (c == '\\') {
      if (i + 2 >= s.size()) throw ConfigParseError(line, "dangling escape");
      switch (s[++i]) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case '"': c = '"'; break;
        case '\\': c = '\\'; break;
        default: throw ConfigParseError(line, "unknown escape");
      }
    }
    out.push_back(c);
  }
  return out;
}

Value parse_value(std::string_view s, int line)
{
  if (s.empty()) throw ConfigParseError(line, "missing value");
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') return parse_string(s, line);
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigParseError(line, "unterminated array");
    std::vector<double> items;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const std::size_t comma = body.find(',');
      items.push_back(parse_number(body.substr(0, comma), line));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
    }
    return items;
  }
  return parse_number(s, line);
}

}  // namespace

Document parse(std::string_view text)
{
  Document doc;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    line = trim(strip_comment(line));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || !is_identifier(trim(line.substr(1, line.size() - 2)))) {
        throw ConfigParseError(line_no, "malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigParseError(line_no, "expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (!is_identifier(key)) {
      throw ConfigParseError(line_no, "invalid key '" + std::string(key) + "'");
    }
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (doc.contains(full)) {
      throw ConfigParseError(line_no, "duplicate key '" + full + "'");
    }
    doc.emplace(full, Entry{parse_value(trim(line.substr(eq + 1)), line_no), line_no});
  }
  return doc;
}

}  // namespace pawsim::kv
