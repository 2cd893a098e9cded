#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pawsim::kv {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Entry
{
  Value value;
  int line = 0;
};

/// Keys are "section.key", or "key" before the first section header.
using Document = std::map<std::string, Entry>;

/// Throws ConfigParseError.
Document parse(std::string_view text);

}  // namespace pawsim::kv
