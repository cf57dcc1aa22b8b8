#pragma once

#include <istream>
#include <map>
#include <string>

namespace seirv::cli {

/// Reads `key = value` lines grouped under `[section]` headers. Keys before the first header
/// are global. `#` starts a comment. Returns "section.key" (or "key") -> value.
/// Throws ParseError on malformed lines and duplicate keys.
std::map<std::string, std::string> read_config(std::istream& in);
std::map<std::string, std::string> load_config(const std::string& path);

}  // namespace seirv::cli
