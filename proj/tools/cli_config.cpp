#include "cli_config.hpp"

#include <fstream>
#include <iterator>

#include "mvqc/error.hpp"

namespace mvqc::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

ConfigEntries parse_config_text(std::string_view text) {
  ConfigEntries entries;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::size_t line_start = pos;
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("config line needs key = value", line_start);
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("config line has an empty key", line_start);
    if (!value.empty() && value.front() == '"') {
      const std::size_t close = value.find('"', 1);
      if (close == std::string_view::npos) throw ParseError("unterminated quote", line_start + eq + 1);
      value = value.substr(1, close - 1);
    } else {
      // A '#' or ';' after whitespace starts a trailing comment.
      for (std::size_t i = 1; i < value.size(); ++i)
        if ((value[i] == '#' || value[i] == ';') && (value[i - 1] == ' ' || value[i - 1] == '\t')) {
          value = trim(value.substr(0, i));
          break;
        }
    }
    entries.emplace_back(std::string(key), std::string(value));
  }
  return entries;
}

ConfigEntries load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_config_text(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.offset());
  }
}

}  // namespace mvqc::cli
