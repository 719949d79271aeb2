#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mvqc::cli {

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// `key = value` lines; blank lines and lines starting with '#' or ';' are
/// ignored. Surrounding double quotes around values are stripped.
ConfigEntries parse_config_text(std::string_view text);

ConfigEntries load_config_file(const std::filesystem::path& path);

}  // namespace mvqc::cli
