#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hslg {

struct ConfigEntry {
  std::string value;
  int line = 0;
};

// flat key = value text; '#' starts a comment; unknown keys throw ParseError
std::map<std::string, ConfigEntry> parse_config_text(const std::string& text);
std::map<std::string, ConfigEntry> parse_config_file(const std::string& path);

// keys accepted in config files (same names as the long flags, '-' spelled '_')
const std::vector<std::string>& config_keys();

// full front end; returns the process exit status (0 pass, 1 assertion failure, 2 usage)
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hslg
