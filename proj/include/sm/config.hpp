// Scenario configuration for the command-line front end.
//
// A config file is a flat list of `key = value` lines; `#` starts a comment.
// Settings are layered: defaults, then the preset, then file entries, then
// command-line overrides. Any unknown key or malformed value is rejected
// with a "source:line: message" diagnostic.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sm/harness.hpp"

namespace sm {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CliConfig {
    SweepConfig sweep;
    std::string preset;
    /// Empty means standard output.
    std::string output;
};

struct ConfigEntry {
    std::string key;
    std::string value;
    /// "file:line" or the command-line flag; prefixes diagnostics.
    std::string where;
};

const std::vector<std::string>& preset_names();

/// Scenario for a named figure preset. Throws ConfigError for unknown names.
SweepConfig preset_config(std::string_view name);

/// "start:step:stop" (inclusive), a comma-separated list, or one value.
std::vector<double> parse_snr_grid(std::string_view text);

/// "0" or "perfect", "snr" / "1/snr" / "variable", or a fixed variance.
CsirModel parse_csir(std::string_view text);

/// Comma-separated subset of ml, mm, mmw.
DecoderSet parse_decoders(std::string_view text);

std::vector<ConfigEntry> parse_config_text(std::string_view text, const std::string& source);
std::vector<ConfigEntry> read_config_file(const std::string& path);

/// Layers the preset, `file`, then `overrides`, and validates the result.
CliConfig build_config(const std::vector<ConfigEntry>& file, const std::vector<ConfigEntry>& overrides);

}  // namespace sm
