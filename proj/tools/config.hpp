#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twostage/sim.hpp"

namespace twostage::cli {

/// A configuration problem attributable to one key (empty for syntax errors
/// that precede the key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Keys accepted in config files and --set overrides.
const std::vector<std::string_view>& config_keys();

/// Parses flat `key = value` text (# comments, quoted or bare strings, bracketed
/// lists) over the defaults, then applies `key=value` overrides, then validates.
ExperimentConfig parse_config_text(std::string_view text,
                                   const std::vector<std::string>& overrides = {});

ExperimentConfig parse_config(const std::filesystem::path& path,
                              const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace twostage::cli
