#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "rbmci/selection.hpp"

namespace rbmci {

/// Everything a CLI invocation can configure.
struct AppConfig {
  LoopConfig loop;
  std::size_t fci_cap = 50000;
  bool dump_determinants = false;
};

/// Sets one field by name. Keys mirror the LoopConfig / TrainConfig field
/// names (`max_iterations`, `prune_threshold`, `epochs`, `learning_rate`, ...);
/// `temperature` sets beta = 1 / temperature. Throws config_error on unknown
/// keys or unparsable values.
void apply_config_value(AppConfig& config, const std::string& key, const std::string& value);

/// Flat `key = value` text, one entry per line; `#` starts a comment.
void apply_config_text(AppConfig& config, std::istream& in);
void apply_config_file(AppConfig& config, const std::string& path);

}  // namespace rbmci
