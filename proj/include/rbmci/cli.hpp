#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbmci/config.hpp"

namespace rbmci {

enum class ExitCode : int {
  ok = 0,
  usage = 1,
  parse_failure = 2,
  unconverged = 3,
  config_failure = 4,
  file_failure = 5,
  refused = 6,
  failure = 7,
};

/// Inputs of one CLI invocation. Flags left unset fall back to the config
/// file, which falls back to built-in defaults.
struct RunManifest {
  std::string fcidump;
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> runs;  // analyze only
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<int> max_iterations;
  std::optional<double> prune_threshold;
  std::optional<double> stability_threshold;
  std::optional<double> temperature;
  std::optional<bool> reinit_weights;
  std::optional<std::size_t> fci_cap;
  std::optional<bool> dump_determinants;
};

/// Output directory when --out is absent: $RBMCI_OUTPUT_DIR, else "rbmci-out".
std::string default_output_dir();

AppConfig resolve_config(const RunManifest& manifest);

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_fci(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_cisd(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunManifest& manifest, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Decimal digits grouped by thousands, e.g. 1656369 -> "1,656,369".
std::string group_thousands(const std::string& digits);

}  // namespace rbmci
