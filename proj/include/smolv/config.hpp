#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "smolv/init.hpp"
#include "smolv/params.hpp"
#include "smolv/particles.hpp"

namespace smolv {

struct OutputSpec {
  double output_every = 0.1;
  /// Empty in a parsed config means {0, t_end}.
  std::vector<double> snapshot_times;
  std::string out_dir = "smolv_out";
};

/// Everything one run needs. `V_auto` records that the box half-width was
/// derived from kappa and alpha, so a sweep can re-derive it per kappa.
struct Config {
  Params params;
  InitSpec init;
  ParticleConfig particles;
  OutputSpec output;
  bool V_auto = true;
  bool dt_auto = true;
};

/// Parses the flat sectioned key-value format. Unknown sections or keys,
/// duplicates, malformed values and missing required keys are reported as
/// ConfigError with the line number and field name. The result is validated.
Config parse_config(const std::string& text);

Config load_config(const std::filesystem::path& path);

/// Serializes a config with every key resolved (17 significant digits), so
/// parsing the output reproduces the same Config bit-for-bit.
std::string render_config(const Config& config);

/// Cross-field checks shared by the parser and programmatic callers.
void validate_config(const Config& config);

/// Reference text listing every section, key and default.
std::string config_reference();

}  // namespace smolv
