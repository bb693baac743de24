#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dld/descriptor.hpp"
#include "dld/grid_engine.hpp"
#include "dld/map_kernel.hpp"
#include "dld/singularity.hpp"

namespace dld {

enum class OutputFormat { Csv, Dldgrid, Pgm };

const char* to_string(OutputFormat format);
// Chosen from the file extension: .csv, .dldgrid or .pgm.
OutputFormat format_from_path(const std::filesystem::path& path);

struct OutputTarget {
  std::filesystem::path path;
  OutputFormat format = OutputFormat::Csv;
};

// Everything one CLI invocation needs. `field` and `oracle-check` runs carry a
// GridSpec (for oracle-check it is the sampling domain); `transect` runs carry
// a TransectSpec.
struct RunConfig {
  std::string command;
  KernelSpec kernel;
  DescriptorParams descriptor;
  std::optional<GridSpec> grid;
  std::optional<TransectSpec> transect;
  std::vector<OutputTarget> outputs;
  int workers = 1;
  double threshold_factor = 10.0;

  int oracle_points = 200;
  double oracle_tolerance = 1e-10;
  double corrupt_lambda = 0.0;  // test hook: perturbs the oracle's rate only

  void validate() const;
  nlohmann::json to_json() const;
  std::vector<std::string> describe() const;
};

// Defaults per command, including the Henon escape radius (50) and domain.
RunConfig default_run_config(const std::string& command, const std::string& map_name);

// Overlays the keys present in `j` onto `config`.
void apply_json(RunConfig& config, const nlohmann::json& j);

}  // namespace dld
