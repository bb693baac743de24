#include "dld/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dld/errors.hpp"

namespace dld {

const char* to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Dldgrid: return "dldgrid";
    case OutputFormat::Pgm: return "pgm";
  }
  return "?";
}

OutputFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv") return OutputFormat::Csv;
  if (ext == ".dldgrid") return OutputFormat::Dldgrid;
  if (ext == ".pgm") return OutputFormat::Pgm;
  throw Error(ErrorCode::InvalidArgument,
              "cannot infer output format of '" + path.string() + "' (use .csv, .dldgrid or .pgm)");
}

RunConfig default_run_config(const std::string& command, const std::string& map_name) {
  RunConfig c;
  c.command = command;
  c.kernel.name = map_name;
  const bool henon = map_name == "henon";
  if (henon) {
    c.descriptor.p = 0.05;
    c.descriptor.N = 5;
    c.descriptor.escape_radius = 50.0;
  } else {
    c.descriptor.p = 0.5;
    c.descriptor.N = 20;
  }
  if (command == "field") {
    c.grid = henon ? GridSpec{-6.0, 6.0, -6.0, 6.0, 800, 800} : GridSpec{-0.5, 0.5, -0.5, 0.5, 201, 201};
  } else if (command == "transect") {
    c.transect = TransectSpec{{0.0, 0.25}, {1.0, 0.0}, 0.5, 401};
  } else if (command == "oracle-check") {
    c.grid = GridSpec{-1.0, 1.0, -1.0, 1.0, 2, 2};
  }
  return c;
}

namespace {

template <typename T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

std::vector<double> fixed_array(const nlohmann::json& j, const char* key, std::size_t n) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != n) {
    std::ostringstream os;
    os << "'" << key << "' needs " << n << " numbers";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  return v;
}

}  // namespace

void apply_json(RunConfig& config, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  try {
    take(j, "map", config.kernel.name);
    for (const char* key : {"lambda", "u2", "A", "B", "epsilon", "theta"}) {
      if (j.contains(key)) config.kernel.values[key] = j.at(key).get<double>();
    }
    take(j, "lambda_cycle", config.kernel.lambda_cycle);
    take(j, "p", config.descriptor.p);
    take(j, "N", config.descriptor.N);
    take(j, "n0", config.descriptor.n0);
    if (j.contains("escape_radius")) {
      if (j.at("escape_radius").is_null()) {
        config.descriptor.escape_radius.reset();
      } else {
        config.descriptor.escape_radius = j.at("escape_radius").get<double>();
      }
    }
    take(j, "workers", config.workers);
    take(j, "threshold", config.threshold_factor);
    take(j, "points", config.oracle_points);
    take(j, "tolerance", config.oracle_tolerance);

    if (config.grid) {
      if (j.contains("domain")) {
        const auto d = fixed_array(j, "domain", 4);
        config.grid->xmin = d[0];
        config.grid->xmax = d[1];
        config.grid->ymin = d[2];
        config.grid->ymax = d[3];
      }
      take(j, "nx", config.grid->nx);
      take(j, "ny", config.grid->ny);
    }
    if (config.transect) {
      if (j.contains("anchor")) {
        const auto a = fixed_array(j, "anchor", 2);
        config.transect->anchor = {a[0], a[1]};
      }
      if (j.contains("direction")) {
        const auto d = fixed_array(j, "direction", 2);
        config.transect->direction = normalized({d[0], d[1]});
      }
      take(j, "half_length", config.transect->half_length);
      take(j, "samples", config.transect->samples);
    }
    if (j.contains("out")) {
      std::vector<std::string> outs;
      if (j.at("out").is_string()) {
        outs.push_back(j.at("out").get<std::string>());
      } else {
        outs = j.at("out").get<std::vector<std::string>>();
      }
      config.outputs.clear();
      for (const auto& o : outs) config.outputs.push_back({o, format_from_path(o)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad config value: ") + e.what());
  }
}

void RunConfig::validate() const {
  const auto& names = kernel_names();
  if (std::find(names.begin(), names.end(), kernel.name) == names.end()) {
    std::ostringstream os;
    os << (kernel.name.empty() ? "no map given" : "unknown map '" + kernel.name + "'") << "; available:";
    for (const auto& n : names) os << ' ' << n;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  if (grid.has_value() == transect.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "a run needs exactly one of a grid or a transect");
  }
  descriptor.validate();
  if (grid) grid->validate();
  if (transect) transect->validate();
  if (workers < 1) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  if (!(threshold_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be > 0");
  if (oracle_points < 1) throw Error(ErrorCode::InvalidArgument, "points must be >= 1");
  if (!(oracle_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["map"] = kernel.name;
  for (const auto& [k, v] : kernel.values) j[k] = v;
  if (!kernel.lambda_cycle.empty()) j["lambda_cycle"] = kernel.lambda_cycle;
  j["p"] = descriptor.p;
  j["N"] = descriptor.N;
  j["n0"] = descriptor.n0;
  j["escape_radius"] = descriptor.escape_radius ? nlohmann::json(*descriptor.escape_radius) : nlohmann::json();
  if (grid) {
    j["domain"] = {grid->xmin, grid->xmax, grid->ymin, grid->ymax};
    j["nx"] = grid->nx;
    j["ny"] = grid->ny;
  }
  if (transect) {
    j["anchor"] = {transect->anchor.x, transect->anchor.y};
    j["direction"] = {transect->direction.x, transect->direction.y};
    j["half_length"] = transect->half_length;
    j["samples"] = transect->samples;
    j["threshold"] = threshold_factor;
  }
  j["workers"] = workers;
  std::vector<std::string> outs;
  for (const auto& o : outputs) outs.push_back(o.path.string());
  j["out"] = outs;
  return j;
}

std::vector<std::string> RunConfig::describe() const {
  std::vector<std::string> lines;
  lines.push_back("dld " + command);
  lines.push_back("config " + to_json().dump());
  return lines;
}

}  // namespace dld
