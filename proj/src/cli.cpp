#include "dld/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

#include "dld/errors.hpp"
#include "dld/io.hpp"
#include "dld/oracles.hpp"

namespace dld::cli {

namespace {

// Raw flag values; only flags the user actually passed are merged into the
// RunConfig, so JSON config values survive unless overridden.
struct Flags {
  std::string config_path;
  std::string map;
  double lambda = 0, u2 = 0, A = 0, B = 0, epsilon = 0, theta = 0;
  std::vector<double> lambda_cycle;
  double p = 0;
  int N = 0;
  long long n0 = 0;
  double escape_radius = 0;
  bool no_escape = false;
  std::vector<double> domain;
  int nx = 0, ny = 0;
  std::vector<std::string> out;
  int workers = 1;
  std::vector<double> anchor, direction;
  double half_length = 0;
  int samples = 0;
  double threshold = 0;
  int points = 0;
  double tolerance = 0;
  double corrupt_lambda = 0;
  std::string seed;
};

struct Registered {
  CLI::App* app = nullptr;
  std::map<std::string, CLI::Option*> opts;
  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

Registered register_common(CLI::App* sub, Flags& f) {
  Registered r{sub, {}};
  auto& o = r.opts;
  o["config"] = sub->add_option("--config", f.config_path, "JSON run configuration");
  o["map"] = sub->add_option("--map", f.map, "map kernel name");
  o["lambda"] = sub->add_option("--lambda", f.lambda, "expansion rate (> 1)");
  o["u2"] = sub->add_option("--u2", f.u2, "normal-form quadratic coefficient");
  o["A"] = sub->add_option("--A", f.A, "Henon A");
  o["B"] = sub->add_option("--B", f.B, "Henon B");
  o["epsilon"] = sub->add_option("--epsilon", f.epsilon, "Henon nonautonomous amplitude");
  o["theta"] = sub->add_option("--theta", f.theta, "rotation angle (radians)");
  o["lambda-cycle"] = sub->add_option("--lambda-cycle", f.lambda_cycle,
                                      "periodic lambda_n values for nonautonomous-linear")
                          ->delimiter(',');
  o["p"] = sub->add_option("--p", f.p, "norm exponent");
  o["N"] = sub->add_option("--N", f.N, "half-orbit length");
  o["n0"] = sub->add_option("--n0", f.n0, "base time");
  o["escape-radius"] = sub->add_option("--escape-radius", f.escape_radius, "escape radius");
  o["no-escape"] = sub->add_flag("--no-escape", f.no_escape, "disable the escape radius");
  o["workers"] = sub->add_option("--workers", f.workers, "worker threads");
  o["seed"] = sub->add_option("--seed", f.seed, "not supported: all computations are deterministic")
                  ->expected(0, 1);
  return r;
}

void add_grid_flags(Registered& r, Flags& f) {
  r.opts["domain"] = r.app->add_option("--domain", f.domain, "xmin xmax ymin ymax")->expected(4);
  r.opts["nx"] = r.app->add_option("--nx", f.nx, "grid nodes along x");
  r.opts["ny"] = r.app->add_option("--ny", f.ny, "grid nodes along y");
}

void add_output_flags(Registered& r, Flags& f) {
  r.opts["out"] = r.app->add_option("--out", f.out, "output file(s); format from extension");
}

void add_transect_flags(Registered& r, Flags& f) {
  r.opts["anchor"] = r.app->add_option("--anchor", f.anchor, "transect centre x y")->expected(2);
  r.opts["direction"] = r.app->add_option("--direction", f.direction, "transect direction dx dy")->expected(2);
  r.opts["half-length"] = r.app->add_option("--half-length", f.half_length, "transect half length");
  r.opts["samples"] = r.app->add_option("--samples", f.samples, "transect samples (odd)");
  r.opts["threshold"] = r.app->add_option("--threshold", f.threshold, "spike factor over median |derivative|");
}

std::string peek_map(const Registered& r, const Flags& f, const nlohmann::json& j) {
  if (r.given("map")) return f.map;
  if (j.contains("map") && j.at("map").is_string()) return j.at("map").get<std::string>();
  return {};
}

RunConfig build_config(const std::string& command, const Registered& r, const Flags& f) {
  if (r.given("seed")) {
    throw Error(ErrorCode::InvalidArgument, "--seed is not accepted: no computation here is stochastic");
  }
  nlohmann::json j = nlohmann::json::object();
  if (r.given("config")) {
    std::ifstream is(f.config_path);
    if (!is) throw Error(ErrorCode::Io, "cannot open config '" + f.config_path + "'");
    try {
      j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
    }
  }

  RunConfig c = default_run_config(command, peek_map(r, f, j));
  apply_json(c, j);

  if (r.given("map")) c.kernel.name = f.map;
  auto set_value = [&](const char* flag, const char* key, double v) {
    if (r.given(flag)) c.kernel.values[key] = v;
  };
  set_value("lambda", "lambda", f.lambda);
  set_value("u2", "u2", f.u2);
  set_value("A", "A", f.A);
  set_value("B", "B", f.B);
  set_value("epsilon", "epsilon", f.epsilon);
  set_value("theta", "theta", f.theta);
  if (r.given("lambda-cycle")) c.kernel.lambda_cycle = f.lambda_cycle;
  if (r.given("p")) c.descriptor.p = f.p;
  if (r.given("N")) c.descriptor.N = f.N;
  if (r.given("n0")) c.descriptor.n0 = f.n0;
  if (r.given("escape-radius")) c.descriptor.escape_radius = f.escape_radius;
  if (r.given("no-escape")) c.descriptor.escape_radius.reset();
  if (r.given("workers")) c.workers = f.workers;
  if (c.grid) {
    if (r.given("domain")) *c.grid = GridSpec{f.domain[0], f.domain[1], f.domain[2], f.domain[3], c.grid->nx, c.grid->ny};
    if (r.given("nx")) c.grid->nx = f.nx;
    if (r.given("ny")) c.grid->ny = f.ny;
  }
  if (c.transect) {
    if (r.given("anchor")) c.transect->anchor = {f.anchor[0], f.anchor[1]};
    if (r.given("direction")) c.transect->direction = normalized({f.direction[0], f.direction[1]});
    if (r.given("half-length")) c.transect->half_length = f.half_length;
    if (r.given("samples")) c.transect->samples = f.samples;
  }
  if (r.given("threshold")) c.threshold_factor = f.threshold;
  if (r.given("points")) c.oracle_points = f.points;
  if (r.given("tolerance")) c.oracle_tolerance = f.tolerance;
  if (r.given("corrupt-lambda")) c.corrupt_lambda = f.corrupt_lambda;
  if (r.given("out")) {
    c.outputs.clear();
    for (const auto& o : f.out) c.outputs.push_back({o, format_from_path(o)});
  }
  c.validate();
  return c;
}

}  // namespace

int run_field(const RunConfig& config, std::ostream& out) {
  const auto kernel = make_kernel(config.kernel);
  const FieldResult field = evaluate_field(*kernel, *config.grid, config.descriptor, config.workers);
  const auto comments = config.describe();
  for (const auto& target : config.outputs) {
    switch (target.format) {
      case OutputFormat::Csv: io::write_field_csv(target.path, field, comments); break;
      case OutputFormat::Dldgrid: io::write_dldgrid(target.path, field); break;
      case OutputFormat::Pgm: io::write_pgm(target.path, field); break;
    }
    out << "wrote " << to_string(target.format) << ' ' << target.path.string() << '\n';
  }
  const FieldSummary s = summarize(field);
  out << std::setprecision(10) << "map=" << field.kernel_name << " nodes=" << field.values.size()
      << " min=" << s.min << " max=" << s.max << " median=" << s.median
      << " escape_fraction=" << s.escape_fraction << " wall_time=" << field.wall_time << "s\n";
  return kOk;
}

int run_transect(const RunConfig& config, std::ostream& out) {
  const auto kernel = make_kernel(config.kernel);
  DetectionOptions opts;
  opts.threshold_factor = config.threshold_factor;
  opts.workers = config.workers;
  const TransectReport report = scan_transect(*kernel, *config.transect, config.descriptor, opts);
  const auto comments = config.describe();
  for (const auto& target : config.outputs) {
    if (target.format != OutputFormat::Csv) {
      throw Error(ErrorCode::InvalidArgument, "transect output must be .csv: " + target.path.string());
    }
    io::write_transect_csv(target.path, report, comments);
    out << "wrote csv " << target.path.string() << '\n';
  }
  if (config.outputs.empty()) io::write_transect_csv(out, report, comments);
  out << std::setprecision(10) << "crossings=" << report.crossings.size() << '\n';
  for (const auto& c : report.crossings) {
    const MapPoint q = config.transect->point_at(c.position);
    out << "crossing position=" << c.position << " point=(" << q.x << ", " << q.y
        << ") derivative_magnitude=" << c.derivative_magnitude
        << " refinement_exponent=" << c.refinement_exponent << '\n';
  }
  return kOk;
}

int run_oracle_check(const RunConfig& config, std::ostream& out) {
  const DescriptorParams& dp = config.descriptor;
  if (dp.p > 1.0) throw Error(ErrorCode::InvalidArgument, "closed forms exist only for p <= 1");
  const auto kernel = make_kernel(config.kernel);
  const auto value = [&](const char* key, double fallback) {
    auto it = config.kernel.values.find(key);
    return it == config.kernel.values.end() ? fallback : it->second;
  };
  const double delta = config.corrupt_lambda;
  const std::string& name = config.kernel.name;

  std::function<double(MapPoint)> oracle;
  std::function<MapPoint(MapPoint)> admissible = [](MapPoint q) { return q; };
  if (name == "linear-saddle") {
    const double lambda = value("lambda", 1.1) + delta;
    oracle = [=](MapPoint q) { return md_linear_saddle(q.x, q.y, lambda, dp.p, dp.N); };
  } else if (name == "normal-form") {
    NormalFormParams nf{value("lambda", 1.1) + delta, value("u2", 0.0)};
    const double lambda = value("lambda", 1.1);
    oracle = [=](MapPoint q) { return md_normal_form(q.x, q.y, nf, dp.p, dp.N); };
    // Pull points with U(xi eta) <= 1 back to |u2 xi eta| = (lambda - 1) / 2.
    admissible = [=](MapPoint q) {
      const double s = nf.u2 * q.x * q.y;
      const double limit = 0.5 * (lambda - 1.0);
      if (std::fabs(s) <= limit) return q;
      const double k = std::sqrt(limit / std::fabs(s));
      return MapPoint{q.x * k, q.y * k};
    };
  } else if (name == "nonautonomous-linear") {
    std::vector<double> cycle = config.kernel.lambda_cycle;
    if (cycle.empty()) cycle.push_back(value("lambda", 1.1));
    for (double& l : cycle) l += delta;
    const LambdaSequence seq = LambdaSequence::periodic(cycle);
    oracle = [=](MapPoint q) { return md_nonautonomous_linear(q.x, q.y, seq, dp.p, dp.N, dp.n0); };
  } else {
    throw Error(ErrorCode::InvalidArgument, "no closed-form descriptor for map '" + name + "'");
  }

  const GridSpec& g = *config.grid;
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> ux(g.xmin, g.xmax);
  std::uniform_real_distribution<double> uy(g.ymin, g.ymax);
  double worst = 0.0;
  MapPoint worst_point;
  for (int k = 0; k < config.oracle_points; ++k) {
    const MapPoint q = admissible(MapPoint{ux(rng), uy(rng)});
    const double direct = md_point(*kernel, q, dp).md_total;
    const double closed = oracle(q);
    const double denom = std::max(std::fabs(closed), std::numeric_limits<double>::min());
    const double rel = direct == closed ? 0.0 : std::fabs(direct - closed) / denom;
    if (rel > worst || std::isnan(rel)) {
      worst = std::isnan(rel) ? std::numeric_limits<double>::infinity() : rel;
      worst_point = q;
    }
  }
  const bool ok = worst <= config.oracle_tolerance;
  out << std::setprecision(6) << "map=" << name << " points=" << config.oracle_points
      << " max_relative_error=" << worst << " at=(" << worst_point.x << ", " << worst_point.y
      << ") tolerance=" << config.oracle_tolerance << ' ' << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kOk : kFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete Lagrangian descriptor fields for two-dimensional maps", "dld"};
  app.require_subcommand(1);
  Flags f;

  auto* field_cmd = app.add_subcommand("field", "evaluate MD_p over a grid");
  Registered field_reg = register_common(field_cmd, f);
  add_grid_flags(field_reg, f);
  add_output_flags(field_reg, f);

  auto* transect_cmd = app.add_subcommand("transect", "scan MD_p along a line and detect manifold crossings");
  Registered transect_reg = register_common(transect_cmd, f);
  add_transect_flags(transect_reg, f);
  add_output_flags(transect_reg, f);

  auto* oracle_cmd = app.add_subcommand("oracle-check", "compare orbit sums with closed-form values");
  Registered oracle_reg = register_common(oracle_cmd, f);
  add_grid_flags(oracle_reg, f);
  oracle_reg.opts["points"] = oracle_cmd->add_option("--points", f.points, "number of sampled points");
  oracle_reg.opts["tolerance"] = oracle_cmd->add_option("--tolerance", f.tolerance, "max relative error");
  oracle_reg.opts["corrupt-lambda"] =
      oracle_cmd->add_option("--corrupt-lambda", f.corrupt_lambda, "test hook: offset the oracle's rate")
          ->group("");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("dld");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return kUsage;
  }

  RunConfig config;
  const Registered* reg = field_cmd->parsed() ? &field_reg : transect_cmd->parsed() ? &transect_reg : &oracle_reg;
  try {
    config = build_config(reg->app->get_name(), *reg, f);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (config.command == "field") return run_field(config, out);
    if (config.command == "transect") return run_transect(config, out);
    return run_oracle_check(config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const bool usage = e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::Io;
    return usage ? kUsage : kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace dld::cli
