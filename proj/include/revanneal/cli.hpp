#pragma once

// Command-line front end. Settings come from an optional JSON config file
// overlaid by command-line flags (either `--key value` or `key=value`), are
// validated as a whole, and only then drive a computation whose outputs are
// committed together.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynamics_ara.hpp"
#include "dynamics_sra.hpp"
#include "io.hpp"
#include "landscape.hpp"
#include "parallel.hpp"
#include "phase_diagram.hpp"

namespace revanneal::cli {

using json = nlohmann::json;

inline constexpr const char* kOutputDirEnv = "REVANNEAL_OUTPUT_DIR";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { Landscape, ReducedLandscape, PhaseDiagram, CheckPath, Evolve, TauSweep, OracleCompare };

inline const std::vector<std::pair<std::string, Command>>& command_names() {
  static const std::vector<std::pair<std::string, Command>> names = {
      {"landscape", Command::Landscape},     {"reduced-landscape", Command::ReducedLandscape},
      {"phase-diagram", Command::PhaseDiagram}, {"check-path", Command::CheckPath},
      {"evolve", Command::Evolve},           {"tau-sweep", Command::TauSweep},
      {"oracle-compare", Command::OracleCompare}};
  return names;
}

inline std::string command_name(Command c) {
  for (const auto& [name, cmd] : command_names())
    if (cmd == c) return name;
  return "?";
}

enum class Model { ARA, SRA };

// Fully validated settings for one run.
struct RunConfig {
  Command command = Command::Evolve;
  Model model = Model::ARA;
  ModelParams params;
  std::optional<double> beta;
  std::optional<SchedulePoint> point;
  std::optional<AnnealPath> path;
  std::vector<double> taus;
  std::size_t resolution = 0;
  std::size_t grid_n = kDefaultLandscapeGrid;
  std::size_t inner_grid = kDefaultInnerGrid;
  std::size_t samples = 21;
  double threshold = kDefaultTransitionThreshold;
  std::optional<double> dt;
  FieldEvaluation integrator = FieldEvaluation::StepStart;
  std::size_t sample_every = 1;
  std::size_t n_spins = 0;
  std::size_t n_runs = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::filesystem::path output_dir = ".";
  std::string prefix;

  LandscapeKind landscape_kind() const {
    if (model == Model::SRA) return LandscapeKind::sra();
    if (beta) return LandscapeKind::finite_temperature(*beta);
    return LandscapeKind::ara();
  }

  std::filesystem::path output(const std::string& suffix) const { return output_dir / (prefix + suffix); }
};

namespace detail {

inline double to_real(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    try {
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw UsageError("'" + key + "' must be a number");
}

inline long long to_integer(const json& v, const std::string& key) {
  const double d = to_real(v, key);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) throw UsageError("'" + key + "' must be an integer");
  return static_cast<long long>(d);
}

inline std::size_t to_count(const json& v, const std::string& key, std::size_t minimum) {
  const long long n = to_integer(v, key);
  if (n < static_cast<long long>(minimum))
    throw UsageError("'" + key + "' must be >= " + std::to_string(minimum));
  return static_cast<std::size_t>(n);
}

inline std::vector<double> to_real_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(to_real(e, key));
  } else if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(to_real(item, key));
  } else {
    out.push_back(to_real(v, key));
  }
  if (out.empty()) throw UsageError("'" + key + "' must not be empty");
  return out;
}

// "linear-sqrt" or waypoints "s,lambda;s,lambda;...".
inline json path_from_flag(const std::string& text) {
  if (text == "linear-sqrt") return {{"kind", "linear-sqrt"}};
  json waypoints = json::array();
  std::stringstream ss(text);
  std::string pair;
  while (std::getline(ss, pair, ';')) {
    const auto values = to_real_list(pair, "path");
    if (values.size() != 2) throw UsageError("path waypoints must be 's,lambda' pairs separated by ';'");
    waypoints.push_back({values[0], values[1]});
  }
  if (waypoints.size() < 2) throw UsageError("path needs 'linear-sqrt' or at least two waypoints");
  return {{"kind", "piecewise-linear"}, {"waypoints", waypoints}};
}

inline bool needs_point(Command c) { return c == Command::Landscape; }
inline bool needs_path(Command c) {
  return c == Command::CheckPath || c == Command::Evolve || c == Command::OracleCompare;
}

}  // namespace detail

// Builds a RunConfig from merged settings. Every failure is a usage error.
inline RunConfig build_config(Command command, const json& settings, const char* env_output_dir = nullptr) {
  using namespace detail;
  RunConfig cfg;
  cfg.command = command;
  cfg.prefix = command_name(command);
  auto has = [&](const char* key) { return settings.contains(key) && !settings.at(key).is_null(); };
  try {
    const std::string model = has("model") ? settings.at("model").get<std::string>() : "";
    if (model == "ARA" || model == "ara")
      cfg.model = Model::ARA;
    else if (model == "SRA" || model == "sra")
      cfg.model = Model::SRA;
    else if (model.empty())
      throw UsageError("missing required setting 'model' (ARA or SRA)");
    else
      throw UsageError("model must be ARA or SRA, got '" + model + "'");
    for (const char* key : {"p", "alpha", "x"})
      if (!has(key)) throw UsageError(std::string("missing required setting '") + key + "'");
    const long long p = to_integer(settings.at("p"), "p");
    cfg.params = ModelParams(static_cast<int>(p), to_real(settings.at("alpha"), "alpha"),
                             to_real(settings.at("x"), "x"));

    if (has("beta")) {
      if (cfg.model != Model::ARA) throw UsageError("'beta' only applies to the ARA landscape");
      if (command != Command::Landscape && command != Command::ReducedLandscape && command != Command::PhaseDiagram &&
          command != Command::CheckPath)
        throw UsageError("'beta' only applies to static commands");
      cfg.beta = to_real(settings.at("beta"), "beta");
      if (!(*cfg.beta > 0.0)) throw UsageError("'beta' must be > 0");
    }

    if (has("point")) {
      const auto& pt = settings.at("point");
      cfg.point = SchedulePoint{to_real(pt.at("s"), "s"), to_real(pt.at("lambda"), "lambda")};
    }
    if (has("s") || has("lambda")) {
      if (!has("s") || !has("lambda")) throw UsageError("a schedule point needs both 's' and 'lambda'");
      cfg.point = SchedulePoint{to_real(settings.at("s"), "s"), to_real(settings.at("lambda"), "lambda")};
    }
    if (cfg.point) cfg.point->validate();

    if (has("taus")) cfg.taus = to_real_list(settings.at("taus"), "taus");
    for (double tau : cfg.taus)
      if (!(tau > 0.0)) throw UsageError("every tau must be > 0");

    if (has("path")) {
      json path = settings.at("path");
      if (path.is_string()) path = path_from_flag(path.get<std::string>());
      if (has("tau")) path["tau"] = to_real(settings.at("tau"), "tau");
      if (!path.contains("tau")) {
        if (command == Command::TauSweep || command == Command::ReducedLandscape || command == Command::CheckPath)
          path["tau"] = 1.0;
        else
          throw UsageError("path needs a runtime 'tau'");
      }
      path["tau"] = to_real(path["tau"], "tau");
      cfg.path = io::path_from_json(path);
    }

    if (has("resolution")) cfg.resolution = to_count(settings.at("resolution"), "resolution", 2);
    if (has("grid_n")) cfg.grid_n = to_count(settings.at("grid_n"), "grid_n", 2);
    if (has("inner_grid")) cfg.inner_grid = to_count(settings.at("inner_grid"), "inner_grid", 2);
    if (has("samples")) cfg.samples = to_count(settings.at("samples"), "samples", 2);
    if (has("threshold")) {
      cfg.threshold = to_real(settings.at("threshold"), "threshold");
      if (!(cfg.threshold > 0.0)) throw UsageError("'threshold' must be > 0");
    }
    if (has("dt")) {
      cfg.dt = to_real(settings.at("dt"), "dt");
      if (!(*cfg.dt > 0.0)) throw UsageError("'dt' must be > 0");
    }
    if (has("integrator")) {
      const std::string mode = settings.at("integrator").get<std::string>();
      if (mode == "step-start")
        cfg.integrator = FieldEvaluation::StepStart;
      else if (mode == "midpoint")
        cfg.integrator = FieldEvaluation::Midpoint;
      else
        throw UsageError("integrator must be 'step-start' or 'midpoint'");
    }
    if (has("sample_every")) cfg.sample_every = to_count(settings.at("sample_every"), "sample_every", 1);
    if (has("N")) cfg.n_spins = to_count(settings.at("N"), "N", 1);
    if (has("n_runs")) cfg.n_runs = to_count(settings.at("n_runs"), "n_runs", 1);
    if (has("seed")) cfg.seed = static_cast<std::uint64_t>(to_count(settings.at("seed"), "seed", 0));
    if (has("threads")) cfg.threads = static_cast<unsigned>(to_count(settings.at("threads"), "threads", 0));
    if (has("prefix")) cfg.prefix = settings.at("prefix").get<std::string>();
    if (cfg.prefix.empty() || cfg.prefix.find('/') != std::string::npos)
      throw UsageError("'prefix' must be a plain file name stem");

    if (env_output_dir && *env_output_dir) cfg.output_dir = env_output_dir;
    if (has("output_dir")) cfg.output_dir = settings.at("output_dir").get<std::string>();
  } catch (const UsageError&) {
    throw;
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed setting: ") + e.what());
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }

  // Per-command requirements.
  if (detail::needs_point(command) && !cfg.point) throw UsageError("command needs a schedule point (s, lambda)");
  if (command == Command::ReducedLandscape && !cfg.point && !cfg.path)
    throw UsageError("reduced-landscape needs a schedule point or a path");
  if (detail::needs_path(command) && !cfg.path) throw UsageError("command needs a path");
  if (command == Command::TauSweep) {
    if (!cfg.path) throw UsageError("tau-sweep needs a path shape");
    if (cfg.taus.empty()) throw UsageError("tau-sweep needs a list of runtimes 'taus'");
  }
  if (command == Command::PhaseDiagram || command == Command::CheckPath) {
    if (cfg.resolution == 0) cfg.resolution = 201;
    if (cfg.resolution < 11) throw UsageError("'resolution' must be >= 11 for phase diagrams");
  }
  if (command == Command::ReducedLandscape && cfg.resolution == 0) cfg.resolution = 401;
  if (command == Command::OracleCompare) {
    if (cfg.n_spins == 0) throw UsageError("oracle-compare needs the system size 'N'");
    if (cfg.model == Model::SRA && cfg.n_spins < 10) throw UsageError("'N' must be >= 10 for SRA");
  }
  if (cfg.dt && cfg.path && *cfg.dt > cfg.path->tau()) throw UsageError("'dt' must not exceed tau");
  if (cfg.model == Model::SRA && cfg.dt && *cfg.dt > 1.0) throw UsageError("'dt' must be <= 1 for SRA");
  return cfg;
}

namespace detail {

inline AnnealPath with_tau(const AnnealPath& shape, double tau) {
  if (shape.kind() == PathKind::LinearSqrt) return AnnealPath::linear_sqrt(tau);
  return AnnealPath::piecewise_linear(shape.waypoints(), tau);
}

inline AraIntegratorConfig ara_config(const RunConfig& cfg, double tau) {
  AraIntegratorConfig out = AraIntegratorConfig::defaults_for(tau);
  if (cfg.dt) out.dt = *cfg.dt;
  out.fields = cfg.integrator;
  out.sampling_stride = cfg.sample_every;
  return out;
}

inline SraConfig sra_config(const RunConfig& cfg) {
  SraConfig out;
  if (cfg.dt) out.dt = *cfg.dt;
  out.sampling_stride = cfg.sample_every;
  return out;
}

inline Trajectory mean_field(const RunConfig& cfg, const AnnealPath& path) {
  if (cfg.model == Model::ARA) return ara_evolve(cfg.params, path, ara_config(cfg, path.tau()));
  return sra_evolve(cfg.params, path, sra_config(cfg));
}

inline std::string model_name(Model m) { return m == Model::ARA ? "ARA" : "SRA"; }

inline json header(const RunConfig& cfg) {
  json j;
  j["command"] = command_name(cfg.command);
  j["model"] = model_name(cfg.model);
  j["params"] = io::to_json(cfg.params);
  if (cfg.beta) j["beta"] = *cfg.beta;
  return j;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

struct RunResult {
  io::OutputBatch outputs;
  std::string summary;
};

// Performs the computation; nothing is written to disk.
inline RunResult compute(const RunConfig& cfg) {
  using detail::fmt;
  RunResult result;
  const std::string model = detail::model_name(cfg.model);
  switch (cfg.command) {
    case Command::Landscape: {
      const auto kind = cfg.landscape_kind();
      const auto grid = landscape_grid(cfg.params, *cfg.point, kind, cfg.grid_n);
      const auto minima = minimize_landscape(cfg.params, *cfg.point, kind, cfg.grid_n);
      json doc = detail::header(cfg);
      doc["point"] = io::to_json(*cfg.point);
      doc["global_minimum"] = {{"m_u", minima.m_star.m_u}, {"m_d", minima.m_star.m_d}, {"phi", minima.value}};
      doc["local_minima"] = json::array();
      for (const auto& m : minima.local_minima)
        doc["local_minima"].push_back({{"m_u", m.m.m_u}, {"m_d", m.m.m_d}, {"phi", m.value}});
      result.outputs.add(cfg.output(".csv"), io::landscape_csv(grid));
      result.outputs.add(cfg.output("_minima.json"), io::dump_json(doc));
      result.summary = to_string(kind.model) + " landscape: " + std::to_string(minima.local_minima.size()) +
                       " local minima, global at (" + fmt(minima.m_star.m_u) + ", " + fmt(minima.m_star.m_d) +
                       ") phi=" + fmt(minima.value);
      break;
    }
    case Command::ReducedLandscape: {
      const auto kind = cfg.landscape_kind();
      if (cfg.point) {
        const auto curve = reduced_landscape_curve(cfg.params, *cfg.point, kind, cfg.resolution, cfg.inner_grid);
        const auto mins = optimize::sequence_local_minima(curve.phi);
        result.outputs.add(cfg.output(".csv"), io::reduced_csv(curve));
        result.summary = to_string(kind.model) + " reduced landscape: " + std::to_string(mins.size()) +
                         " local minima in m_d";
      } else {
        std::vector<std::pair<SchedulePoint, ReducedCurve>> curves;
        for (std::size_t k = 0; k < cfg.samples; ++k) {
          const SchedulePoint pt = cfg.path->at_fraction(double(k) / double(cfg.samples - 1));
          curves.emplace_back(pt, reduced_landscape_curve(cfg.params, pt, kind, cfg.resolution, cfg.inner_grid));
        }
        std::size_t multi = 0;
        for (const auto& [pt, curve] : curves)
          if (optimize::sequence_local_minima(curve.phi).size() > 1) ++multi;
        result.outputs.add(cfg.output(".csv"), io::reduced_path_csv(curves));
        result.summary = to_string(kind.model) + " reduced landscape along path: " + std::to_string(curves.size()) +
                         " points, " + std::to_string(multi) + " with more than one minimum";
      }
      break;
    }
    case Command::PhaseDiagram:
    case Command::CheckPath: {
      const auto kind = cfg.landscape_kind();
      ScanOptions opts;
      opts.threshold = cfg.threshold;
      const auto diagram = scan_phase_diagram(cfg.params, kind, cfg.resolution, opts);
      json doc = detail::header(cfg);
      doc["resolution"] = cfg.resolution;
      doc["threshold"] = cfg.threshold;
      if (cfg.command == Command::PhaseDiagram) {
        const auto edges = diagram.transition_edges();
        const auto search = search_feasible_paths(diagram);
        doc["transition_edges"] = edges.size();
        doc["feasible_constant_lambda"] = search.feasible_lambdas;
        doc["three_stage_count"] = search.three_stage_count;
        doc["three_stage_example"] = search.three_stage ? io::to_json(*search.three_stage) : json(nullptr);
        doc["any_feasible"] = search.any_feasible();
        result.outputs.add(cfg.output("_grid.csv"), io::phase_grid_csv(diagram));
        result.outputs.add(cfg.output("_edges.csv"), io::edge_csv(diagram, edges));
        result.outputs.add(cfg.output("_summary.json"), io::dump_json(doc));
        std::string band = "none";
        if (!search.feasible_lambdas.empty())
          band = std::to_string(search.feasible_lambdas.size()) + " in [" + fmt(search.feasible_lambdas.front()) +
                 ", " + fmt(search.feasible_lambdas.back()) + "]";
        result.summary = to_string(kind.model) + " phase diagram " + std::to_string(cfg.resolution) + "x" +
                         std::to_string(cfg.resolution) + ": " + std::to_string(edges.size()) +
                         " transition edges; feasible constant-lambda paths: " + band +
                         "; feasible three-stage endpoints: " + std::to_string(search.three_stage_count);
      } else {
        const auto feas = path_is_feasible(diagram, *cfg.path);
        doc["path"] = io::to_json(*cfg.path);
        doc["feasible"] = feas.feasible;
        doc["crossings"] = json::array();
        for (const auto& e : feas.crossings)
          doc["crossings"].push_back({diagram.coordinate(e.a.i_s), diagram.coordinate(e.a.i_lambda),
                                      diagram.coordinate(e.b.i_s), diagram.coordinate(e.b.i_lambda)});
        result.outputs.add(cfg.output(".json"), io::dump_json(doc));
        result.summary = to_string(kind.model) + " path " + (feas.feasible ? "feasible" : "infeasible") + " (" +
                         std::to_string(feas.crossings.size()) + " transition crossings)";
      }
      break;
    }
    case Command::Evolve: {
      const auto traj = detail::mean_field(cfg, *cfg.path);
      const auto& last = traj.final_sample();
      result.outputs.add(cfg.output(".csv"), io::trajectory_csv(traj));
      result.summary = model + " evolve tau=" + fmt(cfg.path->tau()) + ": m_u=" + fmt(last.m_u) +
                       " m_d=" + fmt(last.m_d) + " delta_m=" + fmt(traj.final_delta_m(cfg.params));
      break;
    }
    case Command::TauSweep: {
      std::vector<std::pair<double, double>> rows(cfg.taus.size());
      parallel_for(cfg.taus.size(), [&](std::size_t k) {
        const auto traj = detail::mean_field(cfg, detail::with_tau(*cfg.path, cfg.taus[k]));
        rows[k] = {cfg.taus[k], traj.final_delta_m(cfg.params)};
      });
      result.outputs.add(cfg.output(".csv"), io::tau_sweep_csv(rows));
      std::string list;
      for (const auto& [tau, dm] : rows) list += (list.empty() ? "" : ", ") + fmt(tau) + ":" + fmt(dm);
      result.summary = model + " tau sweep delta_m {" + list + "}";
      break;
    }
    case Command::OracleCompare: {
      const auto& path = *cfg.path;
      Trajectory mf, finite;
      if (cfg.model == Model::ARA) {
        mf = detail::mean_field(cfg, path);
        finite = ara_exact_finite_N(cfg.params, path, cfg.n_spins, cfg.dt.value_or(1e-2));
      } else {
        mf = detail::mean_field(cfg, path);
        finite = sra_finite_N(cfg.params, path, cfg.n_spins, cfg.n_runs, cfg.seed, detail::sra_config(cfg));
      }
      const double rms = rms_difference_m_d(finite, mf);
      json doc = detail::header(cfg);
      doc["path"] = io::to_json(path);
      doc["N"] = cfg.n_spins;
      if (cfg.model == Model::SRA) {
        doc["n_runs"] = cfg.n_runs;
        doc["seed"] = cfg.seed;
      }
      doc["rms_m_d"] = rms;
      doc["final_m_d_mean_field"] = mf.final_sample().m_d;
      doc["final_m_d_finite_n"] = finite.final_sample().m_d;
      result.outputs.add(cfg.output("_mean_field.csv"), io::trajectory_csv(mf));
      result.outputs.add(cfg.output("_finite_n.csv"), io::trajectory_csv(finite));
      result.outputs.add(cfg.output(".json"), io::dump_json(doc));
      result.summary = model + " oracle N=" + std::to_string(cfg.n_spins) + ": RMS m_d deviation " + fmt(rms);
      break;
    }
  }
  return result;
}

inline json error_json(const std::string& kind, const std::string& message) {
  return {{"status", "error"}, {"kind", kind}, {"message", message}};
}

// Rewrites `key=value` tokens into `--key value` (underscores become dashes).
inline std::vector<std::string> normalize_args(int argc, const char* const* argv) {
  std::vector<std::string> out;
  for (int k = 1; k < argc; ++k) {
    std::string a = argv[k];
    const auto eq = a.find('=');
    if (a.rfind("-", 0) != 0 && eq != std::string::npos && eq > 0) {
      std::string key = a.substr(0, eq);
      for (auto& c : key)
        if (c == '_') c = '-';
      out.push_back("--" + key);
      out.push_back(a.substr(eq + 1));
    } else {
      out.push_back(a);
    }
  }
  return out;
}

// Entry point. Returns the process exit status.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Reverse-annealing landscapes, phase diagrams and dynamics"};
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "JSON config file; flags override its entries");

  // Flag name -> settings key. Values are kept as strings and converted during validation.
  struct Flag {
    const char* flag;
    const char* key;
    const char* help;
  };
  static const Flag flags[] = {
      {"--model", "model", "ARA or SRA"},
      {"--p", "p", "odd interaction order >= 3"},
      {"--alpha", "alpha", "marked-pattern weight in (0,1)"},
      {"--x", "x", "fraction of down spins in the marked state, in (0, 0.5]"},
      {"--beta", "beta", "inverse temperature for the finite-temperature ARA landscape"},
      {"--s", "s", "schedule point s"},
      {"--lambda", "lambda", "schedule point lambda"},
      {"--path", "path", "'linear-sqrt' or waypoints 's,lambda;s,lambda;...'"},
      {"--tau", "tau", "path runtime"},
      {"--taus", "taus", "comma-separated runtimes for tau-sweep"},
      {"--resolution", "resolution", "phase-diagram grid size per axis, or m_d samples for reduced-landscape"},
      {"--grid-n", "grid_n", "landscape grid size per axis"},
      {"--inner-grid", "inner_grid", "m_u samples for the reduced landscape"},
      {"--samples", "samples", "schedule points along a path for reduced-landscape"},
      {"--threshold", "threshold", "transition threshold on |delta m| between neighbours"},
      {"--dt", "dt", "timestep (ARA exact oracle: its own step)"},
      {"--integrator", "integrator", "ARA field evaluation: step-start or midpoint"},
      {"--sample-every", "sample_every", "record every k-th step"},
      {"--N", "N", "number of spins for oracle-compare"},
      {"--n-runs", "n_runs", "Monte Carlo runs for the SRA oracle"},
      {"--seed", "seed", "base seed; run r uses seed + r"},
      {"--threads", "threads", "maximum worker threads (0 = all cores)"},
      {"--output-dir", "output_dir", "output directory (default: $REVANNEAL_OUTPUT_DIR or .)"},
      {"--prefix", "prefix", "output file stem (default: command name)"},
  };
  std::vector<std::string> values(std::size(flags));
  std::vector<CLI::Option*> options;
  for (std::size_t k = 0; k < std::size(flags); ++k)
    options.push_back(app.add_option(flags[k].flag, values[k], flags[k].help));

  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, cmd] : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    subs.emplace_back(sub, cmd);
  }

  try {
    auto args = normalize_args(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()).dump() << '\n';
    return 2;
  }

  Command command = Command::Evolve;
  for (const auto& [sub, cmd] : subs)
    if (sub->parsed()) command = cmd;

  RunConfig cfg;
  try {
    json settings = json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw UsageError("cannot read config file '" + config_file + "'");
      try {
        settings = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError(std::string("config file is not valid JSON: ") + e.what());
      }
      if (!settings.is_object()) throw UsageError("config file must hold a JSON object");
      if (settings.contains("command") && settings["command"] != command_name(command))
        throw UsageError("config file is for command '" + settings["command"].get<std::string>() + "'");
    }
    for (std::size_t k = 0; k < std::size(flags); ++k) {
      if (options[k]->count() == 0) continue;
      settings[flags[k].key] = values[k];
    }
    cfg = build_config(command, settings, std::getenv(kOutputDirEnv));
  } catch (const UsageError& e) {
    err << error_json("usage", e.what()).dump() << '\n';
    return 2;
  }

  try {
    set_max_threads(cfg.threads);
    const RunResult result = compute(cfg);
    result.outputs.commit();
    out << result.summary << '\n';
    for (const auto& [path, content] : result.outputs.files()) out << "wrote " << path.string() << '\n';
    return 0;
  } catch (const DomainError& e) {
    err << error_json("domain", e.what()).dump() << '\n';
  } catch (const ResourceError& e) {
    err << error_json("resource", e.what()).dump() << '\n';
  } catch (const IntegratorError& e) {
    err << error_json("integrator", e.what()).dump() << '\n';
  } catch (const std::exception& e) {
    err << error_json("runtime", e.what()).dump() << '\n';
  }
  return 1;
}

}  // namespace revanneal::cli
