#pragma once

// CSV/JSON serialization and all-or-nothing file output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "landscape.hpp"
#include "model.hpp"
#include "phase_diagram.hpp"

namespace revanneal::io {

using json = nlohmann::json;

// Round-trip decimal form, 17 significant digits.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (k) text_ += ',';
      text_ += header[k];
    }
    text_ += '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) text_ += ',';
      text_ += format_real(v);
      first = false;
    }
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

inline std::string trajectory_csv(const Trajectory& traj) {
  if (traj.has_stderr()) {
    CsvWriter w({"t", "s", "lambda", "m_u", "m_d", "e", "stderr_m_u", "stderr_m_d"});
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
      const auto& s = traj.samples[k];
      w.row({s.t, s.s, s.lambda, s.m_u, s.m_d, s.e, traj.stderr_m_u[k], traj.stderr_m_d[k]});
    }
    return w.str();
  }
  CsvWriter w({"t", "s", "lambda", "m_u", "m_d", "e"});
  for (const auto& s : traj.samples) w.row({s.t, s.s, s.lambda, s.m_u, s.m_d, s.e});
  return w.str();
}

inline std::string landscape_csv(const LandscapeGrid& grid) {
  CsvWriter w({"m_u", "m_d", "phi"});
  for (std::size_t k = 0; k < grid.phi.size(); ++k) w.row({grid.m_u[k], grid.m_d[k], grid.phi[k]});
  return w.str();
}

inline std::string reduced_csv(const ReducedCurve& curve) {
  CsvWriter w({"m_d", "phi", "m_u_argmin"});
  for (std::size_t k = 0; k < curve.phi.size(); ++k) w.row({curve.m_d[k], curve.phi[k], curve.m_u_argmin[k]});
  return w.str();
}

// Reduced curves at several schedule points, stacked.
inline std::string reduced_path_csv(const std::vector<std::pair<SchedulePoint, ReducedCurve>>& curves) {
  CsvWriter w({"s", "lambda", "m_d", "phi", "m_u_argmin"});
  for (const auto& [pt, curve] : curves)
    for (std::size_t k = 0; k < curve.phi.size(); ++k)
      w.row({pt.s, pt.lambda, curve.m_d[k], curve.phi[k], curve.m_u_argmin[k]});
  return w.str();
}

inline std::string phase_grid_csv(const PhaseDiagram& diagram) {
  CsvWriter w({"s", "lambda", "m"});
  const std::size_t n = diagram.resolution();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) w.row({diagram.coordinate(i), diagram.coordinate(j), diagram.m({i, j})});
  return w.str();
}

inline std::string edge_csv(const PhaseDiagram& diagram, const std::vector<GridEdge>& edges) {
  CsvWriter w({"s1", "lambda1", "s2", "lambda2"});
  for (const auto& e : edges)
    w.row({diagram.coordinate(e.a.i_s), diagram.coordinate(e.a.i_lambda), diagram.coordinate(e.b.i_s),
           diagram.coordinate(e.b.i_lambda)});
  return w.str();
}

inline std::string tau_sweep_csv(const std::vector<std::pair<double, double>>& rows) {
  CsvWriter w({"tau", "delta_m"});
  for (const auto& [tau, dm] : rows) w.row({tau, dm});
  return w.str();
}

// JSON doubles use the shortest form that round-trips exactly.
inline std::string dump_json(const json& doc) {
  std::string out = doc.dump(2);
  out += '\n';
  return out;
}

// Collects output files in memory and writes them together: every file goes
// to a temporary sibling first and is renamed only after all writes succeed.
class OutputBatch {
 public:
  void add(std::filesystem::path path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }

  const std::vector<std::pair<std::filesystem::path, std::string>>& files() const { return files_; }

  void commit() const {
    std::vector<std::filesystem::path> temps;
    auto cleanup = [&] {
      std::error_code ec;
      for (const auto& t : temps) std::filesystem::remove(t, ec);
    };
    try {
      for (const auto& [path, content] : files_) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        auto tmp = path;
        tmp += ".partial";
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
      }
      for (std::size_t k = 0; k < files_.size(); ++k) std::filesystem::rename(temps[k], files_[k].first);
    } catch (...) {
      cleanup();
      throw;
    }
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

inline json to_json(const ModelParams& params) { return {{"p", params.p}, {"alpha", params.alpha}, {"x", params.x}}; }

inline json to_json(const SchedulePoint& pt) { return {{"s", pt.s}, {"lambda", pt.lambda}}; }

inline json to_json(const AnnealPath& path) {
  json j;
  j["tau"] = path.tau();
  if (path.kind() == PathKind::LinearSqrt) {
    j["kind"] = "linear-sqrt";
  } else {
    j["kind"] = "piecewise-linear";
    j["waypoints"] = json::array();
    for (const auto& w : path.waypoints()) j["waypoints"].push_back({w.s, w.lambda});
  }
  return j;
}

// {"kind": "linear-sqrt" | "piecewise-linear", "waypoints": [[s, lambda], ...], "tau": ...}
inline AnnealPath path_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double tau = j.at("tau").get<double>();
  if (kind == "linear-sqrt") return AnnealPath::linear_sqrt(tau);
  if (kind == "piecewise-linear") {
    std::vector<SchedulePoint> waypoints;
    for (const auto& w : j.at("waypoints")) {
      if (w.is_array()) {
        if (w.size() != 2) throw DomainError("waypoint must be [s, lambda]");
        waypoints.push_back({w[0].get<double>(), w[1].get<double>()});
      } else {
        waypoints.push_back({w.at("s").get<double>(), w.at("lambda").get<double>()});
      }
    }
    return AnnealPath::piecewise_linear(std::move(waypoints), tau);
  }
  throw DomainError("unknown path kind '" + kind + "'");
}

inline ModelParams params_from_json(const json& j) {
  return ModelParams(j.at("p").get<int>(), j.at("alpha").get<double>(), j.at("x").get<double>());
}

}  // namespace revanneal::io
