// Copyright 2026 The dqw Authors
// SPDX-License-Identifier: Apache-2.0

#include "dqw/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "dqw/decomposition.hpp"
#include "dqw/dynamics.hpp"
#include "dqw/io.hpp"
#include "dqw/observables.hpp"
#include "dqw/search.hpp"

namespace dqw {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kExperiments = {"run", "spectrum", "sweep", "decompose", "search", "scaling", "baseline"};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config " + where + ": " + what);
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(where + "/" + key, "missing");
  if (!obj[key].is_number()) fail(where + "/" + key, "expected a number");
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

int int_or(const json& obj, const std::string& key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) fail(where + "/" + key, "expected an integer");
  return obj[key].get<int>();
}

bool bool_or(const json& obj, const std::string& key, bool fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) fail(where + "/" + key, "expected true or false");
  return obj[key].get<bool>();
}

std::vector<int> int_list(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_array() || obj[key].empty())
    fail(where + "/" + key, "expected a non-empty array of integers");
  std::vector<int> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number_integer()) fail(where + "/" + key, "expected integers");
    out.push_back(v.get<int>());
  }
  return out;
}

CouplingGraph parse_graph(const json& g, const fs::path& base_dir) {
  const std::string where = "/graph";
  try {
    if (g.is_string()) {
      const fs::path p = fs::path(g.get<std::string>()).is_absolute() ? fs::path(g.get<std::string>())
                                                                       : base_dir / g.get<std::string>();
      if (!fs::exists(p)) fail(where, "graph file '" + p.string() + "' does not exist");
      return read_graph_file(p.string());
    }
    if (!g.is_object()) fail(where, "expected an object or a file path");
    if (g.contains("file")) return parse_graph(g["file"], base_dir);
    if (g.contains("inline")) return read_graph(g["inline"].dump());
    if (!g.contains("type") || !g["type"].is_string()) fail(where + "/type", "expected chain|glued_trees|reduced_glued_trees");
    const std::string type = g["type"].get<std::string>();
    if (type == "chain") {
      const int n = int_or(g, "n_modes", 0, where);
      if (n < 1) fail(where + "/n_modes", "must be a positive integer");
      return build_chain(n, number_or(g, "onsite", 0.0, where), number_or(g, "coupling", 1.0, where));
    }
    if (type == "glued_trees" || type == "reduced_glued_trees") {
      const int depth = int_or(g, "depth", 0, where);
      if (depth < 1) fail(where + "/depth", "must be a positive integer");
      const double w = number_or(g, "edge_weight", kSearchEdgeWeight, where);
      return type == "glued_trees" ? build_glued_trees(depth, w) : build_reduced_glued_trees(depth, w);
    }
    fail(where + "/type", "unknown graph type '" + type + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

PumpSpec parse_pump(const json& p) {
  const std::string where = "/pump";
  if (!p.is_object()) fail(where, "expected an object");
  PumpSpec s;
  if (p.contains("drive_type")) {
    if (!p["drive_type"].is_string()) fail(where + "/drive_type", "expected lasing|squeezing");
    try {
      s.drive = drive_type_from_string(p["drive_type"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(where + "/drive_type", e.what());
    }
  }
  if (p.contains("profile")) s.profile = p["profile"];
  if (p.contains("omega_p")) {
    if (p["omega_p"].is_number()) {
      s.omega_p = p["omega_p"].get<double>();
    } else if (p["omega_p"].is_string()) {
      s.omega_p_rule = p["omega_p"].get<std::string>();
    } else {
      fail(where + "/omega_p", "expected a number or a rule string");
    }
  }
  if (p.contains("omega_p_rule")) {
    if (!p["omega_p_rule"].is_string()) fail(where + "/omega_p_rule", "expected a string");
    s.omega_p_rule = p["omega_p_rule"].get<std::string>();
  }
  if (s.omega_p && s.omega_p_rule) fail(where, "give either a numeric omega_p or an omega_p_rule, not both");
  if (s.omega_p_rule) {
    static const std::regex ok(R"(^(eigenmode:\d+|pair:\d+,\d+|mid-band)$)");
    if (!std::regex_match(*s.omega_p_rule, ok))
      fail(where + "/omega_p_rule", "unknown rule '" + *s.omega_p_rule + "' (eigenmode:k | pair:j,k | mid-band)");
  }
  s.gamma0 = number_or(p, "gamma0", 1.0, where);
  if (!(s.gamma0 >= 0.0)) fail(where + "/gamma0", "must be >= 0");
  return s;
}

TimeSpec parse_time(const json& t, bool required) {
  const std::string where = "/time";
  TimeSpec s;
  if (!t.is_object()) {
    if (required) fail(where, "missing");
    return s;
  }
  s.t_final = number_or(t, "t_final", 0.0, where);
  if (required && !(s.t_final > 0.0)) fail(where + "/t_final", "must be > 0");
  if (t.contains("dt")) {
    s.dt = get_number(t, "dt", where);
    if (!(*s.dt > 0.0)) fail(where + "/dt", "must be > 0");
    if (required && *s.dt >= s.t_final) fail(where + "/dt", "must be smaller than t_final");
  }
  s.record_every = int_or(t, "record_every", 1, where);
  if (s.record_every < 1) fail(where + "/record_every", "must be >= 1");
  if (t.contains("fit_window")) {
    const auto& w = t["fit_window"];
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number() ||
        !(w[0].get<double>() < w[1].get<double>()))
      fail(where + "/fit_window", "expected [t_begin, t_end] with t_begin < t_end");
    s.fit_window = std::make_pair(w[0].get<double>(), w[1].get<double>());
  }
  return s;
}

Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  fail(where, "expected a number or [re, im]");
}

int resolve_mode(const json& v, int n, const std::string& where) {
  if (v.is_string() && v.get<std::string>() == "center") return n / 2;
  if (v.is_number_integer()) {
    const int k = v.get<int>();
    if (k < 0 || k >= n) fail(where, "mode index out of range");
    return k;
  }
  fail(where, "expected \"center\", a mode index, or an explicit profile");
}

}  // namespace

double resolve_omega_p(const std::string& rule, const EigenSystem& eig) {
  const int n = eig.size();
  auto from_top = [&](int k) {
    if (k < 1 || k > n) throw ConfigError("omega_p rule '" + rule + "': eigenmode label out of range 1.." + std::to_string(n));
    return eig.frequencies[n - k];
  };
  std::smatch m;
  static const std::regex single(R"(^eigenmode:(\d+)$)"), pair(R"(^pair:(\d+),(\d+)$)");
  if (std::regex_match(rule, m, single)) return from_top(std::stoi(m[1]));
  if (std::regex_match(rule, m, pair)) return from_top(std::stoi(m[1])) + from_top(std::stoi(m[2]));
  if (rule == "mid-band")
    return n % 2 == 1 ? eig.frequencies[n / 2] : 0.5 * (eig.frequencies[n / 2 - 1] + eig.frequencies[n / 2]);
  try {
    std::size_t used = 0;
    const double v = std::stod(rule, &used);
    if (used == rule.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("omega_p rule '" + rule + "' is not recognised");
}

PumpConfig build_pump(const PumpSpec& spec, const CouplingGraph& graph, const EigenSystem& eig) {
  const int n = graph.n_modes();
  const std::string where = "/pump/profile";
  PumpConfig p;
  p.drive = spec.drive;
  p.amplitude_scale = spec.gamma0;
  p.pump_frequency = spec.omega_p ? *spec.omega_p : spec.omega_p_rule ? resolve_omega_p(*spec.omega_p_rule, eig) : 0.0;
  if (!spec.omega_p && !spec.omega_p_rule) fail("/pump/omega_p", "missing (number or rule)");
  const json& prof = spec.profile;
  if (prof.is_array()) {
    if (static_cast<int>(prof.size()) != n) fail(where, "length differs from the graph's n_modes");
    if (spec.drive == DriveType::Lasing) {
      p.lasing_profile.resize(n);
      for (int j = 0; j < n; ++j) p.lasing_profile[j] = parse_complex(prof[j], where + "/" + std::to_string(j));
    } else {
      p.squeezing_profile.resize(n, n);
      for (int j = 0; j < n; ++j) {
        if (!prof[j].is_array() || static_cast<int>(prof[j].size()) != n) fail(where + "/" + std::to_string(j), "expected a row of length n_modes");
        for (int k = 0; k < n; ++k)
          p.squeezing_profile(j, k) = parse_complex(prof[j][k], where + "/" + std::to_string(j) + "/" + std::to_string(k));
      }
    }
  } else {
    const int mode = resolve_mode(prof, n, where);
    const double wp = p.pump_frequency;
    p = spec.drive == DriveType::Lasing ? PumpConfig::lasing_on(n, mode, wp, spec.gamma0)
                                        : PumpConfig::squeezing_on(n, mode, wp, spec.gamma0);
  }
  try {
    p.validate();
  } catch (const ValidationError& e) {
    fail("/pump", e.what());
  }
  return p;
}

ExperimentConfig parse_experiment_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) fail("/", "top level must be an object");
  ExperimentConfig c;
  c.raw = doc;
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) fail("/experiment", "missing or not a string");
  c.experiment = doc["experiment"].get<std::string>();
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end())
    fail("/experiment", "unknown experiment '" + c.experiment + "'");

  const bool needs_graph = c.experiment == "run" || c.experiment == "spectrum" || c.experiment == "sweep" ||
                           c.experiment == "decompose";
  const bool needs_pump = c.experiment == "run" || c.experiment == "sweep" || c.experiment == "decompose";
  if (needs_graph) {
    if (!doc.contains("graph")) fail("/graph", "missing");
    c.graph = parse_graph(doc["graph"], base_dir);
  }
  if (needs_pump) {
    if (!doc.contains("pump")) fail("/pump", "missing");
    c.pump = parse_pump(doc["pump"]);
    if (c.experiment == "sweep") c.pump->omega_p = 0.0;  // replaced per sweep point
  }
  c.time = parse_time(doc.value("time", json()), needs_pump);
  if (doc.contains(c.experiment)) {
    c.section = doc[c.experiment];
    if (!c.section.is_object()) fail("/" + c.experiment, "expected an object");
  } else {
    c.section = json::object();
  }
  const std::string where = "/" + c.experiment;
  if (c.experiment == "sweep") {
    if (c.section.contains("omega_values")) {
      if (!c.section["omega_values"].is_array() || c.section["omega_values"].empty())
        fail(where + "/omega_values", "expected a non-empty array");
      for (const auto& v : c.section["omega_values"])
        if (!v.is_number()) fail(where + "/omega_values", "expected numbers");
    } else {
      get_number(c.section, "omega_min", where);
      get_number(c.section, "omega_max", where);
      if (int_or(c.section, "points", 0, where) < 1) fail(where + "/points", "must be a positive integer");
    }
  } else if (c.experiment == "search") {
    if (int_or(c.section, "depth", 3, where) < 1) fail(where + "/depth", "must be >= 1");
    if (number_or(c.section, "gamma0", 0.1, where) < 0.0) fail(where + "/gamma0", "must be >= 0");
    if (c.section.contains("dt") && !(get_number(c.section, "dt", where) > 0.0)) fail(where + "/dt", "must be > 0");
  } else if (c.experiment == "scaling") {
    for (int d : int_list(c.section, "depths", where))
      if (d < 1) fail(where + "/depths", "depths must be >= 1");
  } else if (c.experiment == "baseline") {
    for (int d : int_list(c.section, "depths", where))
      if (d < 1 || d > 9) fail(where + "/depths", "depths must be in 1..9");
    if (!(get_number(c.section, "t_final", where) > 0.0)) fail(where + "/t_final", "must be > 0");
    if (!(number_or(c.section, "dt", 0.05, where) > 0.0)) fail(where + "/dt", "must be > 0");
  }

  c.output_directory = fs::path("out") / c.experiment;
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    if (!o.is_object()) fail("/output", "expected an object");
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) fail("/output/directory", "expected a string");
      c.output_directory = o["directory"].get<std::string>();
    }
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config file '" + path.string() + "' cannot be read");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': malformed JSON at byte " + std::to_string(e.byte));
  }
  return parse_experiment_config(doc, path.parent_path());
}

namespace {

class Runner {
 public:
  Runner(const ExperimentConfig& c, const RunOptions& o, fs::path dir) : c_(c), o_(o), dir_(std::move(dir)) {}

  void run(json& result) {
    if (c_.experiment == "run") run_driven(result);
    else if (c_.experiment == "spectrum") run_spectrum(result);
    else if (c_.experiment == "sweep") run_sweep(result);
    else if (c_.experiment == "decompose") run_decompose(result);
    else if (c_.experiment == "search") run_search(result);
    else if (c_.experiment == "scaling") run_scaling(result);
    else run_baseline(result);
  }

  std::vector<fs::path> files;
  std::optional<double> resolved_omega_p;

 private:
  template <class Fn>
  void emit(const std::string& name, Fn&& fill) {
    std::ostringstream os;
    fill(os);
    write_text_file(dir_ / name, os.str());
    files.push_back(dir_ / name);
    if (!o_.quiet && o_.log) *o_.log << "wrote " << (dir_ / name).string() << '\n';
  }

  double dt_for(const CouplingGraph& g, std::optional<double> configured) const {
    if (o_.dt) return *o_.dt;
    if (configured) return *configured;
    return default_time_step(g);
  }

  std::pair<double, double> window() const {
    return c_.time.fit_window.value_or(std::make_pair(c_.time.t_final / 4.0, c_.time.t_final));
  }

  void run_driven(json& result) {
    const CouplingGraph& g = *c_.graph;
    const EigenSystem eig = diagonalize(g);
    const PumpConfig pump = build_pump(*c_.pump, g, eig);
    resolved_omega_p = pump.pump_frequency;
    const double dt = dt_for(g, c_.time.dt);
    const auto traj = evolve_driven(g, pump, c_.time.t_final, dt, std::nullopt, c_.time.record_every);
    emit("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj, &eig); });
    emit("spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, eig); });

    const auto total = total_series(traj);
    RMatrix totals(total.values.rows(), 2);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      totals(static_cast<Eigen::Index>(i), 0) = total.values(static_cast<Eigen::Index>(i), 0);
      totals(static_cast<Eigen::Index>(i), 1) = photon_numbers(traj.states[i], Basis::Eigen, &eig).sum();
    }
    emit("total.csv", [&](std::ostream& os) { write_series_csv(os, traj.times, totals, {"total_physical", "total_eigen"}); });

    result["dt"] = dt;
    result["final_total_photons"] = json_number(totals(totals.rows() - 1, 0));
    const auto [t0, t1] = window();
    result["fit_window"] = {t0, t1};
    auto try_fit = [&](const std::vector<double>& times, const RVector& v) -> json {
      try {
        return to_json(growth_exponent(times, v, t0, t1));
      } catch (const std::invalid_argument& e) {
        return {{"error", e.what()}};
      }
    };
    result["total_fit"] = try_fit(traj.times, totals.col(0));
    if (g.positions()) {
      const auto var = variance_series(traj, SeriesKind::Variance);
      const auto res = variance_series(traj, SeriesKind::VarianceRescaled);
      RMatrix v(var.values.rows(), 3);
      v.col(0) = var.values.col(0);
      v.col(1) = res.values.col(0);
      for (std::size_t i = 0; i < traj.states.size(); ++i)
        v(static_cast<Eigen::Index>(i), 2) = position_variance_central(traj.states[i], *g.positions());
      emit("variance.csv", [&](std::ostream& os) {
        write_series_csv(os, traj.times, v, {"variance", "variance_rescaled", "variance_central"});
      });
      result["variance_fit"] = try_fit(traj.times, v.col(0));
      result["variance_rescaled_fit"] = try_fit(traj.times, v.col(1));
    }
  }

  void run_spectrum(json& result) {
    const EigenSystem eig = diagonalize(*c_.graph);
    emit("spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, eig); });
    result["n_modes"] = eig.size();
    result["min_frequency"] = eig.frequencies.minCoeff();
    result["max_frequency"] = eig.frequencies.maxCoeff();
    result["diagonalization_error"] = eig.diagonalization_error(*c_.graph);
    if (c_.section.contains("chebyshev_depths")) {
      json reports = json::array();
      for (int d : int_list(c_.section, "chebyshev_depths", "/spectrum")) {
        const auto r = validate_chebyshev_mapping(d);
        reports.push_back({{"depth", d},
                           {"roots", r.roots},
                           {"best_scale", r.best_scale},
                           {"best_residual", r.best_residual},
                           {"matched", r.matched},
                           {"uniform_chain_residual", r.uniform_chain_residual}});
      }
      result["chebyshev"] = reports;
    }
  }

  std::vector<double> sweep_values() const {
    std::vector<double> w;
    if (c_.section.contains("omega_values")) {
      for (const auto& v : c_.section["omega_values"]) w.push_back(v.get<double>());
      return w;
    }
    const double lo = c_.section["omega_min"].get<double>(), hi = c_.section["omega_max"].get<double>();
    const int n = c_.section["points"].get<int>();
    for (int i = 0; i < n; ++i) w.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return w;
  }

  void run_sweep(json& result) {
    const CouplingGraph& g = *c_.graph;
    const EigenSystem eig = diagonalize(g);
    const PumpConfig tmpl = build_pump(*c_.pump, g, eig);
    const auto omegas = sweep_values();
    const double dt = dt_for(g, c_.time.dt);
    const RMatrix photons = frequency_sweep(g, tmpl, omegas, c_.time.t_final, dt, o_.threads);
    emit("sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, omegas, photons); });
    json rows = json::array();
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      Eigen::Index arg = 0;
      photons.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
      rows.push_back({{"omega_p", omegas[i]},
                      {"participation_ratio", participation_ratio(photons.row(static_cast<Eigen::Index>(i)).transpose())},
                      {"argmax_mode", arg},
                      {"total", photons.row(static_cast<Eigen::Index>(i)).sum()}});
    }
    result["dt"] = dt;
    result["rows"] = rows;
  }

  void run_decompose(json& result) {
    const CouplingGraph& g = *c_.graph;
    const EigenSystem eig = diagonalize(g);
    PumpConfig pump = build_pump(*c_.pump, g, eig);
    resolved_omega_p = pump.pump_frequency;
    const double dt = dt_for(g, c_.time.dt);
    std::vector<double> gammas{pump.amplitude_scale};
    if (c_.section.contains("gamma0_values")) {
      gammas.clear();
      for (const auto& v : c_.section["gamma0_values"]) {
        if (!v.is_number() || v.get<double>() < 0.0) fail("/decompose/gamma0_values", "expected non-negative numbers");
        gammas.push_back(v.get<double>());
      }
    }
    json reports = json::array();
    for (double g0 : gammas) {
      pump.amplitude_scale = g0;
      reports.push_back(to_json(decomposition_error(g, pump, c_.time.t_final, dt)));
    }
    result["reports"] = reports;
    emit("decomposition.json", [&](std::ostream& os) { os << reports.dump(2) << '\n'; });
  }

  void run_search(json& result) {
    const json& s = c_.section;
    SearchSpec spec;
    spec.depth = int_or(s, "depth", 3, "/search");
    spec.gamma0 = number_or(s, "gamma0", 0.1, "/search");
    spec.t_final = number_or(s, "t_final", 0.0, "/search");
    spec.use_reduced_chain = bool_or(s, "use_reduced_chain", true, "/search");
    spec.edge_weight = number_or(s, "edge_weight", kSearchEdgeWeight, "/search");
    spec.record_every = int_or(s, "record_every", 1, "/search");
    if (o_.dt) spec.dt = *o_.dt;
    else if (s.contains("dt")) spec.dt = s["dt"].get<double>();
    const SearchResult r = run_driven_search(spec);
    resolved_omega_p = r.target.frequency;
    result["search"] = to_json(r);
    emit("search.json", [&](std::ostream& os) { os << to_json(r).dump(2) << '\n'; });
    RMatrix series(r.series.values.rows(), 4);
    series.leftCols(3) = r.series.values;
    for (std::size_t i = 0; i < r.exit_rank_over_time.size(); ++i)
      series(static_cast<Eigen::Index>(i), 3) = r.exit_rank_over_time[i];
    emit("search_series.csv", [&](std::ostream& os) {
      write_series_csv(os, r.series.times, series, {"entrance", "exit", "max_other", "exit_rank"});
    });

    const double pt = number_or(s, "passive_t_final", 3.0 * r.t_final, "/search");
    const double pdt = number_or(s, "passive_dt", 0.01, "/search");
    const auto po = passive_oscillation(spec.depth, pt, pdt, spec.use_reduced_chain, spec.edge_weight);
    RMatrix pv(po.entrance_probability.size(), 3);
    pv << po.entrance_probability, po.exit_probability, po.total_probability;
    emit("passive.csv", [&](std::ostream& os) { write_series_csv(os, po.times, pv, {"entrance", "exit", "total"}); });
    result["passive_exit_local_maxima"] = count_local_maxima(po.exit_probability);
  }

  void run_scaling(json& result) {
    const json& s = c_.section;
    const auto depths = int_list(s, "depths", "/scaling");
    const bool reduced = bool_or(s, "use_reduced_chain", true, "/scaling");
    const double w = number_or(s, "edge_weight", kSearchEdgeWeight, "/scaling");
    const ScalingStudy study = weight_scaling_study(depths, reduced, w, o_.threads);
    emit("scaling.csv", [&](std::ostream& os) { write_scaling_csv(os, study); });
    json record = to_json(study);
    if (s.contains("validate_full_depths")) {
      const auto full_depths = int_list(s, "validate_full_depths", "/scaling");
      const ScalingStudy full = weight_scaling_study(full_depths, false, w, o_.threads);
      const ScalingStudy red = weight_scaling_study(full_depths, true, w, o_.threads);
      json checks = json::array();
      for (std::size_t i = 0; i < full_depths.size(); ++i)
        checks.push_back({{"depth", full_depths[i]},
                          {"full_weight", full.points[i].weight},
                          {"reduced_weight", red.points[i].weight},
                          {"difference", std::abs(full.points[i].weight - red.points[i].weight)}});
      record["full_graph_validation"] = checks;
    }
    result["scaling"] = record;
    emit("scaling.json", [&](std::ostream& os) { os << record.dump(2) << '\n'; });
  }

  void run_baseline(json& result) {
    const json& s = c_.section;
    const auto depths = int_list(s, "depths", "/baseline");
    const double t_final = s["t_final"].get<double>();
    const double dt = number_or(s, "dt", 0.05, "/baseline");
    const bool compare = bool_or(s, "compare_search", false, "/baseline");
    json rows = json::array();
    std::vector<double> times;
    RMatrix exit_series;
    std::vector<std::string> columns;
    for (std::size_t i = 0; i < depths.size(); ++i) {
      const auto w = classical_hitting_baseline(depths[i], t_final, dt);
      if (i == 0) {
        times = w.times;
        exit_series.resize(w.exit_occupation.size(), static_cast<Eigen::Index>(depths.size()));
      }
      exit_series.col(static_cast<Eigen::Index>(i)) = w.exit_occupation;
      columns.push_back("exit_depth_" + std::to_string(depths[i]));
      json row = {{"depth", depths[i]},
                  {"stationary_exit", w.stationary_exit},
                  {"half_stationary_time", json_number(w.half_stationary_time)}};
      if (compare) {
        SearchSpec spec;
        spec.depth = depths[i];
        if (o_.dt) spec.dt = *o_.dt;
        const auto r = run_driven_search(spec);
        row["search_rank1_threshold_time"] = json_number(r.rank1_threshold_time);
        row["ratio"] = json_number(w.half_stationary_time / r.rank1_threshold_time);
      }
      rows.push_back(row);
    }
    emit("baseline.csv", [&](std::ostream& os) { write_series_csv(os, times, exit_series, columns); });
    result["rows"] = rows;
  }

  const ExperimentConfig& c_;
  const RunOptions& o_;
  fs::path dir_;
};

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = options.out_dir.value_or(config.output_directory);
  ExperimentOutcome out;
  Runner runner(config, options, dir);
  json result = json::object();
  try {
    if (options.dt && !(*options.dt > 0.0)) throw ConfigError("--dt must be > 0");
    if (options.threads < 1) throw ConfigError("--threads must be >= 1");
    runner.run(result);
  } catch (const IoError& e) {
    out = {kExitIo, "io_error", e.what(), {}, {}};
  } catch (const fs::filesystem_error& e) {
    out = {kExitIo, "io_error", e.what(), {}, {}};
  } catch (const NumericalError& e) {
    out = {kExitNumerical, "numerical_instability", std::string(e.what()) + " (try a smaller dt)", {}, {}};
  } catch (const std::invalid_argument& e) {
    out = {kExitValidation, "validation_error", e.what(), {}, {}};
  }
  out.files = runner.files;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.manifest = {{"experiment", config.experiment},
                  {"config", config.raw},
                  {"library_version", kVersion},
                  {"status", out.status},
                  {"wall_time_seconds", wall},
                  {"result", result}};
  out.manifest["resolved_omega_p"] = runner.resolved_omega_p ? json(*runner.resolved_omega_p) : json(nullptr);
  if (options.dt) out.manifest["dt_override"] = *options.dt;
  if (!out.error.empty()) out.manifest["error"] = out.error;
  json files = json::array();
  for (const auto& f : out.files) files.push_back(f.filename().string());
  out.manifest["files"] = files;
  try {
    write_text_file(dir / "manifest.json", out.manifest.dump(2) + "\n");
    out.files.push_back(dir / "manifest.json");
  } catch (const IoError& e) {
    if (out.exit_code == kExitOk) {
      out.exit_code = kExitIo;
      out.status = "io_error";
      out.error = e.what();
    }
  }
  return out;
}

}  // namespace dqw
