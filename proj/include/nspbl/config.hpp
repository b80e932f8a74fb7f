#pragma once

// Run configuration: defaults, named presets, strict JSON loading and serialization.
//
// Precedence (lowest first): built-in defaults, preset, config file, command-line flags.
// A config file may name a preset; its remaining keys are applied on top of it.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nspbl/composite.hpp"
#include "nspbl/errors.hpp"
#include "nspbl/grid.hpp"
#include "nspbl/phase_plane.hpp"
#include "nspbl/rarefaction.hpp"
#include "nspbl/solver.hpp"

namespace nspbl {

struct RunConfig {
  std::string preset = "caseIV-2";
  GasParameters gas;
  FarField far_field;
  BoundaryData boundary;
  RarefactionParams rarefaction;
  Grid grid;
  SolverOptions solver;
  double t_final = 200.0;
  double snapshot_every = 20.0;     // snapshot cadence in time units (0: first and last only)
  double diagnostics_every = 1.0;   // time-series cadence
  PerturbationSpec perturbation;
  std::string out_dir = "out";

  /// Checks every module precondition plus the truncation rule w+ (1 + t_final) < 0.8 L.
  void validate() const {
    gas.validate();
    far_field.validate();
    boundary.validate();
    rarefaction.validate();
    grid.validate();
    perturbation.validate();
    if (!(solver.cfl > 0.0 && solver.cfl <= 1.0))
      throw ConfigurationError("config: cfl must lie in (0, 1]");
    if (solver.field_refresh < 1) throw ConfigurationError("config: field_refresh must be >= 1");
    if (!(t_final >= 0.0)) throw ConfigurationError("config: t_final must be >= 0");
    if (snapshot_every < 0.0 || !(diagnostics_every > 0.0))
      throw ConfigurationError("config: cadences must be positive");
    if (!composite_admissible(gas, far_field, boundary))
      throw ConfigurationError("config: data admit no boundary-layer/rarefaction composite "
                               "(classification " +
                               to_string(classify(gas, far_field, boundary).tag) + ")");
    const double w_plus = far_field.u_plus + sound_speed(gas, far_field.rho_plus);
    if (w_plus * (1.0 + t_final) >= 0.8 * grid.length)
      throw ConfigurationError("config: fan edge w+ (1 + t_final) must stay below 0.8 L; "
                               "increase L or reduce t_final");
    if (perturbation.active() && perturbation.center + perturbation.width > grid.length)
      throw ConfigurationError("config: perturbation support exceeds the domain");
  }
};

inline std::vector<std::string> preset_names() {
  return {"caseIII-2", "caseIV-2", "pure-rarefaction", "pure-boundary-layer", "quasineutral-sanity"};
}

/// Named configurations. Every preset keeps the canonical gas (A = 1/3, gamma = 3).
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  // Compatible H1-small perturbation used by the stability runs: ion-only, so E(., 0) != 0.
  c.perturbation.h1_norm = 0.01;
  c.perturbation.target = "rho_i,u_i";
  if (name == "caseIV-2") {
    return c;
  }
  if (name == "caseIII-2") {
    c.far_field = {1.0, -0.1};
    c.boundary = {-0.8};
    return c;
  }
  if (name == "pure-rarefaction") {
    c.boundary = {-0.4};  // u_b = u*: trivial layer
    return c;
  }
  if (name == "pure-boundary-layer") {
    c.far_field = {0.4, -0.4};  // transonic far field: degenerate fan
    c.boundary = {-0.8};
    return c;
  }
  if (name == "quasineutral-sanity") {
    c.far_field = {1.0, -1.0};
    c.boundary = {-1.0};
    c.grid = {40.0, 400};
    c.t_final = 20.0;
    c.snapshot_every = 10.0;
    c.perturbation = PerturbationSpec{};
    return c;
  }
  throw ConfigurationError("unknown preset '" + name + "'");
}

namespace detail {

inline void check_keys(const nlohmann::json& obj, const std::string& where,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigurationError("config: '" + where + "' must be an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigurationError("config: unknown key '" + (where.empty() ? "" : where + ".") +
                               item.key() + "'");
}

template <class T>
void read(const nlohmann::json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Applies the keys present in j on top of c.
inline void apply_json(RunConfig& c, const nlohmann::json& j) {
  using detail::check_keys;
  using detail::read;
  check_keys(j, "", {"preset", "gas", "far_field", "boundary", "rarefaction", "grid", "solver",
                     "perturbation", "output"});
  if (j.contains("gas")) {
    const auto& g = j["gas"];
    check_keys(g, "gas", {"A", "gamma", "mu"});
    read(g, "A", c.gas.A);
    read(g, "gamma", c.gas.gamma);
    read(g, "mu", c.gas.mu);
  }
  if (j.contains("far_field")) {
    const auto& g = j["far_field"];
    check_keys(g, "far_field", {"rho_plus", "u_plus"});
    read(g, "rho_plus", c.far_field.rho_plus);
    read(g, "u_plus", c.far_field.u_plus);
  }
  if (j.contains("boundary")) {
    check_keys(j["boundary"], "boundary", {"u_b"});
    read(j["boundary"], "u_b", c.boundary.u_b);
  }
  if (j.contains("rarefaction")) {
    const auto& g = j["rarefaction"];
    check_keys(g, "rarefaction", {"q", "eps"});
    read(g, "q", c.rarefaction.q);
    read(g, "eps", c.rarefaction.eps);
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, "grid", {"L", "N"});
    read(g, "L", c.grid.length);
    read(g, "N", c.grid.cells);
  }
  if (j.contains("solver")) {
    const auto& g = j["solver"];
    check_keys(g, "solver", {"cfl", "t_final", "snapshot_every", "diagnostics_every",
                             "second_order", "field_refresh"});
    read(g, "cfl", c.solver.cfl);
    read(g, "t_final", c.t_final);
    read(g, "snapshot_every", c.snapshot_every);
    read(g, "diagnostics_every", c.diagnostics_every);
    read(g, "second_order", c.solver.second_order);
    read(g, "field_refresh", c.solver.field_refresh);
  }
  if (j.contains("perturbation")) {
    const auto& g = j["perturbation"];
    check_keys(g, "perturbation",
               {"amplitude", "h1_norm", "center", "width", "shape", "target", "seed"});
    read(g, "amplitude", c.perturbation.amplitude);
    read(g, "h1_norm", c.perturbation.h1_norm);
    read(g, "center", c.perturbation.center);
    read(g, "width", c.perturbation.width);
    read(g, "shape", c.perturbation.shape);
    read(g, "target", c.perturbation.target);
    read(g, "seed", c.perturbation.seed);
  }
  if (j.contains("output")) {
    check_keys(j["output"], "output", {"dir"});
    read(j["output"], "dir", c.out_dir);
  }
}

inline nlohmann::json to_json(const RunConfig& c) {
  return {
      {"preset", c.preset},
      {"gas", {{"A", c.gas.A}, {"gamma", c.gas.gamma}, {"mu", c.gas.mu}}},
      {"far_field", {{"rho_plus", c.far_field.rho_plus}, {"u_plus", c.far_field.u_plus}}},
      {"boundary", {{"u_b", c.boundary.u_b}}},
      {"rarefaction", {{"q", c.rarefaction.q}, {"eps", c.rarefaction.eps}}},
      {"grid", {{"L", c.grid.length}, {"N", c.grid.cells}}},
      {"solver",
       {{"cfl", c.solver.cfl},
        {"t_final", c.t_final},
        {"snapshot_every", c.snapshot_every},
        {"diagnostics_every", c.diagnostics_every},
        {"second_order", c.solver.second_order},
        {"field_refresh", c.solver.field_refresh}}},
      {"perturbation",
       {{"amplitude", c.perturbation.amplitude},
        {"h1_norm", c.perturbation.h1_norm},
        {"center", c.perturbation.center},
        {"width", c.perturbation.width},
        {"shape", c.perturbation.shape},
        {"target", c.perturbation.target},
        {"seed", c.perturbation.seed}}},
      {"output", {{"dir", c.out_dir}}},
  };
}

/// Parses config text on top of the caseIV-2 preset. Empty (or whitespace-only) text
/// yields that preset unchanged.
inline RunConfig parse_config(const std::string& text, bool validate = true) {
  RunConfig c = preset("caseIV-2");
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigurationError(std::string("config: parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigurationError("config: top level must be an object");
    if (j.contains("preset")) {
      if (!j["preset"].is_string()) throw ConfigurationError("config: 'preset' must be a string");
      c = preset(j["preset"].get<std::string>());
    }
    apply_json(c, j);
  }
  if (validate) c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path, bool validate = true) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), validate);
}

inline std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace nspbl
