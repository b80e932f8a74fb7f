#pragma once

// Run orchestration: build the composite, perturb, time-step, record diagnostics,
// and write snapshots, the time series and the run manifest.
//
// Layout under the output directory:
//   run_manifest.json          config echo, classification, strengths, status, checksums
//   timeseries.csv             one row per diagnostic time
//   snapshots/snapshot_NNNN.csv
//   snapshots/last_valid.csv   only after a solver failure
//   profiles/*.csv             written by write_profiles()

#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <openssl/opensslv.h>
#include <string>
#include <vector>

#include <json.hpp>

#include "nspbl/composite.hpp"
#include "nspbl/config.hpp"
#include "nspbl/diagnostics.hpp"
#include "nspbl/io.hpp"
#include "nspbl/solver.hpp"

namespace nspbl {

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& timeseries_columns() {
  static const std::vector<std::string> cols = {
      "t",        "sup_dist_rho_i", "sup_dist_u_i",  "sup_dist_rho_e", "sup_dist_u_e", "sup_E",
      "h1_phi_i", "h1_psi_i",       "h1_phi_e",      "h1_psi_e",       "energy_total", "diss_psi",
      "diss_weighted", "trace_phi_i0", "trace_phi_e0", "trace_E0"};
  return cols;
}

inline const std::vector<std::string>& snapshot_columns() {
  static const std::vector<std::string> cols = {"x",   "rho_i", "u_i",     "rho_e",
                                                "u_e", "E",     "rho_hat", "u_hat"};
  return cols;
}

struct TimeSeriesRow {
  double t = 0.0;
  std::optional<TheoremMetrics> metrics;  // empty at t = 0
  EnergyReport energy;

  std::vector<double> values() const {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const TheoremMetrics m = metrics.value_or(TheoremMetrics{nan, nan, nan, nan, nan});
    return {t,
            m.sup_dist_rho_i,
            m.sup_dist_u_i,
            m.sup_dist_rho_e,
            m.sup_dist_u_e,
            m.sup_E,
            energy.h1_phi_i,
            energy.h1_psi_i,
            energy.h1_phi_e,
            energy.h1_psi_e,
            energy.energy_total,
            energy.diss_psi,
            energy.diss_weighted,
            energy.trace_phi_i0,
            energy.trace_phi_e0,
            energy.trace_E0};
  }
};

struct RunResult {
  bool completed = false;
  std::string failure;
  double t_end = 0.0;
  std::size_t steps = 0;
  FluidState final_state;
  std::vector<TimeSeriesRow> series;
  double initial_h1 = 0.0;
  double max_symmetry_drift = 0.0;  // max |rho_i - rho_e| + |u_i - u_e|
  double max_state_drift = 0.0;     // max |state - initial state| over all steps
  double max_sobolev_ratio = 0.0;
  std::vector<std::filesystem::path> files;
};

namespace detail {

inline nlohmann::json classification_json(const RunConfig& c) {
  const Classification cls = classify(c.gas, c.far_field, c.boundary);
  nlohmann::json j = {{"case", to_string(cls.tag)}, {"note", cls.note}};
  if (cls.transonic) {
    const auto& tp = *cls.transonic;
    j["transonic"] = {{"v_star", tp.v_star}, {"rho_star", tp.rho_star}, {"u_star", tp.u_star},
                      {"c_star", tp.c_star}};
    const WaveStrengths ws = wave_strengths(tp, c.far_field, c.boundary, c.gas);
    j["strengths"] = {{"delta_tilde", ws.delta_tilde}, {"delta_r", ws.delta_r},
                      {"delta_bar", ws.delta_bar}};
  }
  if (cls.rho_b) j["rho_b"] = *cls.rho_b;
  return j;
}

inline void write_snapshot(const std::filesystem::path& path, const FluidState& s,
                           const FieldState& f, std::span<const CompositeValue> hat, const Grid& g) {
  CsvWriter w(path, snapshot_columns());
  for (std::size_t k = 0; k < s.size(); ++k)
    w.row({g.x(k), s.rho_i[k], s.u_i[k], s.rho_e[k], s.u_e[k], f.E[k], hat[k].rho, hat[k].u});
}

inline double max_abs_diff(const FluidState& a, const FluidState& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    d = std::max({d, std::abs(a.rho_i[k] - b.rho_i[k]), std::abs(a.u_i[k] - b.u_i[k]),
                  std::abs(a.rho_e[k] - b.rho_e[k]), std::abs(a.u_e[k] - b.u_e[k])});
  return d;
}

inline double symmetry_drift(const FluidState& s) {
  double d = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k)
    d = std::max(d, std::abs(s.rho_i[k] - s.rho_e[k]) + std::abs(s.u_i[k] - s.u_e[k]));
  return d;
}

/// Event times k * every up to t_final (t_final always included).
inline std::vector<double> event_times(double every, double t_final) {
  std::vector<double> out{0.0};
  if (every > 0.0)
    for (long k = 1; k * every < t_final - 1e-9 * std::max(1.0, t_final); ++k) out.push_back(k * every);
  if (t_final > 0.0) out.push_back(t_final);
  return out;
}

}  // namespace detail

struct RunOptions {
  bool write_files = true;
  bool keep_series = true;
};

/// Runs the configured simulation. Solver failures do not throw: they end the run with
/// completed = false and, when writing files, a failure manifest plus the last valid
/// snapshot.
inline RunResult run(const RunConfig& cfg, const RunOptions& opt = {}) {
  namespace fs = std::filesystem;
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const fs::path out = cfg.out_dir;
  const fs::path manifest_path = out / "run_manifest.json";
  nlohmann::json manifest = {{"config", to_json(cfg)},
                             {"classification", detail::classification_json(cfg)},
                             {"versions",
                              {{"nspbl", kVersion},
                               {"boost", BOOST_LIB_VERSION},
                               {"openssl", OPENSSL_VERSION_TEXT},
                               {"compiler", __VERSION__}}},
                             {"status", "running"},
                             {"files", nlohmann::json::array()}};
  auto write_manifest = [&] {
    if (!opt.write_files) return;
    std::ofstream m(manifest_path, std::ios::binary);
    m << manifest.dump(2) << '\n';
  };
  if (opt.write_files) {
    fs::create_directories(out / "snapshots");
    write_manifest();
  }

  RunResult res;
  const CompositeWave cw = build_composite(cfg.gas, cfg.far_field, cfg.boundary, cfg.rarefaction);
  const Grid& grid = cfg.grid;
  const CompositeSampler sampler(cw, grid);
  const InitialData init = initial_data(cw, cfg.perturbation, grid);
  res.initial_h1 = init.perturbation_h1;
  manifest["initial_perturbation"] = {{"h1_norm", init.perturbation_h1},
                                      {"amplitude", init.amplitude},
                                      {"seed", cfg.perturbation.seed}};

  StepContext ctx{grid, cfg.gas, cfg.boundary.u_b, composite_right_boundary(cw, grid.length),
                  cfg.solver, nullptr};

  std::unique_ptr<CsvWriter> ts;
  if (opt.write_files) ts = std::make_unique<CsvWriter>(out / "timeseries.csv", timeseries_columns());
  std::vector<std::string> snapshot_files;
  nlohmann::json snapshot_index = nlohmann::json::array();

  auto record = [&](const FluidState& s, bool diag, bool snap) {
    const FieldState field = poisson_field(s.rho_i, s.rho_e, grid);
    const std::vector<CompositeValue> hat = sampler.sample(s.t);
    if (diag) {
      TimeSeriesRow row;
      row.t = s.t;
      row.energy = energy_report(cfg.gas, s, field, hat, grid);
      if (s.t > 0.0) row.metrics = theorem_metrics(s, field, sampler, s.t);
      res.max_sobolev_ratio = std::max(res.max_sobolev_ratio, row.energy.sobolev_ratio);
      if (ts) ts->row(row.values());
      if (opt.keep_series) res.series.push_back(row);
    }
    if (snap && opt.write_files) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%04zu.csv", snapshot_files.size());
      detail::write_snapshot(out / "snapshots" / name, s, field, hat, grid);
      snapshot_files.push_back(std::string("snapshots/") + name);
      snapshot_index.push_back({{"file", snapshot_files.back()}, {"t", s.t}});
    }
  };

  const auto diag_times = detail::event_times(cfg.diagnostics_every, cfg.t_final);
  const auto snap_times = detail::event_times(cfg.snapshot_every, cfg.t_final);
  std::size_t next_diag = 1, next_snap = 1;
  FluidState state = init.state;
  record(state, true, true);

  FieldState field;
  try {
    while (state.t < cfg.t_final) {
      const double t_diag = next_diag < diag_times.size() ? diag_times[next_diag] : cfg.t_final;
      const double t_snap = next_snap < snap_times.size() ? snap_times[next_snap] : cfg.t_final;
      const double target = std::min({t_diag, t_snap, cfg.t_final});
      double dt = cfl_dt(state, grid, cfg.gas, cfg.solver.cfl);
      bool lands = false;
      if (state.t + dt >= target - 1e-12 * std::max(1.0, target)) {
        dt = target - state.t;
        lands = true;
      }
      if (res.steps % static_cast<std::size_t>(cfg.solver.field_refresh) == 0)
        field = poisson_field(state.rho_i, state.rho_e, grid);
      FluidState next = step(state, ctx, dt, &field);
      if (lands) next.t = target;
      state = std::move(next);
      ++res.steps;
      res.max_symmetry_drift = std::max(res.max_symmetry_drift, detail::symmetry_drift(state));
      res.max_state_drift = std::max(res.max_state_drift, detail::max_abs_diff(state, init.state));
      const bool diag = lands && next_diag < diag_times.size() && target == diag_times[next_diag];
      const bool snap = lands && next_snap < snap_times.size() && target == snap_times[next_snap];
      if (diag) ++next_diag;
      if (snap) ++next_snap;
      if (diag || snap) record(state, diag, snap);
    }
    res.completed = true;
    manifest["status"] = "completed";
  } catch (const NumericalError& e) {
    res.completed = false;
    res.failure = e.what();
    manifest["status"] = "failed";
    manifest["failure"] = {{"error", e.what()}, {"time", state.t}, {"steps", res.steps}};
    if (opt.write_files) {
      const FieldState f = poisson_field(state.rho_i, state.rho_e, grid);
      const auto hat = sampler.sample(state.t);
      detail::write_snapshot(out / "snapshots" / "last_valid.csv", state, f, hat, grid);
      snapshot_files.push_back("snapshots/last_valid.csv");
      manifest["failure"]["last_valid_snapshot"] = "snapshots/last_valid.csv";
    }
  }
  res.t_end = state.t;
  res.final_state = std::move(state);
  if (ts) ts->flush();
  ts.reset();

  manifest["steps"] = res.steps;
  manifest["t_end"] = res.t_end;
  manifest["snapshots"] = snapshot_index;
  manifest["summary"] = {{"max_symmetry_drift", res.max_symmetry_drift},
                         {"max_state_drift", res.max_state_drift},
                         {"max_sobolev_ratio", res.max_sobolev_ratio}};
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  if (opt.write_files) {
    std::vector<std::string> files = {"timeseries.csv"};
    files.insert(files.end(), snapshot_files.begin(), snapshot_files.end());
    for (const auto& f : files) {
      manifest["files"].push_back(
          {{"path", f}, {"sha256", sha256_file(out / f)}, {"bytes", fs::file_size(out / f)}});
      res.files.push_back(out / f);
    }
    write_manifest();
    res.files.push_back(manifest_path);
  }
  return res;
}

/// Re-hashes every file listed in a manifest; returns the paths that do not match.
inline std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "run_manifest.json");
  if (!in) throw ConfigurationError("no run_manifest.json in '" + dir.string() + "'");
  const nlohmann::json m = nlohmann::json::parse(in);
  std::vector<std::string> bad;
  for (const auto& f : m.at("files")) {
    const auto path = dir / f.at("path").get<std::string>();
    if (!std::filesystem::exists(path) || sha256_file(path) != f.at("sha256").get<std::string>())
      bad.push_back(f.at("path").get<std::string>());
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Profile and phase-plane export

/// Writes profiles/boundary_layer.csv, profiles/rarefaction.csv,
/// profiles/phase_plane_curves.csv and profiles/phase_plane_points.csv.
inline std::vector<std::filesystem::path> write_profiles(const RunConfig& cfg,
                                                         std::vector<double> times = {0.0, 10.0, 50.0,
                                                                                      100.0, 200.0}) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(cfg.out_dir) / "profiles";
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const CompositeWave cw = build_composite(cfg.gas, cfg.far_field, cfg.boundary, cfg.rarefaction);
  const Grid& grid = cfg.grid;
  {
    const fs::path p = dir / "boundary_layer.csv";
    CsvWriter w(p, {"x", "u_tilde", "rho_tilde", "dx_u_tilde", "dxx_u_tilde"});
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const BoundaryLayerValue v = cw.boundary_layer().evaluate(grid.x(k));
      w.row({grid.x(k), v.u, v.rho, v.u_x, v.u_xx});
    }
    written.push_back(p);
  }
  {
    const fs::path p = dir / "rarefaction.csv";
    CsvWriter w(p, {"x", "t", "w_bar", "rho_r2", "u_r2"});
    for (double t : times)
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const RarefactionValue v = cw.rarefaction().evaluate(grid.x(k), t);
        w.row({grid.x(k), t, v.w, v.rho, v.u});
      }
    written.push_back(p);
  }
  const GasParameters& gas = cfg.gas;
  const TransonicPoint& tp = cw.transonic();
  const double v_plus = cfg.far_field.v_plus(), u_plus = cfg.far_field.u_plus;
  const double rho_b = tp.rho_star * tp.u_star / cfg.boundary.u_b;
  {
    const fs::path p = dir / "phase_plane_curves.csv";
    CsvWriter w(p, {"curve", "v", "u"});
    const double v_lo = 0.2 * std::min(v_plus, tp.v_star), v_hi = 3.0 * std::max({v_plus, tp.v_star, 1.0 / rho_b});
    const int n = 400;
    for (int k = 0; k <= n; ++k) {
      const double v = v_lo * std::pow(v_hi / v_lo, static_cast<double>(k) / n);
      w.row({"boundary_line"}, {v, boundary_line_velocity(tp.v_star, tp.u_star, v)});
    }
    for (int k = 0; k <= n; ++k) {
      const double v = v_lo * std::pow(v_hi / v_lo, static_cast<double>(k) / n);
      w.row({"rarefaction_r2"}, {v, r2_curve_velocity(gas, v_plus, u_plus, v)});
    }
    for (int k = 0; k <= n; ++k) {
      const double v = v_lo * std::pow(v_hi / v_lo, static_cast<double>(k) / n);
      w.row({"transonic"}, {v, transonic_line_velocity(gas, v)});
    }
    for (int k = 0; k < n; ++k) {
      const double v = v_lo * std::pow(v_plus / v_lo, static_cast<double>(k) / n);
      w.row({"shock_s2"}, {v, s2_curve_velocity(gas, v_plus, u_plus, v)});
    }
    written.push_back(p);
  }
  {
    const fs::path p = dir / "phase_plane_points.csv";
    CsvWriter w(p, {"label", "v", "u"});
    w.row({"far_field"}, {v_plus, u_plus});
    w.row({"transonic"}, {tp.v_star, tp.u_star});
    w.row({"boundary"}, {1.0 / rho_b, cfg.boundary.u_b});
    written.push_back(p);
  }
  return written;
}

}  // namespace nspbl
