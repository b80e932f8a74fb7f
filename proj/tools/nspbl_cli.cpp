// nspbl command-line driver.
//
// Configuration precedence: built-in defaults < --preset < --config file < flags.
// A preset named inside the config file is used as its base unless --preset is given.
// Exit status: 0 success, 1 check or physics failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nspbl/config.hpp"
#include "nspbl/run.hpp"
#include "nspbl/verification.hpp"

namespace {

using namespace nspbl;

struct Overrides {
  std::string config_path, preset_name, out_dir;
  std::optional<double> gamma, A, rho_plus, u_plus, u_b, eps, L, cfl, t_final, amplitude;
  std::optional<int> q, N;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--preset", o.preset_name, "named configuration")->check(CLI::IsMember(preset_names()));
  app.add_option("--out", o.out_dir, "output directory");
  app.add_option("--gamma", o.gamma, "adiabatic exponent");
  app.add_option("--A", o.A, "pressure constant");
  app.add_option("--rho-plus", o.rho_plus, "far-field density");
  app.add_option("--u-plus", o.u_plus, "far-field velocity");
  app.add_option("--u-b", o.u_b, "wall velocity (< 0)");
  app.add_option("--eps", o.eps, "mollifier steepness");
  app.add_option("--q", o.q, "mollifier exponent");
  app.add_option("--L", o.L, "domain length");
  app.add_option("--N", o.N, "cell count");
  app.add_option("--cfl", o.cfl, "Courant number");
  app.add_option("--t-final", o.t_final, "final time");
  app.add_option("--amplitude", o.amplitude, "peak perturbation amplitude (replaces the H1 target)");
  app.add_option("--seed", o.seed, "perturbation seed");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = preset(o.preset_name.empty() ? "caseIV-2" : o.preset_name);
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigurationError(std::string("config: parse error: ") + e.what());
      }
      if (!j.is_object()) throw ConfigurationError("config: top level must be an object");
      if (o.preset_name.empty() && j.contains("preset")) {
        if (!j["preset"].is_string()) throw ConfigurationError("config: 'preset' must be a string");
        c = preset(j["preset"].get<std::string>());
      }
      if (!o.preset_name.empty()) j.erase("preset");
      apply_json(c, j);
    }
  }
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (o.gamma) c.gas.gamma = *o.gamma;
  if (o.A) c.gas.A = *o.A;
  if (o.rho_plus) c.far_field.rho_plus = *o.rho_plus;
  if (o.u_plus) c.far_field.u_plus = *o.u_plus;
  if (o.u_b) c.boundary.u_b = *o.u_b;
  if (o.eps) c.rarefaction.eps = *o.eps;
  if (o.q) c.rarefaction.q = *o.q;
  if (o.L) c.grid.length = *o.L;
  if (o.N) c.grid.cells = *o.N;
  if (o.cfl) c.solver.cfl = *o.cfl;
  if (o.t_final) c.t_final = *o.t_final;
  if (o.amplitude) {
    c.perturbation.amplitude = *o.amplitude;
    c.perturbation.h1_norm = 0.0;
  }
  if (o.seed) c.perturbation.seed = *o.seed;
  return c;
}

void print_report(const VerificationReport& r) {
  std::printf("== %s\n", r.title.c_str());
  for (const auto& c : r.checks) {
    const char* tag = !c.gating ? "INFO" : c.passed ? "PASS" : "FAIL";
    std::printf("  [%s] %s: %s\n", tag, c.name.c_str(), c.detail.c_str());
  }
}

int cmd_classify(const RunConfig& c) {
  // Classification only needs the physical data.
  c.gas.validate();
  c.far_field.validate();
  c.boundary.validate();
  const Classification cls = classify(c.gas, c.far_field, c.boundary);
  std::printf("case: %s\n", to_string(cls.tag).c_str());
  if (cls.transonic) {
    const TransonicPoint& tp = *cls.transonic;
    std::printf("transonic: rho* = %.12g, u* = %.12g, v* = %.12g\n", tp.rho_star, tp.u_star, tp.v_star);
    if (cls.rho_b) std::printf("rho_b: %.12g\n", *cls.rho_b);
    if (std::abs(tp.u_star + sound_speed(c.gas, tp.rho_star)) <= 1e-10) {
      const WaveStrengths ws = wave_strengths(tp, c.far_field, c.boundary, c.gas);
      std::printf("strengths: delta_tilde = %.12g, delta_r = %.12g, delta_bar = %.12g\n", ws.delta_tilde,
                  ws.delta_r, ws.delta_bar);
    }
  }
  if (!cls.note.empty()) std::printf("note: %s\n", cls.note.c_str());
  return 0;
}

int cmd_build_profiles(const RunConfig& c) {
  c.validate();
  for (const auto& p : write_profiles(c)) std::printf("wrote %s\n", p.string().c_str());
  return 0;
}

int cmd_simulate(const RunConfig& c) {
  const RunResult r = run(c);
  std::printf("status: %s\n", r.completed ? "completed" : "failed");
  if (!r.completed) std::printf("failure: %s\n", r.failure.c_str());
  std::printf("steps: %zu\n", r.steps);
  std::printf("t_end: %.17g\n", r.t_end);
  std::printf("initial_h1: %.6g\n", r.initial_h1);
  std::printf("max_state_drift: %.6g\n", r.max_state_drift);
  std::printf("max_symmetry_drift: %.6g\n", r.max_symmetry_drift);
  std::printf("max_sobolev_ratio: %.6g\n", r.max_sobolev_ratio);
  std::printf("manifest: %s\n", (std::filesystem::path(c.out_dir) / "run_manifest.json").string().c_str());
  return r.completed ? 0 : 1;
}

int cmd_verify_lemmas(const RunConfig& c, const std::string& lemma) {
  c.validate();
  bool ok = true;
  auto emit = [&](const VerificationReport& r) {
    print_report(r);
    ok = ok && r.passed();
  };
  if (lemma == "2.1" || lemma == "all") emit(verify_boundary_layer_decay(c));
  if (lemma == "2.2" || lemma == "all") emit(verify_rarefaction_decay(c, true));
  if (lemma == "2.3" || lemma == "all") emit(verify_rarefaction_decay(c, false));
  if (lemma == "4.1" || lemma == "all") {
    emit(verify_layer_scaling(c));
    emit(verify_source_envelopes(c));
  }
  std::printf("result: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_verify_theorem(const RunConfig& c, bool strict) {
  const VerificationReport r = verify_theorem(c, strict, true);
  print_report(r);
  std::printf("result: %s\n", r.passed() ? "PASS" : "FAIL");
  return r.passed() ? 0 : 1;
}

void failure_report(const char* kind, const std::exception& e) {
  const nlohmann::json j = {{"error", kind}, {"message", e.what()}};
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-layer / rarefaction composite waves for the two-fluid Navier-Stokes-Poisson outflow problem"};
  app.require_subcommand(1);
  Overrides o;

  auto* classify_cmd = app.add_subcommand("classify", "classify the wave pattern of the data");
  auto* profiles_cmd = app.add_subcommand("build-profiles", "write layer, rarefaction and phase-plane CSVs");
  auto* simulate_cmd = app.add_subcommand("simulate", "run the two-fluid solver");
  auto* lemmas_cmd = app.add_subcommand("verify-lemmas", "decay and scaling checks of the asymptotic profiles");
  auto* theorem_cmd = app.add_subcommand("verify-theorem", "canonical stability run with trend checks");
  for (auto* sub : {classify_cmd, profiles_cmd, simulate_cmd, lemmas_cmd, theorem_cmd}) add_common(*sub, o);

  std::string lemma = "all";
  lemmas_cmd->add_option("--lemma", lemma, "which lemma to check")
      ->check(CLI::IsMember({"2.1", "2.2", "2.3", "4.1", "all"}));
  bool strict = false;
  theorem_cmd->add_flag("--strict", strict, "gate on the 10% decay and monotonicity checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig c = resolve(o);
    if (classify_cmd->parsed()) return cmd_classify(c);
    if (profiles_cmd->parsed()) return cmd_build_profiles(c);
    if (simulate_cmd->parsed()) return cmd_simulate(c);
    if (lemmas_cmd->parsed()) return cmd_verify_lemmas(c, lemma);
    if (theorem_cmd->parsed()) return cmd_verify_theorem(c, strict);
  } catch (const ConfigurationError& e) {
    failure_report("configuration", e);
    return 1;
  } catch (const PreconditionViolation& e) {
    failure_report("precondition", e);
    return 1;
  } catch (const ClassificationError& e) {
    failure_report("classification", e);
    return 1;
  } catch (const DomainError& e) {
    failure_report("domain", e);
    return 1;
  } catch (const NumericalError& e) {
    failure_report("numerical", e);
    return 1;
  }
  return 2;
}
