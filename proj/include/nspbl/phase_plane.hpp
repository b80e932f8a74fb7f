#pragma once

// Wave-pattern classification of the outflow problem in the (v, u) phase plane.

#include <cmath>
#include <optional>
#include <string>

#include "nspbl/errors.hpp"
#include "nspbl/gas_model.hpp"

namespace nspbl {

/// Tolerance used to decide ties at classification thresholds.
inline constexpr double kThresholdTol = 1e-12;

struct FarField {
  double rho_plus = 1.0;
  double u_plus = 0.2;

  double v_plus() const { return 1.0 / rho_plus; }
  void validate() const {
    if (!(rho_plus > 0.0) || !std::isfinite(rho_plus))
      throw PreconditionViolation("far field: rho_plus must be > 0");
    if (!std::isfinite(u_plus)) throw PreconditionViolation("far field: u_plus must be finite");
  }
};

struct BoundaryData {
  double u_b = -0.8;

  void validate() const {
    if (!(u_b < 0.0))
      throw PreconditionViolation("boundary: outflow condition u_b < 0 violated (u_b = " +
                                  std::to_string(u_b) + ")");
  }
};

/// Intersection of the R2 curve through the far field with the transonic line |u| = C.
struct TransonicPoint {
  double v_star = 0.0;
  double rho_star = 0.0;
  double u_star = 0.0;
  double c_star = 0.0;
};

enum class WaveCase { I, II, III_1, III_2, IV_1, IV_2, Unsupported };

inline std::string to_string(WaveCase c) {
  switch (c) {
    case WaveCase::I: return "I";
    case WaveCase::II: return "II";
    case WaveCase::III_1: return "III-1";
    case WaveCase::III_2: return "III-2";
    case WaveCase::IV_1: return "IV-1";
    case WaveCase::IV_2: return "IV-2";
    case WaveCase::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

struct Classification {
  WaveCase tag = WaveCase::Unsupported;
  std::optional<TransonicPoint> transonic;
  std::optional<double> rho_b;
  std::string note;

  bool is_subcase_2() const { return tag == WaveCase::III_2 || tag == WaveCase::IV_2; }
};

struct WaveStrengths {
  double delta_tilde = 0.0;  // boundary layer |u* - u_b|
  double delta_r = 0.0;      // rarefaction |rho+ - rho*| + |u+ - u*|
  double delta_bar = 0.0;    // Burgers data w+ - w-
};

/// Closed form from constancy of z = u - 2C/(gamma-1) along R2 and u* = -C*:
/// C* = (2 C+ - (gamma-1) u+)/(gamma+1).
inline TransonicPoint transonic_point(const GasParameters& p, const FarField& ff) {
  p.validate();
  ff.validate();
  const double c_plus = sound_speed(p, ff.rho_plus);
  if (ff.u_plus + c_plus < -kThresholdTol * std::max(1.0, c_plus))
    throw ClassificationError("transonic_point: far field is supersonic with u+ < 0; "
                              "its R2 curve does not meet the transonic line");
  const double c_star = (2.0 * c_plus - (p.gamma - 1.0) * ff.u_plus) / (p.gamma + 1.0);
  if (!(c_star > 0.0))
    throw ClassificationError("transonic_point: no intersection with the transonic line (C* <= 0)");
  TransonicPoint tp;
  tp.c_star = c_star;
  tp.u_star = -c_star;
  tp.rho_star = density_from_sound_speed(p, c_star);
  tp.v_star = 1.0 / tp.rho_star;
  return tp;
}

/// rho_b from mass-flux constancy rho_b u_b = rho* u*.
inline double boundary_density(const TransonicPoint& tp, const BoundaryData& bd) {
  if (!(bd.u_b < tp.u_star))
    throw ConfigurationError("boundary_density: u_b >= u*, not a boundary-layer configuration");
  return tp.rho_star * tp.u_star / bd.u_b;
}

inline Classification classify(const GasParameters& p, const FarField& ff,
                               const BoundaryData& bd) {
  p.validate();
  ff.validate();
  bd.validate();
  Classification out;
  const double c_plus = sound_speed(p, ff.rho_plus);
  const double tie = kThresholdTol * std::max(1.0, c_plus);

  auto split_subcases = [&](WaveCase sub1, WaveCase sub2) {
    const TransonicPoint tp = transonic_point(p, ff);
    out.transonic = tp;
    // u_b == u* is the pure-rarefaction subcase (no boundary layer).
    if (bd.u_b < tp.u_star) {
      out.tag = sub2;
      out.rho_b = boundary_density(tp, bd);
    } else {
      out.tag = sub1;
    }
  };

  if (ff.u_plus > 0.0) {
    split_subcases(WaveCase::IV_1, WaveCase::IV_2);
    return out;
  }

  const double mach_gap = std::abs(ff.u_plus) - c_plus;
  if (std::abs(mach_gap) <= tie) {
    // Transonic far field: degenerate boundary layer straight to (v+, u+).
    if (bd.u_b < ff.u_plus) {
      out.tag = WaveCase::II;
      out.transonic = transonic_point(p, ff);
      out.rho_b = ff.rho_plus * ff.u_plus / bd.u_b;
    } else if (bd.u_b == ff.u_plus) {
      out.tag = WaveCase::II;
      out.transonic = transonic_point(p, ff);
      out.note = "degenerate: u_b equals the transonic far-field velocity";
    } else {
      out.note = "transonic far field with u_b > u+ requires a shock";
    }
    return out;
  }
  if (mach_gap > 0.0) {
    // Supersonic inflow-side far field. The S2 intersection is not computed, but it
    // lies above u+, so u_b < u+ is certainly Case I.
    if (bd.u_b < ff.u_plus) {
      out.tag = WaveCase::I;
      out.note = "Case I boundary layer through the S2 intersection (not constructed)";
    } else {
      out.note = "supersonic far field with u_b >= u+ needs the S2 intersection";
    }
    return out;
  }
  // Subsonic far field with u+ <= 0.
  if (!(bd.u_b < ff.u_plus)) {
    out.note = "subsonic far field with u_b >= u+ is outside Cases I-IV";
    return out;
  }
  split_subcases(WaveCase::III_1, WaveCase::III_2);
  return out;
}

/// The strengths need the transonic point, so subcase-2 or degenerate data only.
inline WaveStrengths wave_strengths(const TransonicPoint& tp, const FarField& ff,
                                    const BoundaryData& bd, const GasParameters& p) {
  const double w_minus = tp.u_star + sound_speed(p, tp.rho_star);
  if (std::abs(w_minus) > 1e-10)
    throw NumericalError("wave_strengths: w- = u* + C(rho*) is not zero (" +
                         std::to_string(w_minus) + ")");
  const double w_plus = ff.u_plus + sound_speed(p, ff.rho_plus);
  WaveStrengths ws;
  ws.delta_tilde = std::abs(tp.u_star - bd.u_b);
  ws.delta_r = std::abs(ff.rho_plus - tp.rho_star) + std::abs(ff.u_plus - tp.u_star);
  ws.delta_bar = w_plus;  // w- = 0 exactly on the transonic line
  return ws;
}

// Phase-plane curves through a right state (v1, u1), used for figure export.

/// BL(v1, u1): u / v = u1 / v1.
inline double boundary_line_velocity(double v1, double u1, double v) { return u1 / v1 * v; }

/// R2(v1, u1) in closed form: u = u1 - sqrt(gamma A) int_{v1}^{v} s^{-(gamma+1)/2} ds.
inline double r2_curve_velocity(const GasParameters& p, double v1, double u1, double v) {
  const double k = 0.5 * (p.gamma - 1.0);
  return u1 - p.sound_prefactor() / k * (std::pow(v1, -k) - std::pow(v, -k));
}

/// Gamma_trans lower branch: u = -C(1/v).
inline double transonic_line_velocity(const GasParameters& p, double v) {
  return -sound_speed(p, 1.0 / v);
}

/// S2(v1, u1) for v < v1: u = u1 + sqrt((P(1/v) - P(1/v1)) (v1 - v)).
inline double s2_curve_velocity(const GasParameters& p, double v1, double u1, double v) {
  return u1 + std::sqrt((pressure(p, 1.0 / v) - pressure(p, 1.0 / v1)) * (v1 - v));
}

/// Sufficient data to build the composite wave: a transonic point exists and the
/// boundary velocity is at or below it. Covers III-2/IV-2 and the degenerate
/// single-wave limits used by the sanity presets.
inline bool composite_admissible(const GasParameters& p, const FarField& ff,
                                 const BoundaryData& bd) {
  try {
    const Classification cls = classify(p, ff, bd);
    if (!cls.transonic) return false;
    return bd.u_b <= cls.transonic->u_star + kThresholdTol;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace nspbl
