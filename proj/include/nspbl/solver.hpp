#pragma once

// Two-fluid Navier-Stokes-Poisson system on [0, L]:
//
//   rho_t + (rho u)_x = 0,
//   rho (u_t + u u_x) + P(rho)_x = +/- rho E + u_xx,     (+ ions, - electrons)
//   E_x = rho_i - rho_e,  E(L) = 0,
//
// with u(0, t) = u_b < 0 (outflow) and Dirichlet data from the composite wave at L.
//
// IMEX step: upwind mass flux, upwind convection, central pressure gradient and the
// electric force are explicit; the viscous term is backward Euler (one tridiagonal
// solve per fluid), so dt is limited by the convective CFL number only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nspbl/composite.hpp"
#include "nspbl/errors.hpp"
#include "nspbl/gas_model.hpp"
#include "nspbl/grid.hpp"

namespace nspbl {

class PositivityFailure : public NumericalError {
 public:
  PositivityFailure(const std::string& what, double t, std::size_t node)
      : NumericalError(what), time(t), node(node) {}
  double time;
  std::size_t node;
};

class CflViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct FluidState {
  std::vector<double> rho_i, u_i, rho_e, u_e;
  double t = 0.0;

  std::size_t size() const { return rho_i.size(); }
};

struct FieldState {
  std::vector<double> E;
  double trace() const { return E.empty() ? 0.0 : E.front(); }
};

struct SolverOptions {
  double cfl = 0.5;
  bool second_order = false;  // minmod-limited reconstruction for transport terms
  int field_refresh = 1;      // refresh E every this many steps
  bool transport = true;      // false: viscous term and forcing only
};

/// Additive sources in conservation form for manufactured-solution studies:
///   rho_t + (rho u)_x = mass(x,t),  rho(u_t + u u_x) + P_x = ... + momentum(x,t).
struct Forcing {
  std::function<double(double, double)> mass_i, momentum_i, mass_e, momentum_e;
};

/// Right-boundary data (rho, u) at x = L as a function of time.
using RightBoundary = std::function<std::pair<double, double>(double)>;

struct StepContext {
  Grid grid;
  GasParameters gas;
  double u_b = -0.8;
  RightBoundary right;
  SolverOptions options;
  const Forcing* forcing = nullptr;
};

/// E(x) = -int_x^L (rho_i - rho_e) dy by right-to-left trapezoid accumulation.
inline FieldState poisson_field(std::span<const double> rho_i, std::span<const double> rho_e,
                                const Grid& grid) {
  if (rho_i.size() != rho_e.size() || rho_i.size() != grid.size())
    throw PreconditionViolation("poisson_field: densities must live on the same grid");
  const std::size_t n = rho_i.size();
  const double h = grid.h();
  FieldState f;
  f.E.assign(n, 0.0);
  for (std::size_t k = n - 1; k-- > 0;) {
    const double g0 = rho_i[k] - rho_e[k], g1 = rho_i[k + 1] - rho_e[k + 1];
    f.E[k] = f.E[k + 1] - 0.5 * h * (g0 + g1);
  }
  return f;
}

/// dt = cfl * h / max(|u| + C(rho)) over both fluids.
inline double cfl_dt(const FluidState& s, const Grid& grid, const GasParameters& gas, double cfl) {
  double speed = 0.0;
  auto scan = [&](const std::vector<double>& rho, const std::vector<double>& u) {
    for (std::size_t k = 0; k < rho.size(); ++k) {
      const double c = std::abs(u[k]) + sound_speed(gas, rho[k]);
      if (!std::isfinite(c)) throw NumericalError("cfl_dt: non-finite wave speed");
      speed = std::max(speed, c);
    }
  };
  scan(s.rho_i, s.u_i);
  scan(s.rho_e, s.u_e);
  if (!std::isfinite(speed) || !(speed > 0.0))
    throw NumericalError("cfl_dt: non-finite or zero wave speed");
  return cfl * grid.h() / speed;
}

namespace detail {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

/// Thomas algorithm for a[k] x[k-1] + b[k] x[k] + c[k] x[k+1] = d[k].
inline void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b,
                              std::vector<double>& c, std::vector<double>& d) {
  const std::size_t n = d.size();
  for (std::size_t k = 1; k < n; ++k) {
    const double w = a[k] / b[k - 1];
    b[k] -= w * c[k - 1];
    d[k] -= w * d[k - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) d[k] = (d[k] - c[k] * d[k + 1]) / b[k];
}

struct FluidUpdate {
  std::vector<double> rho, u;
};

inline FluidUpdate advance_fluid(const std::vector<double>& rho, const std::vector<double>& u,
                                 const std::vector<double>& E, double sign, double t, double dt,
                                 const StepContext& ctx,
                                 const std::function<double(double, double)>* mass_src,
                                 const std::function<double(double, double)>* mom_src) {
  const Grid& g = ctx.grid;
  const std::size_t n = rho.size();
  const double h = g.h();
  const bool second = ctx.options.second_order;
  const auto [rho_right, u_right] = ctx.right(t + dt);

  FluidUpdate out;
  out.rho = rho;
  if (ctx.options.transport) {
    // Mass flux through faces k+1/2 with upwinded density.
    std::vector<double> flux(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double uf = 0.5 * (u[k] + u[k + 1]);
      double rf;
      if (uf >= 0.0) {
        rf = rho[k];
        if (second && k >= 1) rf += 0.5 * minmod(rho[k] - rho[k - 1], rho[k + 1] - rho[k]);
      } else {
        rf = rho[k + 1];
        if (second && k + 2 < n) rf -= 0.5 * minmod(rho[k + 1] - rho[k], rho[k + 2] - rho[k + 1]);
      }
      flux[k] = uf * rf;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) out.rho[k] = rho[k] - dt / h * (flux[k] - flux[k - 1]);
    // Outflow wall: both fluids leave through x = 0, so the one-sided difference
    // looks into the domain.
    out.rho[0] = rho[0] - dt / h * (rho[1] * u[1] - rho[0] * u[0]);
    out.rho[n - 1] = rho_right;
  }
  if (mass_src && *mass_src) {
    for (std::size_t k = 0; k + 1 < n; ++k) out.rho[k] += dt * (*mass_src)(g.x(k), t);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(out.rho[k] >= kMinDensity) || !std::isfinite(out.rho[k])) {
      std::ostringstream msg;
      msg << "positivity failure: density " << out.rho[k] << " at x = " << g.x(k)
          << ", t = " << t + dt;
      throw PositivityFailure(msg.str(), t + dt, k);
    }
  }

  // Explicit part of the momentum equation in velocity form.
  std::vector<double> rhs(n);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    double acc = 0.0;
    if (ctx.options.transport) {
      double du;
      if (u[k] > 0.0) {
        du = (u[k] - u[k - 1]) / h;
        if (second && k >= 2)
          du += 0.5 * minmod(u[k] - u[k - 1], u[k + 1] - u[k]) / h -
                0.5 * minmod(u[k - 1] - u[k - 2], u[k] - u[k - 1]) / h;
      } else {
        du = (u[k + 1] - u[k]) / h;
        if (second && k + 2 < n)
          du += 0.5 * minmod(u[k] - u[k - 1], u[k + 1] - u[k]) / h -
                0.5 * minmod(u[k + 1] - u[k], u[k + 2] - u[k + 1]) / h;
      }
      const double dp = pressure_derivative(ctx.gas, rho[k]) * (rho[k + 1] - rho[k - 1]) / (2.0 * h);
      acc = u[k] * du + dp / rho[k] - sign * E[k];
    }
    double src = 0.0;
    if (mom_src && *mom_src) src = (*mom_src)(g.x(k), t) / rho[k];
    rhs[k] = u[k] - dt * acc + dt * src;
  }

  // Backward-Euler viscosity with Dirichlet ends.
  std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0);
  rhs[0] = ctx.u_b;
  rhs[n - 1] = u_right;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double nu = dt / (out.rho[k] * h * h);
    a[k] = -nu;
    b[k] = 1.0 + 2.0 * nu;
    c[k] = -nu;
  }
  detail::solve_tridiagonal(a, b, c, rhs);
  rhs[0] = ctx.u_b;
  out.u = std::move(rhs);
  return out;
}

}  // namespace detail

/// Advances one time level. Uses `field` when given (stale-field refresh policy is
/// the caller's), otherwise solves the Poisson equation from the current densities.
inline FluidState step(const FluidState& s, const StepContext& ctx, double dt,
                       const FieldState* field = nullptr) {
  if (!(dt > 0.0)) throw PreconditionViolation("step: dt must be > 0");
  if (s.size() != ctx.grid.size()) throw PreconditionViolation("step: state/grid size mismatch");
  if (ctx.options.transport) {
    const double limit = cfl_dt(s, ctx.grid, ctx.gas, ctx.options.cfl);
    if (dt > limit * (1.0 + 1e-9))
      throw CflViolation("step: dt exceeds the CFL limit");
  }
  FieldState fresh;
  if (!field) {
    fresh = poisson_field(s.rho_i, s.rho_e, ctx.grid);
    field = &fresh;
  }
  const Forcing* f = ctx.forcing;
  auto ions = detail::advance_fluid(s.rho_i, s.u_i, field->E, +1.0, s.t, dt, ctx,
                                    f ? &f->mass_i : nullptr, f ? &f->momentum_i : nullptr);
  auto electrons = detail::advance_fluid(s.rho_e, s.u_e, field->E, -1.0, s.t, dt, ctx,
                                         f ? &f->mass_e : nullptr, f ? &f->momentum_e : nullptr);
  FluidState next;
  next.rho_i = std::move(ions.rho);
  next.u_i = std::move(ions.u);
  next.rho_e = std::move(electrons.rho);
  next.u_e = std::move(electrons.u);
  next.t = s.t + dt;
  return next;
}

/// Right boundary driven by the composite wave.
inline RightBoundary composite_right_boundary(const CompositeWave& cw, double length) {
  return [&cw, length](double t) {
    const CompositeValue v = cw.evaluate(length, t);
    return std::pair<double, double>{v.rho, v.u};
  };
}

/// Compactly supported initial perturbation added to the composite at t = 0.
struct PerturbationSpec {
  double amplitude = 0.0;  // peak amplitude a
  double h1_norm = 0.0;    // > 0: rescale to this discrete H1 norm instead
  double center = 10.0;    // left end c of the support [c, c + w]
  double width = 20.0;
  std::string shape = "bump";    // bump | wavy
  std::string target = "rho_i";  // comma list of rho_i, u_i, rho_e, u_e
  std::uint64_t seed = 1;

  void validate() const {
    if (amplitude < 0.0) throw PreconditionViolation("perturbation: amplitude must be >= 0");
    if (h1_norm < 0.0) throw PreconditionViolation("perturbation: h1_norm must be >= 0");
    if (!(width > 0.0)) throw PreconditionViolation("perturbation: width must be > 0");
    if (center < 0.0)
      throw PreconditionViolation("perturbation: support must start at x >= 0 "
                                  "(compatibility u(0) = u_b)");
    if (shape != "bump" && shape != "wavy")
      throw PreconditionViolation("perturbation: unknown shape '" + shape + "'");
    for (const auto& t : targets())
      if (t != "rho_i" && t != "u_i" && t != "rho_e" && t != "u_e")
        throw PreconditionViolation("perturbation: unknown target '" + t + "'");
  }

  std::vector<std::string> targets() const {
    std::vector<std::string> out;
    std::stringstream ss(target);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
    return out;
  }

  bool active() const { return amplitude > 0.0 || h1_norm > 0.0; }

  /// Unit-amplitude profile on the grid.
  std::vector<double> unit_profile(const Grid& grid) const {
    double phase = 0.0;
    if (shape == "wavy") {
      std::mt19937_64 rng(seed);
      phase = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    }
    std::vector<double> f(grid.size(), 0.0);
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double s = (grid.x(k) - center) / width;
      if (s <= 0.0 || s >= 1.0) continue;
      const double env = std::sin(std::numbers::pi * s);
      f[k] = env * env;
      if (shape == "wavy") f[k] *= std::cos(6.0 * std::numbers::pi * s + phase);
    }
    return f;
  }
};

struct InitialData {
  FluidState state;
  double perturbation_h1 = 0.0;  // discrete H1 norm of [phi_i, psi_i, phi_e, psi_e]
  double amplitude = 0.0;        // peak amplitude actually applied
};

inline InitialData initial_data(const CompositeWave& cw, const PerturbationSpec& spec,
                                const Grid& grid) {
  grid.validate();
  spec.validate();
  if (spec.active() && spec.center + spec.width > grid.length)
    throw PreconditionViolation("perturbation: support exceeds the domain");
  const std::size_t n = grid.size();
  InitialData out;
  FluidState& s = out.state;
  s.rho_i.resize(n);
  s.u_i.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const CompositeValue v = cw.evaluate(grid.x(k), 0.0);
    s.rho_i[k] = v.rho;
    s.u_i[k] = v.u;
  }
  s.u_i[0] = cw.boundary().u_b;
  s.rho_e = s.rho_i;
  s.u_e = s.u_i;
  s.t = 0.0;
  if (!spec.active()) return out;

  const std::vector<double> unit = spec.unit_profile(grid);
  const auto targets = spec.targets();
  const double unit_h1 = std::sqrt(static_cast<double>(targets.size()) * h1_norm_squared(unit, grid.h()));
  double a = spec.amplitude;
  if (spec.h1_norm > 0.0) {
    if (!(unit_h1 > 0.0)) throw PreconditionViolation("perturbation: profile vanishes on the grid");
    a = spec.h1_norm / unit_h1;
  }
  for (const auto& t : targets) {
    std::vector<double>& field = t == "rho_i" ? s.rho_i : t == "u_i" ? s.u_i : t == "rho_e" ? s.rho_e : s.u_e;
    for (std::size_t k = 0; k < n; ++k) field[k] += a * unit[k];
  }
  if (unit[0] != 0.0) throw PreconditionViolation("perturbation: nonzero at the wall");
  for (std::size_t k = 0; k < n; ++k)
    if (!(s.rho_i[k] >= kMinDensity && s.rho_e[k] >= kMinDensity))
      throw PreconditionViolation("perturbation: makes a density non-positive");
  out.amplitude = a;
  out.perturbation_h1 = a * unit_h1;
  return out;
}

}  // namespace nspbl
