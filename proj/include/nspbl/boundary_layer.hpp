#pragma once

// Degenerate stationary boundary layer connecting (rho_b, u_b) at the wall to the
// transonic state (rho*, u*) at infinity.
//
// Integrating the momentum equation once from x to infinity gives the first integral
//
//   u' = F(u) = m (u - u*) + P(m/u) - P(rho*),     m = rho* u*,
//
// whose right-hand side has a double zero at u* (transonic), so the approach to u*
// is algebraic: u* - u ~ 1 / (kappa x) with kappa = (gamma+1) rho* / 2.
// The ODE is integrated for the deficit d = u* - u > 0 (relative accuracy survives
// in the tail); once d < 1e-6 * delta the calibrated asymptote takes over.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "nspbl/errors.hpp"
#include "nspbl/gas_model.hpp"
#include "nspbl/phase_plane.hpp"

namespace nspbl {

struct BoundaryLayerValue {
  double u = 0.0;
  double rho = 0.0;
  double u_x = 0.0;
  double rho_x = 0.0;
  double u_xx = 0.0;
  double rho_xx = 0.0;
};

class BoundaryLayerProfile {
 public:
  /// Relative switch level d / delta below which the asymptote is used.
  static constexpr double kTailSwitch = 1e-6;

  BoundaryLayerProfile() = default;

  double u_b() const { return u_b_; }
  double rho_b() const { return rho_b_; }
  double u_star() const { return u_star_; }
  double rho_star() const { return rho_star_; }
  double mass_flux() const { return m_; }
  double strength() const { return u_star_ - u_b_; }
  bool trivial() const { return xs_.empty(); }
  double tail_start() const { return trivial() ? 0.0 : xs_.back(); }
  const std::vector<double>& nodes() const { return xs_; }
  /// Curvature of the first integral at u*: d' ~ -kappa d^2.
  double kappa() const { return 0.5 * (gas_.gamma + 1.0) * rho_star_; }

  /// Deficit u* - u(x) >= 0.
  double deficit(double x) const {
    if (trivial()) return 0.0;
    if (x <= 0.0) return ds_.front();
    if (x >= xs_.back()) return 1.0 / (kappa() * (x - tail_shift_));
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const double x0 = xs_[k], x1 = xs_[k + 1], h = x1 - x0;
    const double s = (x - x0) / h;
    const double d0 = ds_[k], d1 = ds_[k + 1];
    const double m0 = -rhs(d0) * h, m1 = -rhs(d1) * h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * d0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * d1 +
           (s3 - s2) * m1;
  }

  BoundaryLayerValue evaluate(double x) const {
    BoundaryLayerValue v;
    if (trivial()) {
      v.u = u_star_;
      v.rho = rho_star_;
      return v;
    }
    const double d = deficit(std::max(x, 0.0));
    v.u = u_star_ - d;
    v.rho = m_ / v.u;
    v.u_x = rhs(d);
    v.u_xx = rhs_slope(d) * v.u_x;
    v.rho_x = -m_ * v.u_x / (v.u * v.u);
    v.rho_xx = -m_ * (v.u_xx / (v.u * v.u) - 2.0 * v.u_x * v.u_x / (v.u * v.u * v.u));
    return v;
  }

  /// F(u* - d), the first integral, written so the O(d) parts cancel analytically.
  double rhs(double d) const {
    if (d == 0.0) return 0.0;
    const double r = d / (u_star_ - d);  // (rho - rho*) / rho*
    return -m_ * d + p_star_ * std::expm1(gas_.gamma * std::log1p(r));
  }

  /// F'(u) = rho (|u| - C)(|u| + C) / u evaluated at u = u* - d.
  double rhs_slope(double d) const {
    if (d == 0.0) return 0.0;
    const double u = u_star_ - d;
    const double rho = m_ / u;
    const double r = d / (u_star_ - d);
    const double c_star = -u_star_;
    const double gap = d - c_star * std::expm1(0.5 * (gas_.gamma - 1.0) * std::log1p(r));
    const double c = sound_speed(gas_, rho);
    return rho * gap * (-u + c) / u;
  }

  /// int_0^inf f(x) dx for a function of the profile; Gauss-Legendre on ODE panels
  /// plus adaptive Gauss-Kronrod on the asymptotic tail.
  double integrate(const std::function<double(double)>& f) const {
    if (trivial()) return 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < xs_.size(); ++k)
      total += boost::math::quadrature::gauss<double, 7>::integrate(f, xs_[k], xs_[k + 1]);
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, xs_.back(), std::numeric_limits<double>::infinity(), 15, 1e-12);
    return total;
  }

  friend BoundaryLayerProfile solve_boundary_layer(const GasParameters&, const TransonicPoint&,
                                                   const BoundaryData&, double, double);

 private:
  GasParameters gas_;
  double u_b_ = 0.0, rho_b_ = 0.0, u_star_ = 0.0, rho_star_ = 0.0, m_ = 0.0, p_star_ = 0.0;
  std::vector<double> xs_, ds_;
  double tail_shift_ = 0.0;
};

/// Integrates the boundary layer from u(0) = u_b towards u*. With u_b == u* the
/// profile is the constant transonic state.
inline BoundaryLayerProfile solve_boundary_layer(
    const GasParameters& p, const TransonicPoint& tp, const BoundaryData& bd,
    double x_max = std::numeric_limits<double>::infinity(), double tol = 1e-11) {
  p.validate();
  bd.validate();
  BoundaryLayerProfile bl;
  bl.gas_ = p;
  bl.u_b_ = bd.u_b;
  bl.u_star_ = tp.u_star;
  bl.rho_star_ = tp.rho_star;
  bl.m_ = tp.rho_star * tp.u_star;
  bl.p_star_ = pressure(p, tp.rho_star);
  if (bd.u_b > tp.u_star + kThresholdTol)
    throw ConfigurationError("solve_boundary_layer: u_b > u*, no boundary layer to u*");
  if (bd.u_b >= tp.u_star) {
    bl.u_b_ = tp.u_star;
    bl.rho_b_ = tp.rho_star;
    return bl;
  }
  bl.rho_b_ = bl.m_ / bd.u_b;
  const double delta = tp.u_star - bd.u_b;

  // The first integral must be positive on (u_b, u*) for a monotone connection.
  constexpr int kProbe = 400;
  for (int i = 1; i <= kProbe; ++i) {
    const double d = delta * static_cast<double>(i) / kProbe;
    if (!(bl.rhs(d) > 0.0))
      throw ConfigurationError("solve_boundary_layer: first integral <= 0 on (u_b, u*); "
                               "(u_b, u*) is not on a boundary-layer curve");
  }

  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 1>;
  auto system = [&bl](const State& s, State& dsdx, double) { dsdx[0] = -bl.rhs(s[0]); };
  auto stepper = odeint::make_controlled(tol * 1e-3 * delta, tol,
                                         odeint::runge_kutta_dopri5<State>());
  State state{delta};
  double x = 0.0;
  double dx = 1e-3 / std::max(delta, 1e-3);
  bl.xs_.push_back(0.0);
  bl.ds_.push_back(delta);
  const double stop = BoundaryLayerProfile::kTailSwitch * delta;
  int rejected = 0;
  while (state[0] > stop && x < x_max) {
    const State before = state;
    const double x_before = x;
    if (stepper.try_step(system, state, x, dx) == odeint::fail) {
      if (++rejected > 10000) throw NumericalError("solve_boundary_layer: step size collapse");
      continue;
    }
    if (!(state[0] > 0.0) || state[0] > before[0]) {
      // Overshoot past u* or a non-monotone step: retry with a smaller step.
      dx = 0.25 * (x - x_before);
      state = before;
      x = x_before;
      continue;
    }
    bl.xs_.push_back(x);
    bl.ds_.push_back(state[0]);
    dx = std::min(dx, 0.5 * x + 1.0);
  }
  const double xs = bl.xs_.back(), d_s = bl.ds_.back();
  bl.tail_shift_ = xs - 1.0 / (bl.kappa() * d_s);
  return bl;
}

}  // namespace nspbl
