#pragma once

// Smooth approximate 2-rarefaction wave.
//
// Burgers data are mollified by the regularized incomplete gamma function,
//   w0(x) = w- + delta_bar * P(q+1, eps x)   (x > 0),   w0(x) = w- (x <= 0),
// the Burgers solution is evaluated by characteristics, and the result is mapped
// onto the R2 curve through the far field by u + C(rho) = w together with constancy
// of the 2-Riemann invariant. Physical time t is evaluated at Burgers time 1 + t.

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "nspbl/errors.hpp"
#include "nspbl/gas_model.hpp"
#include "nspbl/phase_plane.hpp"

namespace nspbl {

struct RarefactionParams {
  int q = 10;
  double eps = 0.1;

  /// Normalizer C_q = 1 / Gamma(q+1).
  double c_q() const { return 1.0 / boost::math::tgamma(static_cast<double>(q) + 1.0); }

  void validate() const {
    if (q < 10) throw PreconditionViolation("rarefaction: mollifier exponent q must be >= 10");
    if (!(eps > 0.0 && eps <= 1.0))
      throw PreconditionViolation("rarefaction: steepness eps must lie in (0, 1]");
  }
};

/// w0(x) for the mollified Riemann data.
inline double mollified_initial_data(const RarefactionParams& rp, double w_minus, double w_plus,
                                     double x) {
  if (x <= 0.0 || w_plus == w_minus) return w_minus;
  return w_minus + (w_plus - w_minus) * boost::math::gamma_p(rp.q + 1.0, rp.eps * x);
}

namespace detail {
/// First and second x-derivatives of the mollified data.
inline void mollified_derivatives(const RarefactionParams& rp, double delta_bar, double x,
                                  double& d1, double& d2) {
  if (x <= 0.0 || delta_bar == 0.0) {
    d1 = d2 = 0.0;
    return;
  }
  const double y = rp.eps * x;
  const double q = rp.q;
  d1 = delta_bar * rp.eps * boost::math::gamma_p_derivative(q + 1.0, y);
  d2 = delta_bar * rp.eps * rp.eps * boost::math::gamma_p_derivative(q, y) * (q - y) / q;
}
}  // namespace detail

struct BurgersValue {
  double w = 0.0;
  double w_x = 0.0;
  double w_xx = 0.0;
  double w_t = 0.0;
  double w_xt = 0.0;
  double foot = 0.0;  // characteristic foot x0
};

/// Burgers solution with mollified data at Burgers time t_burgers >= 0, by
/// characteristics x = x0 + w0(x0) t. Nondecreasing data never cross, so the foot is
/// unique; it is found by Newton's method safeguarded by bisection.
inline BurgersValue burgers_evaluate(const RarefactionParams& rp, double w_minus, double w_plus,
                                     double x, double t_burgers) {
  if (t_burgers < 0.0) throw PreconditionViolation("burgers_evaluate: t must be >= 0");
  BurgersValue out;
  const double delta_bar = w_plus - w_minus;
  if (x <= w_minus * t_burgers || delta_bar == 0.0) {
    out.w = w_minus;
    out.foot = x - w_minus * t_burgers;
    return out;
  }
  double x0 = 0.0;
  if (t_burgers == 0.0) {
    x0 = x;
  } else {
    auto g = [&](double s) { return s + mollified_initial_data(rp, w_minus, w_plus, s) * t_burgers - x; };
    double lo = 0.0, hi = x - w_minus * t_burgers;
    // Start from the fan guess: x0 sits where the characteristic through x leaves.
    double s = std::clamp(hi - 0.5 * delta_bar * t_burgers, lo, hi);
    bool converged = false;
    double dx_old = hi - lo, dx = dx_old;
    for (int it = 0; it < 300; ++it) {
      const double gs = g(s);
      if (gs == 0.0) {
        converged = true;
        break;
      }
      if (gs < 0.0) lo = s; else hi = s;
      double d1 = 0.0, d2 = 0.0;
      detail::mollified_derivatives(rp, delta_bar, s, d1, d2);
      const double slope = 1.0 + d1 * t_burgers;
      double next = s - gs / slope;
      // Bisect when Newton leaves the bracket or stops halving the step.
      if (!(next > lo && next < hi) || std::abs(2.0 * gs) > std::abs(dx_old * slope)) {
        dx_old = dx;
        next = 0.5 * (lo + hi);
      } else {
        dx_old = dx;
      }
      dx = std::abs(next - s);
      s = next;
      if (dx <= 1e-14 * std::max(1.0, std::abs(s)) || hi - lo <= 1e-14 * std::max(1.0, s)) {
        converged = true;
        break;
      }
    }
    if (!converged || !std::isfinite(s))
      throw NumericalError("burgers_evaluate: characteristic foot did not converge");
    x0 = s;
  }
  double a = 0.0, b = 0.0;
  detail::mollified_derivatives(rp, delta_bar, x0, a, b);
  const double jac = 1.0 + a * t_burgers;
  out.foot = x0;
  out.w = mollified_initial_data(rp, w_minus, w_plus, x0);
  out.w_x = a / jac;
  out.w_xx = b / (jac * jac * jac);
  out.w_t = -out.w * out.w_x;
  out.w_xt = -(out.w_x * out.w_x + out.w * out.w_xx);
  return out;
}

struct RarefactionState {
  double rho = 0.0;
  double u = 0.0;
};

/// Point on the R2 curve through the far field with u + C(rho) = w.
/// Closed form: C = (gamma-1)/(gamma+1) (w - z+), u = w - C.
inline RarefactionState rarefaction_state(const GasParameters& p, const TransonicPoint& tp,
                                          const FarField& ff, double w) {
  const double w_minus = tp.u_star + tp.c_star;
  const double w_plus = ff.u_plus + sound_speed(p, ff.rho_plus);
  if (w < std::min(w_minus, 0.0) - 1e-10 || w > w_plus + 1e-10)
    throw DomainError("rarefaction_state: w outside [w-, w+]");
  const double z_plus = riemann_invariant_2(p, ff.rho_plus, ff.u_plus);
  const double c = (p.gamma - 1.0) / (p.gamma + 1.0) * (w - z_plus);
  return {density_from_sound_speed(p, c), w - c};
}

/// Exact centred fan evaluated at xi = x / t.
inline RarefactionState exact_rarefaction_state(const GasParameters& p, const TransonicPoint& tp,
                                                const FarField& ff, double xi) {
  const double w_plus = ff.u_plus + sound_speed(p, ff.rho_plus);
  if (xi <= 0.0) return {tp.rho_star, tp.u_star};
  if (xi >= w_plus) return {ff.rho_plus, ff.u_plus};
  return rarefaction_state(p, tp, ff, xi);
}

struct RarefactionValue {
  double w = 0.0, w_x = 0.0, w_xx = 0.0;
  double rho = 0.0, u = 0.0;
  double rho_x = 0.0, u_x = 0.0;
  double rho_xx = 0.0, u_xx = 0.0;
  double rho_t = 0.0, u_t = 0.0;
  double u_xt = 0.0;
};

class SmoothRarefaction {
 public:
  SmoothRarefaction() = default;
  SmoothRarefaction(const GasParameters& p, const TransonicPoint& tp, const FarField& ff,
                    const RarefactionParams& rp)
      : gas_(p), tp_(tp), ff_(ff), rp_(rp) {
    p.validate();
    rp.validate();
    w_plus_ = ff.u_plus + sound_speed(p, ff.rho_plus);
    z_plus_ = riemann_invariant_2(p, ff.rho_plus, ff.u_plus);
    if (w_plus_ < -1e-10) throw ClassificationError("SmoothRarefaction: w+ < w- = 0");
    w_plus_ = std::max(w_plus_, 0.0);
  }

  double w_minus() const { return 0.0; }
  double w_plus() const { return w_plus_; }
  double z_plus() const { return z_plus_; }
  const RarefactionParams& params() const { return rp_; }
  const TransonicPoint& transonic() const { return tp_; }

  /// Evaluate at physical (x, t); the Burgers profile is taken at time 1 + t.
  RarefactionValue evaluate(double x, double t) const {
    const BurgersValue b = burgers_evaluate(rp_, 0.0, w_plus_, x, 1.0 + t);
    return from_burgers(b);
  }

  RarefactionValue from_burgers(const BurgersValue& b) const {
    RarefactionValue v;
    v.w = b.w;
    v.w_x = b.w_x;
    v.w_xx = b.w_xx;
    const double g = gas_.gamma;
    const double k = (g - 1.0) / (g + 1.0);
    const double c = k * (b.w - z_plus_);
    v.u = b.w - c;
    v.rho = density_from_sound_speed(gas_, c);
    if (b.w == 0.0) {  // fan edge: the transonic state itself
      v.u = tp_.u_star;
      v.rho = tp_.rho_star;
    }
    const double cx = k * b.w_x, cxx = k * b.w_xx, ct = k * b.w_t;
    const double e = 2.0 / (g - 1.0);
    v.u_x = (1.0 - k) * b.w_x;
    v.u_xx = (1.0 - k) * b.w_xx;
    v.u_t = (1.0 - k) * b.w_t;
    v.u_xt = (1.0 - k) * b.w_xt;
    v.rho_x = e * v.rho * cx / c;
    v.rho_xx = v.rho * e * ((3.0 - g) / (g - 1.0) * (cx / c) * (cx / c) + cxx / c);
    v.rho_t = e * v.rho * ct / c;
    return v;
  }

 private:
  GasParameters gas_;
  TransonicPoint tp_;
  FarField ff_;
  RarefactionParams rp_;
  double w_plus_ = 0.0;
  double z_plus_ = 0.0;
};

}  // namespace nspbl
