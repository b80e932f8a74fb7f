#pragma once

// Composite wave [rho_hat, u_hat] = [rho_bl, u_bl](x) + [rho_r, u_r](x, t) - [rho*, u*]
// and the residuals f_hat, g_hat it leaves in the quasineutral Navier-Stokes system:
//   rho_hat_t + (rho_hat u_hat)_x = f_hat,
//   rho_hat (u_hat_t + u_hat u_hat_x) + P(rho_hat)_x = u_hat_xx + g_hat.

#include <cmath>

#include "nspbl/boundary_layer.hpp"
#include "nspbl/errors.hpp"
#include "nspbl/gas_model.hpp"
#include "nspbl/phase_plane.hpp"
#include "nspbl/rarefaction.hpp"

namespace nspbl {

struct CompositeValue {
  double rho = 0.0, u = 0.0;
  double rho_x = 0.0, u_x = 0.0;
  double rho_xx = 0.0, u_xx = 0.0;
  double rho_t = 0.0, u_t = 0.0;
  double u_xt = 0.0;
  double f_hat = 0.0, g_hat = 0.0;
  double f_hat_x = 0.0;
  BoundaryLayerValue bl;
  RarefactionValue rf;
};

class CompositeWave {
 public:
  CompositeWave() = default;
  CompositeWave(const GasParameters& p, const FarField& ff, const BoundaryData& bd,
                const TransonicPoint& tp, BoundaryLayerProfile bl, SmoothRarefaction rf)
      : gas_(p), ff_(ff), bd_(bd), tp_(tp), bl_(std::move(bl)), rf_(std::move(rf)) {}

  const GasParameters& gas() const { return gas_; }
  const FarField& far_field() const { return ff_; }
  const BoundaryData& boundary() const { return bd_; }
  const TransonicPoint& transonic() const { return tp_; }
  const BoundaryLayerProfile& boundary_layer() const { return bl_; }
  const SmoothRarefaction& rarefaction() const { return rf_; }

  CompositeValue evaluate(double x, double t) const {
    return assemble(bl_.evaluate(x), rf_.evaluate(x, t));
  }

  /// Same as evaluate() with the time-independent layer supplied by the caller.
  CompositeValue evaluate(const BoundaryLayerValue& b, double x, double t) const {
    return assemble(b, rf_.evaluate(x, t));
  }

  /// Target of the stability theorem: layer + exact centred fan - transonic state.
  RarefactionState exact_target(double x, double t) const {
    const BoundaryLayerValue b = bl_.evaluate(x);
    const RarefactionState r = exact_rarefaction_state(gas_, tp_, ff_, x / t);
    return {b.rho + r.rho - tp_.rho_star, b.u + r.u - tp_.u_star};
  }

 private:
  CompositeValue assemble(const BoundaryLayerValue& b, const RarefactionValue& r) const {
    CompositeValue c;
    c.bl = b;
    c.rf = r;
    const double rs = tp_.rho_star, us = tp_.u_star;
    c.rho = b.rho + (r.rho - rs);
    c.u = b.u + (r.u - us);
    c.rho_x = b.rho_x + r.rho_x;
    c.u_x = b.u_x + r.u_x;
    c.rho_xx = b.rho_xx + r.rho_xx;
    c.u_xx = b.u_xx + r.u_xx;
    c.rho_t = r.rho_t;
    c.u_t = r.u_t;
    c.u_xt = r.u_xt;

    const double dub = b.u - us, drb = b.rho - rs;  // layer deviations
    const double dur = r.u - us, drr = r.rho - rs;  // fan deviations
    c.f_hat = b.rho_x * dur + b.u_x * drr + r.rho_x * dub + r.u_x * drb;
    c.f_hat_x = b.rho_xx * dur + b.rho_x * r.u_x + b.u_xx * drr + b.u_x * r.rho_x +
                r.rho_xx * dub + r.rho_x * b.u_x + r.u_xx * drb + r.u_x * b.rho_x;
    const double dp_hat = pressure_derivative(gas_, c.rho);
    c.g_hat = -r.u_xx + b.u * b.u_x * drr + c.rho * (b.u_x * dur + r.u_x * dub) +
              b.rho_x * (dp_hat - pressure_derivative(gas_, b.rho)) +
              r.rho_x * (dp_hat - pressure_derivative(gas_, r.rho)) -
              pressure_derivative(gas_, r.rho) / r.rho * r.rho_x * drb;
    return c;
  }

  GasParameters gas_;
  FarField ff_;
  BoundaryData bd_;
  TransonicPoint tp_;
  BoundaryLayerProfile bl_;
  SmoothRarefaction rf_;
};

/// Builds the layer and the fan for data whose transonic point exists with u_b <= u*.
inline CompositeWave build_composite(const GasParameters& p, const FarField& ff,
                                     const BoundaryData& bd, const RarefactionParams& rp) {
  p.validate();
  ff.validate();
  bd.validate();
  rp.validate();
  if (!composite_admissible(p, ff, bd))
    throw ClassificationError("build_composite: data admit no boundary-layer/rarefaction "
                              "composite (need a transonic point with u_b <= u*)");
  const TransonicPoint tp = transonic_point(p, ff);
  BoundaryLayerProfile bl = solve_boundary_layer(p, tp, bd);
  SmoothRarefaction rf(p, tp, ff, rp);
  return CompositeWave(p, ff, bd, tp, std::move(bl), std::move(rf));
}

/// Residual sources of the composite at (x, t).
struct SourceValues {
  double f_hat = 0.0;
  double g_hat = 0.0;
};

inline SourceValues source_terms(const CompositeWave& cw, double x, double t) {
  const CompositeValue v = cw.evaluate(x, t);
  return {v.f_hat, v.g_hat};
}

inline CompositeValue composite_evaluate(const CompositeWave& cw, double x, double t) {
  return cw.evaluate(x, t);
}

}  // namespace nspbl
