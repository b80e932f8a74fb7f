#include <gtest/gtest.h>

#include <cmath>

#include "nspbl/diagnostics.hpp"
#include "nspbl/run.hpp"
#include "oracles.hpp"

using namespace nspbl;

namespace {

struct Canonical {
  RunConfig cfg;
  CompositeWave cw;
  Canonical(double length, int cells) : cfg(preset("caseIV-2")) {
    cfg.grid = {length, cells};
    cw = build_composite(cfg.gas, cfg.far_field, cfg.boundary, cfg.rarefaction);
  }
  StepContext context() const {
    return {cfg.grid, cfg.gas, cfg.boundary.u_b, composite_right_boundary(cw, cfg.grid.length), cfg.solver,
            nullptr};
  }
};

}  // namespace

TEST(Perturbation, ZeroOnCompositeAndBumpOnIons) {
  Canonical s(100.0, 1000);
  const CompositeSampler sampler(s.cw, s.cfg.grid);
  const auto hat = sampler.sample(0.0);
  const FluidState base = initial_data(s.cw, PerturbationSpec{}, s.cfg.grid).state;
  const PerturbationFields zero = perturbation(base, hat);
  for (std::size_t k = 0; k < base.size(); ++k) {
    EXPECT_EQ(zero.phi_i[k], 0.0);
    EXPECT_EQ(zero.psi_e[k], 0.0);
  }
  PerturbationSpec bump;
  bump.amplitude = 0.01;
  const FluidState bumped = initial_data(s.cw, bump, s.cfg.grid).state;
  const PerturbationFields pf = perturbation(bumped, hat);
  const auto unit = bump.unit_profile(s.cfg.grid);
  for (std::size_t k = 0; k < base.size(); ++k) EXPECT_NEAR(pf.phi_i[k], 0.01 * unit[k], 1e-16);
  EXPECT_EQ(pf.psi_i[0], 0.0);
  EXPECT_EQ(pf.psi_e[0], 0.0);
}

TEST(Perturbation, WallTraceVanishesDuringRun) {
  Canonical s(100.0, 500);
  const CompositeSampler sampler(s.cw, s.cfg.grid);
  const StepContext ctx = s.context();
  FluidState st = initial_data(s.cw, s.cfg.perturbation, s.cfg.grid).state;
  for (int it = 0; it < 200; ++it) {
    st = step(st, ctx, cfl_dt(st, s.cfg.grid, s.cfg.gas, 0.5));
    const PerturbationFields pf = perturbation(st, sampler.sample(st.t));
    ASSERT_EQ(pf.psi_i[0], 0.0);
    ASSERT_EQ(pf.psi_e[0], 0.0);
  }
}

TEST(PerturbationSources, ReduceToCompositeSources) {
  Canonical s(100.0, 500);
  const CompositeSampler sampler(s.cw, s.cfg.grid);
  const auto hat = sampler.sample(3.0);
  FluidState st = initial_data(s.cw, PerturbationSpec{}, s.cfg.grid).state;
  for (std::size_t k = 0; k < st.size(); ++k) {
    st.rho_i[k] = st.rho_e[k] = hat[k].rho;
    st.u_i[k] = st.u_e[k] = hat[k].u;
  }
  const PerturbationSources src = perturbation_sources(s.cfg.gas, st, hat);
  for (std::size_t k = 0; k < st.size(); ++k) {
    EXPECT_EQ(src.f_i[k], hat[k].f_hat);
    EXPECT_NEAR(src.g_e[k], hat[k].g_hat, 1e-16);
  }
}

TEST(PerturbationSources, VanishOnConstantBackground) {
  // Transonic far field with u_b = u*: no layer and no fan.
  const GasParameters gas;
  const FarField ff{0.4, -0.4};
  const CompositeWave cw = build_composite(gas, ff, {-0.4}, RarefactionParams{});
  const Grid g{50.0, 100};
  const CompositeSampler sampler(cw, g);
  const auto hat = sampler.sample(5.0);
  const FluidState st = initial_data(cw, PerturbationSpec{}, g).state;
  const PerturbationSources src = perturbation_sources(gas, st, hat);
  for (std::size_t k = 0; k < st.size(); ++k) {
    EXPECT_EQ(src.f_i[k], 0.0);
    EXPECT_EQ(src.g_i[k], 0.0);
    EXPECT_EQ(src.f_e[k], 0.0);
    EXPECT_EQ(src.g_e[k], 0.0);
  }
}

TEST(PerturbationSources, MassEquationResidualIsFirstOrder) {
  // phi_t + u phi_x + rho psi_x + f = 0, with phi_t taken from two consecutive solver
  // levels. The residual is the scheme's truncation error.
  auto residual = [](int cells) {
    Canonical s(100.0, cells);
    const CompositeSampler sampler(s.cw, s.cfg.grid);
    const StepContext ctx = s.context();
    FluidState st = initial_data(s.cw, s.cfg.perturbation, s.cfg.grid).state;
    while (st.t < 2.0) st = step(st, ctx, std::min(cfl_dt(st, s.cfg.grid, s.cfg.gas, 0.5), 2.0 - st.t));
    const double dt = 0.5 * cfl_dt(st, s.cfg.grid, s.cfg.gas, 0.5);
    const FluidState next = step(st, ctx, dt);
    const auto hat = sampler.sample(st.t);
    const PerturbationFields a = perturbation(st, hat), b = perturbation(next, sampler.sample(next.t));
    const PerturbationSources src = perturbation_sources(s.cfg.gas, st, hat);
    const double h = s.cfg.grid.h();
    const auto dphi = central_difference(a.phi_i, h), dpsi = central_difference(a.psi_i, h);
    std::vector<double> r(st.size(), 0.0);
    for (std::size_t k = 1; k + 1 < st.size(); ++k)
      r[k] = (b.phi_i[k] - a.phi_i[k]) / dt + st.u_i[k] * dphi[k] + st.rho_i[k] * dpsi[k] + src.f_i[k];
    return l2_norm(r, h);
  };
  const double r1 = residual(500), r2 = residual(1000);
  EXPECT_LT(r2, r1);
  EXPECT_NEAR(std::log2(r1 / r2), 1.0, 0.3);
}

TEST(EnergyReport, ZeroPerturbation) {
  Canonical s(100.0, 500);
  const CompositeSampler sampler(s.cw, s.cfg.grid);
  const FluidState st = initial_data(s.cw, PerturbationSpec{}, s.cfg.grid).state;
  const FieldState f = poisson_field(st.rho_i, st.rho_e, s.cfg.grid);
  const EnergyReport r = energy_report(s.cfg.gas, st, f, sampler.sample(0.0), s.cfg.grid);
  EXPECT_EQ(r.energy_total, 0.0);
  EXPECT_EQ(r.cross_term, 0.0);
  EXPECT_EQ(r.diss_psi, 0.0);
  EXPECT_EQ(r.diss_weighted, 0.0);
  EXPECT_EQ(r.h1_total, 0.0);
  EXPECT_TRUE(r.sobolev_ok);
}

TEST(EnergyReport, DensityOnlyEnergyIsPotential) {
  Canonical s(100.0, 1000);
  const CompositeSampler sampler(s.cw, s.cfg.grid);
  PerturbationSpec bump;
  bump.amplitude = 0.02;
  bump.target = "rho_i,rho_e";
  const FluidState st = initial_data(s.cw, bump, s.cfg.grid).state;
  const auto hat = sampler.sample(0.0);
  const FieldState f = poisson_field(st.rho_i, st.rho_e, s.cfg.grid);
  const EnergyReport r = energy_report(s.cfg.gas, st, f, hat, s.cfg.grid);
  std::vector<double> eta(st.size());
  for (std::size_t k = 0; k < st.size(); ++k) {
    eta[k] = 2.0 * st.rho_i[k] * oracle::phi(s.cfg.gas.A, s.cfg.gas.gamma, st.rho_i[k], hat[k].rho);
    EXPECT_GE(eta[k], 0.0);
  }
  EXPECT_GT(r.energy_total, 0.0);
  EXPECT_NEAR(r.energy_total, trapezoid(eta, s.cfg.grid.h()), 1e-10 * r.energy_total);
}

TEST(EnergyReport, InitialEnergyConvergesUnderRefinement) {
  RunConfig c = preset("caseIV-2");
  auto energy = [&](int cells) {
    const Grid g{400.0, cells};
    const CompositeWave cw = build_composite(c.gas, c.far_field, c.boundary, c.rarefaction);
    const CompositeSampler sampler(cw, g);
    PerturbationSpec p = c.perturbation;
    p.h1_norm = 0.0;
    p.amplitude = 0.01;  // fixed amplitude so both grids carry the same function
    const FluidState st = initial_data(cw, p, g).state;
    return energy_report(c.gas, st, poisson_field(st.rho_i, st.rho_e, g), sampler.sample(0.0), g).energy_total;
  };
  const double coarse = energy(4000), fine = energy(8000);
  EXPECT_NEAR(coarse, fine, 0.01 * fine);
}

TEST(EnergyReport, SobolevBoundHoldsForSmoothProfiles) {
  const Grid g{100.0, 2000};
  Canonical s(100.0, 2000);
  const CompositeSampler sampler(s.cw, g);
  for (const char* shape : {"bump", "wavy"}) {
    PerturbationSpec p;
    p.amplitude = 0.01;
    p.shape = shape;
    p.target = "rho_i,u_i,rho_e,u_e";
    const FluidState st = initial_data(s.cw, p, g).state;
    const EnergyReport r =
        energy_report(s.cfg.gas, st, poisson_field(st.rho_i, st.rho_e, g), sampler.sample(0.0), g);
    EXPECT_GT(r.sobolev_ratio, 0.0);
    EXPECT_LE(r.sobolev_ratio, 2.05) << shape;
    EXPECT_TRUE(r.sobolev_ok);
  }
}

TEST(EnergyBudget, ModifiedEnergyIncrementsBoundedBySources) {
  // Resolved run (h = 0.05): the modified energy can only grow through the source
  // terms, so every unit-time increment is at most 1.05 times their integrated modulus.
  Canonical s(60.0, 1200);
  const CompositeSampler sampler(s.cw, s.cfg.grid);
  const StepContext ctx = s.context();
  FluidState st = initial_data(s.cw, s.cfg.perturbation, s.cfg.grid).state;
  auto measure = [&](const FluidState& x, double& energy, double& budget) {
    const FieldState f = poisson_field(x.rho_i, x.rho_e, s.cfg.grid);
    const auto hat = sampler.sample(x.t);
    energy = energy_report(s.cfg.gas, x, f, hat, s.cfg.grid).modified_energy;
    budget = source_budget(s.cfg.gas, x, f, hat, s.cfg.grid).abs_sum();
  };
  double e_mark, b_prev;
  measure(st, e_mark, b_prev);
  double integral = 0.0, next = 1.0;
  int checked = 0;
  while (st.t < 12.0) {
    const double dt = std::min(cfl_dt(st, s.cfg.grid, s.cfg.gas, 0.5), next - st.t);
    st = step(st, ctx, dt);
    if (std::abs(st.t - next) < 1e-9) st.t = next;
    double e, b;
    measure(st, e, b);
    integral += 0.5 * dt * (b + b_prev);
    b_prev = b;
    if (st.t == next) {
      EXPECT_LE(e - e_mark, 1.05 * integral) << "t = " << st.t;
      ++checked;
      e_mark = e;
      integral = 0.0;
      next += 1.0;
    }
  }
  EXPECT_EQ(checked, 12);
}

TEST(SourceBudget, VanishesWithoutPerturbation) {
  Canonical s(100.0, 500);
  const CompositeSampler sampler(s.cw, s.cfg.grid);
  const FluidState st = initial_data(s.cw, PerturbationSpec{}, s.cfg.grid).state;
  const SourceBudget b = source_budget(s.cfg.gas, st, poisson_field(st.rho_i, st.rho_e, s.cfg.grid),
                                       sampler.sample(0.0), s.cfg.grid);
  EXPECT_EQ(b.abs_sum(), 0.0);
}

TEST(TheoremMetrics, RoundTripAndPreconditions) {
  Canonical s(400.0, 4000);
  const Grid& g = s.cfg.grid;
  const CompositeSampler sampler(s.cw, g);
  const double t = 50.0;
  FluidState st;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const RarefactionState target = s.cw.exact_target(g.x(k), t);
    st.rho_i.push_back(target.rho);
    st.u_i.push_back(target.u);
  }
  st.rho_e = st.rho_i;
  st.u_e = st.u_i;
  st.t = t;
  const FieldState f = poisson_field(st.rho_i, st.rho_e, g);
  const TheoremMetrics m = theorem_metrics(st, f, sampler, t);
  EXPECT_EQ(m.sup_distance(), 0.0);
  EXPECT_EQ(m.sup_E, 0.0);
  EXPECT_THROW(theorem_metrics(st, f, sampler, 0.0), PreconditionViolation);
  st.u_e[100] += 1e-3;
  EXPECT_NEAR(theorem_metrics(st, f, sampler, t).sup_dist_u_e, 1e-3, 1e-15);
}

TEST(DecayFit, Examples) {
  const auto t = log_spaced(1.0, 1e3, 40);
  std::vector<double> inv, wobble, flat(t.size(), 3.0);
  for (double x : t) {
    inv.push_back(1.0 / x);
    wobble.push_back(std::pow(x, -0.5) * (1.0 + 0.01 * std::sin(x)));
  }
  const DecayFit a = decay_fit(t, inv);
  EXPECT_NEAR(a.exponent, -1.0, 1e-10);
  EXPECT_NEAR(a.r_squared, 1.0, 1e-12);
  EXPECT_EQ(a.samples, 40u);
  EXPECT_NEAR(decay_fit(t, wobble).exponent, -0.5, 0.02);
  EXPECT_NEAR(decay_fit(t, flat).exponent, 0.0, 1e-14);
  const DecayFit w = decay_fit(t, inv, 10.0, 1e3);
  EXPECT_GE(w.window_lo, 10.0);
  EXPECT_LE(w.window_hi, 1e3);
}

TEST(DecayFit, Errors) {
  const auto t = log_spaced(1.0, 1e3, 20);
  std::vector<double> v(t.size(), 1.0);
  v[5] = 0.0;
  EXPECT_THROW(decay_fit(t, v), PreconditionViolation);
  const std::vector<double> few_t = {1, 2, 3, 4, 5, 6, 7, 20}, few_v(8, 1.0);
  EXPECT_NO_THROW(decay_fit(few_t, few_v));
  EXPECT_THROW(decay_fit(std::vector<double>(few_t.begin(), few_t.end() - 1), std::vector<double>(7, 1.0)),
               PreconditionViolation);
  const auto narrow = log_spaced(1.0, 5.0, 20);
  EXPECT_THROW(decay_fit(narrow, std::vector<double>(20, 1.0)), PreconditionViolation);
  EXPECT_THROW(decay_fit(t, std::vector<double>(3, 1.0)), PreconditionViolation);
}

TEST(AppendixScaling, PreconditionsAndTrivialLayer) {
  const GasParameters gas;
  EXPECT_THROW(appendix_scaling_check(gas, {}, {}, {}, 0, 1.5), PreconditionViolation);
  EXPECT_THROW(appendix_scaling_check(gas, {}, {}, {}, 3, 2.0), PreconditionViolation);
  const AppendixScaling z = appendix_scaling_check(gas, {}, {}, {}, 0, 2.0, {0.0});
  ASSERT_EQ(z.layer_integrals.size(), 1u);
  EXPECT_EQ(z.layer_integrals[0], 0.0);
  EXPECT_EQ(z.expected_exponent, 1.0);
}

TEST(AppendixScaling, LayerIntegralMatchesQuadratureOverVelocity) {
  // int (u - u*)^2 dx = int (u - u*)^2 / F(u) du over (u_b, u*).
  const GasParameters gas;
  const TransonicPoint tp = transonic_point(gas, {});
  const BoundaryLayerProfile bl = solve_boundary_layer(gas, tp, {-0.8});
  const double ref = oracle::integrate(
      [&](double u) {
        return (u - tp.u_star) * (u - tp.u_star) / oracle::layer_slope(gas.A, gas.gamma, 0.4, -0.4, u);
      },
      -0.8, -0.4);
  EXPECT_NEAR(layer_power_integral(bl, 0, 2.0), ref, 1e-6 * ref);
}
