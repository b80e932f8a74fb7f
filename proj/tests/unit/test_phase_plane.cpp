#include <gtest/gtest.h>

#include <random>

#include "nspbl/phase_plane.hpp"
#include "oracles.hpp"

using namespace nspbl;

TEST(TransonicPoint, Canonical) {
  const TransonicPoint tp = transonic_point(GasParameters{}, FarField{});
  EXPECT_NEAR(tp.rho_star, 0.4, 1e-12);
  EXPECT_NEAR(tp.u_star, -0.4, 1e-12);
  EXPECT_NEAR(tp.v_star, 2.5, 1e-12);
  EXPECT_NEAR(tp.c_star, 0.4, 1e-12);
  EXPECT_NEAR(oracle::transonic_volume(1.0 / 3.0, 3.0, 1.0, 0.2), 2.5, 1e-10);
}

TEST(TransonicPoint, GammaTwo) {
  const GasParameters p{1.0, 2.0, 1.0};
  const TransonicPoint tp = transonic_point(p, {1.0, 0.2});
  const double c_star = (2.0 * std::sqrt(2.0) - 0.2) / 3.0;
  EXPECT_NEAR(tp.c_star, c_star, 1e-14);
  EXPECT_NEAR(tp.c_star, 0.8761424, 1e-7);
  EXPECT_NEAR(tp.rho_star, 0.3838127, 1e-7);
  EXPECT_NEAR(tp.u_star, -c_star, 1e-14);
  EXPECT_NEAR(tp.v_star, oracle::transonic_volume(1.0, 2.0, 1.0, 0.2), 1e-10 * tp.v_star);
}

TEST(TransonicPoint, TransonicFarFieldIsFixedPoint) {
  const TransonicPoint tp = transonic_point(GasParameters{}, {1.0, -1.0});
  EXPECT_NEAR(tp.rho_star, 1.0, 1e-14);
  EXPECT_NEAR(tp.u_star, -1.0, 1e-14);
}

TEST(TransonicPoint, AgreesWithBisectionOnRandomDraws) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> g(1.05, 3.0), a(0.1, 2.0), r(0.2, 5.0), s(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const GasParameters p{a(rng), g(rng), 1.0};
    const double rho_plus = r(rng);
    // Admissible: -C+ < u+ < 2 C+ / (gamma - 1).
    const double hi = std::min(2.0, 0.95 * 2.0 / (p.gamma - 1.0));
    const double u_plus = (-0.9 + (hi + 0.9) * s(rng)) * sound_speed(p, rho_plus);
    const TransonicPoint tp = transonic_point(p, {rho_plus, u_plus});
    const double v_ref = oracle::transonic_volume(p.A, p.gamma, rho_plus, u_plus);
    EXPECT_NEAR(tp.v_star, v_ref, 1e-10 * v_ref) << "draw " << k;
    EXPECT_NEAR(tp.u_star + sound_speed(p, tp.rho_star), 0.0, 1e-10);
    EXPECT_NEAR(tp.rho_star * tp.v_star, 1.0, 1e-14);
    EXPECT_LT(tp.u_star, 0.0);
  }
}

TEST(TransonicPoint, NoIntersection) {
  EXPECT_THROW(transonic_point(GasParameters{}, {1.0, -1.5}), ClassificationError);
}

TEST(Classify, Examples) {
  const GasParameters p;
  const Classification c = classify(p, {1.0, 0.2}, {-0.8});
  EXPECT_EQ(c.tag, WaveCase::IV_2);
  ASSERT_TRUE(c.transonic && c.rho_b);
  EXPECT_NEAR(*c.rho_b, 0.2, 1e-14);
  EXPECT_EQ(classify(p, {1.0, 0.2}, {-0.2}).tag, WaveCase::IV_1);
  EXPECT_EQ(classify(p, {1.0, -1.0}, {-2.0}).tag, WaveCase::II);
  const Classification c3 = classify(p, {1.0, -0.1}, {-0.8});
  EXPECT_EQ(c3.tag, WaveCase::III_2);
  EXPECT_NEAR(c3.transonic->rho_star, 0.55, 1e-14);
  EXPECT_NEAR(c3.transonic->u_star, -0.55, 1e-14);
  EXPECT_EQ(classify(p, {1.0, -0.1}, {-0.3}).tag, WaveCase::III_1);
  EXPECT_EQ(to_string(WaveCase::III_2), "III-2");
}

TEST(Classify, TieAtTransonicPointIsSubcaseOne) {
  EXPECT_EQ(classify(GasParameters{}, {1.0, 0.2}, {-0.4}).tag, WaveCase::IV_1);
}

TEST(Classify, ShockBranchesUnsupported) {
  const GasParameters p;
  EXPECT_EQ(classify(p, {1.0, -2.0}, {-3.0}).tag, WaveCase::I);
  EXPECT_EQ(classify(p, {1.0, -2.0}, {-1.0}).tag, WaveCase::Unsupported);
  EXPECT_EQ(classify(p, {1.0, -0.5}, {-0.2}).tag, WaveCase::Unsupported);
}

TEST(Classify, OutflowPrecondition) {
  EXPECT_THROW(classify(GasParameters{}, FarField{}, {0.0}), PreconditionViolation);
  EXPECT_THROW(classify(GasParameters{}, FarField{}, {0.5}), PreconditionViolation);
}

TEST(Classify, TagStableWithinThresholdIntervals) {
  const GasParameters p;
  for (double ub : {-0.41, -0.6, -1.0, -5.0}) EXPECT_EQ(classify(p, {1.0, 0.2}, {ub}).tag, WaveCase::IV_2);
  for (double ub : {-0.39, -0.2, -1e-3}) EXPECT_EQ(classify(p, {1.0, 0.2}, {ub}).tag, WaveCase::IV_1);
}

TEST(BoundaryDensity, Examples) {
  const TransonicPoint tp{2.5, 0.4, -0.4, 0.4};
  EXPECT_NEAR(boundary_density(tp, {-0.8}), 0.2, 1e-15);
  EXPECT_NEAR(boundary_density(tp, {-1.6}), 0.1, 1e-15);
  EXPECT_NEAR(boundary_density(tp, {-0.4 - 1e-9}), 0.4, 1e-8);
  EXPECT_THROW(boundary_density(tp, {-0.4}), ConfigurationError);
  EXPECT_THROW(boundary_density(tp, {-0.1}), ConfigurationError);
  const double rb = boundary_density(tp, {-0.73});
  EXPECT_NEAR(rb * -0.73, tp.rho_star * tp.u_star, 1e-16);
}

TEST(WaveStrengths, Examples) {
  const GasParameters p;
  const TransonicPoint tp = transonic_point(p, FarField{});
  const WaveStrengths w = wave_strengths(tp, FarField{}, {-0.8}, p);
  EXPECT_NEAR(w.delta_tilde, 0.4, 1e-14);
  EXPECT_NEAR(w.delta_r, 1.2, 1e-14);
  EXPECT_NEAR(w.delta_bar, 1.2, 1e-14);
  EXPECT_EQ(wave_strengths(tp, FarField{}, {tp.u_star}, p).delta_tilde, 0.0);
  const FarField transonic{tp.rho_star, tp.u_star};
  const WaveStrengths d = wave_strengths(transonic_point(p, transonic), transonic, {-0.8}, p);
  EXPECT_NEAR(d.delta_r, 0.0, 1e-15);
  EXPECT_NEAR(d.delta_bar, 0.0, 1e-15);
}

TEST(PhasePlaneCurves, PassThroughTheirStates) {
  const GasParameters p;
  const TransonicPoint tp = transonic_point(p, FarField{});
  EXPECT_NEAR(r2_curve_velocity(p, 1.0, 0.2, tp.v_star), tp.u_star, 1e-14);
  EXPECT_NEAR(transonic_line_velocity(p, tp.v_star), tp.u_star, 1e-14);
  EXPECT_NEAR(boundary_line_velocity(tp.v_star, tp.u_star, 5.0), -0.8, 1e-14);
  EXPECT_NEAR(s2_curve_velocity(p, 1.0, 0.2, 1.0), 0.2, 1e-15);
}

TEST(CompositeAdmissible, Cases) {
  const GasParameters p;
  EXPECT_TRUE(composite_admissible(p, {1.0, 0.2}, {-0.8}));
  EXPECT_TRUE(composite_admissible(p, {1.0, 0.2}, {-0.4}));
  EXPECT_FALSE(composite_admissible(p, {1.0, 0.2}, {-0.2}));
  EXPECT_TRUE(composite_admissible(p, {0.4, -0.4}, {-0.8}));
  EXPECT_FALSE(composite_admissible(p, {1.0, -2.0}, {-3.0}));
}
