#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nspbl/config.hpp"

using namespace nspbl;

TEST(Config, EmptyTextIsCanonicalPreset) {
  const RunConfig c = parse_config("  \n");
  EXPECT_EQ(c.preset, "caseIV-2");
  EXPECT_DOUBLE_EQ(c.gas.A, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.gas.gamma, 3.0);
  EXPECT_DOUBLE_EQ(c.far_field.rho_plus, 1.0);
  EXPECT_DOUBLE_EQ(c.far_field.u_plus, 0.2);
  EXPECT_DOUBLE_EQ(c.boundary.u_b, -0.8);
  EXPECT_EQ(c.rarefaction.q, 10);
  EXPECT_DOUBLE_EQ(c.rarefaction.eps, 0.1);
  EXPECT_DOUBLE_EQ(c.grid.length, 400.0);
  EXPECT_EQ(c.grid.cells, 4000);
  EXPECT_DOUBLE_EQ(c.solver.cfl, 0.5);
  EXPECT_DOUBLE_EQ(c.perturbation.h1_norm, 0.01);
  EXPECT_EQ(c.perturbation.target, "rho_i,u_i");
}

TEST(Config, InflowWallRejected) {
  try {
    parse_config(R"({"boundary": {"u_b": 0.5}})");
    FAIL() << "expected rejection";
  } catch (const PreconditionViolation& e) {
    EXPECT_NE(std::string(e.what()).find("outflow"), std::string::npos);
  }
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config(R"({"colour": 1})"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"gas": {"gama": 2}})"), ConfigurationError);
  EXPECT_THROW(parse_config(R"({"gas": {"gamma": "three"}})"), ConfigurationError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigurationError);
  EXPECT_THROW(parse_config("{oops"), ConfigurationError);
}

TEST(Config, RoundTrip) {
  RunConfig c = parse_config(R"({"grid": {"L": 250, "N": 1250}, "solver": {"t_final": 50},
                                 "perturbation": {"shape": "wavy", "seed": 9}})");
  const std::string once = serialize_config(c);
  const RunConfig again = parse_config(once);
  EXPECT_EQ(serialize_config(again), once);
  EXPECT_DOUBLE_EQ(again.grid.length, 250.0);
  EXPECT_EQ(again.grid.cells, 1250);
  EXPECT_EQ(again.perturbation.shape, "wavy");
  EXPECT_EQ(again.perturbation.seed, 9u);
}

TEST(Config, TruncationRule) {
  // w+ = 1.2, so t_final = 300 needs L > 1.2 * 301 / 0.8.
  EXPECT_THROW(parse_config(R"({"solver": {"t_final": 300}})"), ConfigurationError);
  EXPECT_NO_THROW(parse_config(R"({"solver": {"t_final": 300}, "grid": {"L": 460, "N": 4600}})"));
}

TEST(Config, NonCompositeDataRejected) {
  // u_b > u*: no layer attaches to the transonic point.
  EXPECT_THROW(parse_config(R"({"boundary": {"u_b": -0.2}})"), ConfigurationError);
  EXPECT_NO_THROW(parse_config(R"({"boundary": {"u_b": -0.2}})", false));
}

TEST(Presets, ClassifyAsNamed) {
  const RunConfig iv = preset("caseIV-2");
  EXPECT_EQ(classify(iv.gas, iv.far_field, iv.boundary).tag, WaveCase::IV_2);

  const RunConfig iii = preset("caseIII-2");
  const Classification cls = classify(iii.gas, iii.far_field, iii.boundary);
  EXPECT_EQ(cls.tag, WaveCase::III_2);
  ASSERT_TRUE(cls.transonic);
  EXPECT_NEAR(cls.transonic->u_star, -0.55, 1e-12);

  for (const auto& name : preset_names()) EXPECT_NO_THROW(preset(name).validate()) << name;
}

TEST(Presets, Degeneracies) {
  const RunConfig pr = preset("pure-rarefaction");
  const TransonicPoint tp = transonic_point(pr.gas, pr.far_field);
  EXPECT_NEAR(pr.boundary.u_b, tp.u_star, 1e-12);

  const RunConfig pb = preset("pure-boundary-layer");
  EXPECT_NEAR(pb.far_field.u_plus + sound_speed(pb.gas, pb.far_field.rho_plus), 0.0, 1e-12);

  const RunConfig qn = preset("quasineutral-sanity");
  EXPECT_FALSE(qn.perturbation.active());
}

TEST(Presets, UnknownNameThrows) { EXPECT_THROW(preset("caseV"), ConfigurationError); }

TEST(Config, LoadFromFileWithPreset) {
  const auto path = std::filesystem::temp_directory_path() / "nspbl_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"preset": "caseIII-2", "grid": {"N": 2000}})";
  }
  const RunConfig c = load_config(path.string());
  EXPECT_EQ(c.preset, "caseIII-2");
  EXPECT_DOUBLE_EQ(c.far_field.u_plus, -0.1);
  EXPECT_EQ(c.grid.cells, 2000);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), ConfigurationError);
}
