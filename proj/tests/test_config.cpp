#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thermodamage/driver.hpp"

using namespace thermodamage;

namespace {

// Line and column of the error raised by parse_config(text).
std::pair<int, int> error_at(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return {e.line, e.column};
  }
  return {0, 0};
}

}  // namespace

TEST(Config, PresetsRoundTrip) {
  for (const char* name : {"sens-notch", "zero", "mms-elastic", "mms-heat"}) {
    const auto c = preset_config(name);
    const auto text = serialize_config(c);
    EXPECT_EQ(parse_config(text), c) << name;
    EXPECT_EQ(serialize_config(parse_config(text)), text) << name;
    EXPECT_EQ(parse_config(std::string("preset = ") + name + "\n"), c) << name;
  }
}

TEST(Config, DoublesSurviveRoundTrip) {
  auto c = preset_config("zero");
  c.material.kappa = 0.1 + 0.2;
  c.material.Gc = 1.0 / 3.0;
  c.time.T = 5e-324;
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, OverridesAfterPreset) {
  const auto c = parse_config(
      "preset = sens-notch\n"
      "[mesh]\n"
      "n = 8   # coarse\n"
      "[time]\n"
      "T = 0.05\n"
      "M = 50\n"
      "[bc]\n"
      "theta.notch_front = neumann const(100)\n"
      "phi.left = dirichlet const(0.5)\n");
  EXPECT_EQ(c.mesh.n, 8);
  EXPECT_EQ(c.time.M, 50);
  EXPECT_EQ(c.material.gamma0, 1e4);
  ASSERT_EQ(c.bc.size(), 4u);
  EXPECT_EQ(c.bc[2].values[0], "const(100)");
  EXPECT_EQ(c.bc[3].field, "phi");
}

TEST(Config, ErrorPositions) {
  EXPECT_EQ(error_at("[mesh]\nn = abc\n"), std::make_pair(2, 5));
  EXPECT_EQ(error_at("[mesh]\nn = 4x\n"), std::make_pair(2, 6));
  EXPECT_EQ(error_at("\n\n[mesh]\n  colour = red\n").first, 4);
  EXPECT_EQ(error_at("[meshes]\n"), std::make_pair(1, 2));
  EXPECT_EQ(error_at("[mesh\n").first, 1);
  EXPECT_EQ(error_at("[mesh]\nn\n"), std::make_pair(2, 1));
  EXPECT_EQ(error_at("[data]\nf_x = sinsin(1\n").first, 2);
  EXPECT_EQ(error_at("[bc]\nu.left = dirichlet zero\n").first, 2);
  EXPECT_EQ(error_at("[bc]\nu.left = clamp zero zero\n"), std::make_pair(2, 10));
}

TEST(Config, UnknownEntriesRejected) {
  EXPECT_THROW(parse_config("preset = bogus\n"), ConfigError);
  EXPECT_THROW(parse_config("[time]\nT = 1\npreset = zero\n"), ConfigError);
  EXPECT_THROW(parse_config("n = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("[data]\ngamma = wobble(1)\n"), ConfigError);
  EXPECT_THROW(parse_config("[data]\ngamma = const(1, 2)\n"), ConfigError);
  EXPECT_THROW(parse_config("[data]\ngamma = free\n"), ConfigError);
  EXPECT_NO_THROW(parse_config("[bc]\nu.left = dirichlet free zero\n"));
  EXPECT_THROW(parse_config("[solver]\nline_search = sometimes\n"), ConfigError);
  EXPECT_THROW(parse_config("[output]\nvtk = maybe\n"), ConfigError);
  EXPECT_THROW(preset_config("bogus"), std::invalid_argument);
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "thermodamage_test_config.cfg";
  {
    std::ofstream os(path);
    os << serialize_config(preset_config("mms-heat"));
  }
  EXPECT_EQ(load_config(path.string()), preset_config("mms-heat"));
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), std::runtime_error);
}

TEST(Catalog, FunctionValues) {
  const CatalogContext ctx{ModelParams{}, TimeGrid::from_steps(1.0, 10)};
  const Point x{0.25, 0.5};
  EXPECT_EQ(make_function("zero", ctx)(x, 0.3), 0.0);
  EXPECT_EQ(make_function("const(2.5)", ctx)(x, 0.3), 2.5);
  EXPECT_NEAR(make_function("monomial(3, 2, 1)", ctx)(x, 0.0), 3.0 * 0.0625 * 0.5, 1e-15);
  EXPECT_NEAR(make_function("sinsin(2)", ctx)(x, 0.0), 2.0 * std::sin(M_PI / 4), 1e-15);
  EXPECT_NEAR(make_function("ramp(2)", ctx)(x, 0.3), 0.6, 1e-15);
  EXPECT_NEAR(make_function("step_ramp(1e-5)", ctx)(x, 0.3), 3e-5, 1e-18);
  EXPECT_FALSE(static_cast<bool>(make_function("free", ctx)));
  EXPECT_THROW(make_function("nothing", ctx), std::invalid_argument);
}

TEST(Driver, BuildProblemFromSensNotch) {
  auto c = preset_config("sens-notch");
  c.mesh.n = 8;
  const auto pr = build_problem(c);
  EXPECT_NEAR(pr.params.ell, 2.0 * pr.h, 1e-15);
  EXPECT_EQ(pr.params.moduli.mu, 13.33e9);
  EXPECT_NEAR(pr.C_ell, 2.0 * 13.33e9, 1.0);
  EXPECT_EQ(pr.grid.M, 200);
  EXPECT_EQ(pr.bc.u.size(), 2u);
  EXPECT_EQ(pr.bc.theta.size(), 1u);
  EXPECT_EQ(pr.bc.theta[0].kind, BCKind::neumann);
  c.analysis.ellipticity = "inverse";
  EXPECT_NEAR(build_problem(c).C_ell, 1.0 / (2.0 * 13.33e9), 1e-25);
}

TEST(Driver, MmsHeatErrorsShrink) {
  double prev_l2 = 0.0, prev_h1 = 0.0;
  for (int n : {4, 8}) {
    auto c = preset_config("mms-heat");
    c.mesh.n = n;
    const auto tr = run_problem(build_problem(c));
    ASSERT_FALSE(tr.failed) << tr.failure;
    const auto e = exact_errors("mms-heat", tr);
    EXPECT_EQ(e.field, "theta");
    if (prev_l2 > 0.0) {
      EXPECT_GT(prev_l2 / e.l2, 3.0);
      EXPECT_GT(prev_h1 / e.h1, 1.7);
    }
    prev_l2 = e.l2;
    prev_h1 = e.h1;
  }
  EXPECT_THROW(exact_errors("none", run_problem(build_problem(preset_config("zero")))), std::invalid_argument);
}

TEST(Config, ShippedExamplesParse) {
  const std::filesystem::path dir = std::filesystem::path(THERMODAMAGE_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".cfg") continue;
    ++count;
    RunConfig c;
    ASSERT_NO_THROW(c = load_config(e.path().string())) << e.path();
    EXPECT_NO_THROW(build_problem(c)) << e.path();
  }
  EXPECT_GE(count, 5);
  EXPECT_EQ(load_config((dir / "sens-notch.cfg").string()), preset_config("sens-notch"));
}
