#include <gtest/gtest.h>

#include "nlwave/config.hpp"

using namespace nlwave;

namespace {

std::string error_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsApplied) {
  const RunConfig cfg = parse_config("[model]\nq = 3\n[experiment]\n");
  EXPECT_DOUBLE_EQ(cfg.get_real("integrator.dt"), 5e-4);
  EXPECT_EQ(cfg.get_int("integrator.steps"), 20000);
  EXPECT_DOUBLE_EQ(cfg.get_real("model.w"), 0.0);
  EXPECT_EQ(cfg.get_text("state.kind"), "symmetric");
  EXPECT_EQ(cfg.get_uint("experiment.seed"), cfg.get_uint("run.seed"));
}

TEST(Config, SeedsInheritMasterSeed) {
  const RunConfig cfg = parse_config("[model]\nq = 3\n[run]\nseed = 77\n[state]\nseed = 5\n");
  EXPECT_EQ(cfg.get_uint("model.k_seed"), 77u);
  EXPECT_EQ(cfg.get_uint("experiment.seed"), 77u);
  EXPECT_EQ(cfg.get_uint("state.seed"), 5u);
}

TEST(Config, EvenQRejected) {
  EXPECT_NE(error_of("[model]\nq = 4\n").find("odd"), std::string::npos);
  EXPECT_NE(error_of("[model]\nq = 15\n"), "");
}

TEST(Config, MissingQRejected) { EXPECT_NE(error_of("[model]\nw = 1\n").find("q"), std::string::npos); }

TEST(Config, UnknownKeyNamesLine) {
  const std::string err = error_of("[model]\nq = 3\nfoo = 1\n");
  EXPECT_NE(err.find("foo"), std::string::npos);
  EXPECT_NE(err.find("3"), std::string::npos);
  EXPECT_NE(error_of("[nosuch]\nq = 3\n"), "");
}

TEST(Config, TypeMismatchRejected) {
  EXPECT_NE(error_of("[model]\nq = 3\nw = fast\n").find("w"), std::string::npos);
  EXPECT_NE(error_of("[model]\nq = 3.5\n"), "");
  EXPECT_NE(error_of("[model]\nq = 3\n[experiment]\ndetm = maybe\n"), "");
}

TEST(Config, DuplicateKeyRejected) { EXPECT_NE(error_of("[model]\nq = 3\nq = 5\n"), ""); }

TEST(Config, OverridesApply) {
  const RunConfig cfg = parse_config("[model]\nq = 3\n", {"model.w=2.0", "integrator.steps=10"});
  EXPECT_DOUBLE_EQ(cfg.get_real("model.w"), 2.0);
  EXPECT_EQ(cfg.get_int("integrator.steps"), 10);
  EXPECT_NE(cfg.to_text().find("w = 2"), std::string::npos);
  EXPECT_NE(error_of("[model]\nq = 3\n", {"model.nope=1"}), "");
  EXPECT_NE(error_of("[model]\nq = 3\n", {"garbage"}), "");
}

TEST(Config, CommentsAndQuotes) {
  const RunConfig cfg = parse_config("# top\n[model]\nq = 3 # spins\nk = \"identity\"\n");
  EXPECT_EQ(cfg.get_text("model.k"), "identity");
}

TEST(Config, CanonicalTextRoundTrips) {
  const RunConfig a = parse_config("[model]\nq = 5\nw = 0.1\n[state]\nkind = random\n[experiment]\nw_grid = 0,0.5,1\n",
                                   {"run.seed=9"});
  const RunConfig b = parse_config(a.to_text());
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.to_text(), b.to_text());
}

TEST(Config, BuildersProduceModelAndState) {
  const RunConfig cfg = parse_config("[model]\nq = 3\nw = 2\n");
  const SpinModel model = model_from_config(cfg);
  EXPECT_EQ(model.space.n, 8);
  EXPECT_DOUBLE_EQ(model.w, 2.0);
  const WaveState st = state_from_config(cfg, model.space);
  EXPECT_NEAR(st.norm_squared(), 1.0, 1e-14);
  EXPECT_NEAR(st.p.squaredNorm(), 0.1, 1e-14);
  EXPECT_EQ(integrator_from_config(cfg).steps, 20000);
}

TEST(Config, RawStateAndWGrid) {
  const RunConfig cfg = parse_config(
      "[model]\nq = 1\n[state]\nkind = raw\nq_values = 3,0\np_values = 0,4\n[experiment]\nw_min = 0\nw_max = 1\nw_points = 5\n");
  const WaveState st = state_from_config(cfg, model_from_config(cfg).space);
  EXPECT_NEAR(st.q(0), 0.6, 1e-15);
  EXPECT_NEAR(st.p(1), 0.8, 1e-15);
  const auto grid = w_grid_from_config(cfg);
  ASSERT_EQ(grid.size(), 5u);
  EXPECT_DOUBLE_EQ(grid[2], 0.5);
  const RunConfig listed = parse_config("[model]\nq = 1\n[experiment]\nw_grid = 0.25,2\n");
  EXPECT_EQ(w_grid_from_config(listed), (std::vector<double>{0.25, 2.0}));
}
