#include <gtest/gtest.h>

#include <Eigen/LU>

#include "nlwave/rng.hpp"
#include "nlwave/stability.hpp"

using namespace nlwave;

namespace {

SpinModel random_model(std::uint64_t seed, double w) { return make_model(3, kbuild::RandomSpd{seed, 0.5, 2.0}, w); }

WaveState beta_state(const SpinConfigSpace& space, double beta = 0.1) {
  const Vector f = config_function(space, "s");
  return make_symmetric_state(space, f, f, beta);
}

bool passed(const std::vector<NamedCheck>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return c.passed;
  ADD_FAILURE() << "missing check " << name;
  return false;
}

// Closed form recomputed from u, v, E with Eigen's LU.
double oracle_closed(const BlockPieces& bp) {
  const Eigen::PartialPivLU<Matrix> lu(bp.e);
  const double x = bp.v.dot(lu.solve(bp.v));
  const double y = bp.v.dot(lu.solve(bp.u));
  const double z = bp.u.dot(lu.solve(bp.u));
  const double de = lu.determinant();
  return de * de * (1 - z) * (1 - x - y * y / (1 - z));
}

}  // namespace

TEST(BlockPieces, ShapeAndDefinitions) {
  const SpinModel model = random_model(3, 1.5);
  const WaveState st = random_state(model.space, 4);
  const BlockPieces bp = nonlinear_pieces(st, model);
  const Vector u = 2 * std::sqrt(1.5) * model.space.s.cwiseProduct(st.p);
  const Vector v = 2 * std::sqrt(1.5) * model.space.s.cwiseProduct(st.q);
  EXPECT_LT((bp.u - u).norm(), 1e-14);
  EXPECT_LT((bp.v - v).norm(), 1e-14);
  EXPECT_LT((bp.b - (bp.e - u * u.transpose())).norm(), 1e-13);
  EXPECT_LT((bp.c - (-bp.e + v * v.transpose())).norm(), 1e-13);
  EXPECT_LT((bp.d + bp.a).norm(), 1e-15);
  EXPECT_THROW(nonlinear_pieces(st, model.with_w(-1.0)), DomainError);
}

TEST(BlockPieces, ClosedFormMatchesLu) {
  Rng rng(1);
  int used = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const SpinModel model = random_model(i + 1, rng.uniform(0.0, 4.0));
    const WaveState st = random_state(model.space, 5000 + i);
    const BlockPieces bp = nonlinear_pieces(st, model);
    const double z = finite_xyz(bp).z;
    if (std::abs(1 - z) <= 1e-6) continue;
    ++used;
    const double ref = bp.composed().partialPivLu().determinant();
    const double got = closed_form_det(bp);
    ASSERT_LE(std::abs(got - ref), 1e-8 * std::max(std::abs(ref), 1e-300)) << "draw " << i;
    EXPECT_LE(std::abs(oracle_closed(bp) - got), 1e-8 * std::abs(got));
  }
  EXPECT_GT(used, 900);
}

TEST(BlockPieces, DegenerateZRaises) {
  // hand-built pieces with z = uᵗE⁻¹u = 1
  BlockPieces bp;
  bp.e = Matrix::Identity(2, 2);
  bp.u = Vector::Unit(2, 0);
  bp.v = Vector::Unit(2, 1);
  EXPECT_THROW(closed_form_det(bp), DegenerateUpdateError);
}

TEST(Dci, ComposedAtWEqualsHessianAtHalfWWhenPParallelQ) {
  // with P ∥ Q the corner blocks u⊗v are symmetric and the two matrices are conjugate up to block signs
  Rng rng(5);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const double w = 0.1 * static_cast<double>(i);
    const SpinModel model = random_model(i + 7, w);
    const Vector q = rng.gaussian_vector(model.space.n);
    const WaveState st = make_state(q, rng.gaussian() * q);
    const double composed = linalg::lu_determinant(nonlinear_pieces(st, model).composed());
    const double half = hessian_m(st, model.with_w(w / 2)).partialPivLu().determinant();
    EXPECT_LE(std::abs(composed - half), 1e-9 * std::abs(half)) << "w=" << w;
  }
}

TEST(Dci, ComposedDiffersFromHessianForGenericStates) {
  const SpinModel model = random_model(3, 1.0);
  const WaveState st = random_state(model.space, 31);
  const double composed = linalg::lu_determinant(nonlinear_pieces(st, model).composed());
  const double half = linalg::lu_determinant(hessian_m(st, model.with_w(0.5)));
  EXPECT_GT(std::abs(composed - half), 1e-6 * std::abs(half));
}

TEST(Dci, LinearModelDeterminantIsDetKSquared) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const SpinModel model = random_model(100 + i, 0.0);
    const WaveState st = random_state(model.space, 400 + i);
    const DciVerdict v = det_m(st, model);
    const double dk = model.k.partialPivLu().determinant();
    EXPECT_LE(std::abs(v.det_direct - dk * dk), 1e-8 * dk * dk);
    EXPECT_FALSE(v.holds);
  }
}

TEST(Dci, NegativeDeterminantImpliesMixedRealParts) {
  int hits = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const SpinModel model = random_model(i + 1, 0.25 * static_cast<double>(i % 16));
    const WaveState st = random_state(model.space, 700 + i);
    const DciVerdict v = det_m(st, model);
    std::complex<double> det = 1.0;
    for (const auto& z : v.spectrum) det *= z;
    EXPECT_LE(std::abs(det.real() - v.det_direct), 1e-6 * std::abs(v.det_direct));
    if (v.holds) {
      ++hits;
      EXPECT_TRUE(has_mixed_real_parts(v.spectrum));
    }
  }
  EXPECT_GT(hits, 0);
}

TEST(Sufficiency, TheoremTwoIsExactForComposedSign) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    const SpinModel model = random_model(i + 1, 0.1 * static_cast<double>(i % 40));
    const WaveState st = random_state(model.space, 900 + i);
    const BlockPieces bp = nonlinear_pieces(st, model);
    const auto checks = sufficiency_report(bp, model.k);
    const bool neg = linalg::lu_determinant(bp.composed()) < 0;
    const bool top = passed(checks, "theorem2_top"), bottom = passed(checks, "theorem2_bottom");
    EXPECT_EQ(neg, top || bottom) << "draw " << i;
    if (passed(checks, "E_positive_definite")) {
      EXPECT_TRUE(passed(checks, "cauchy_schwarz"));
    }
    if (passed(checks, "corollary2_1")) {
      EXPECT_TRUE(neg);
    }
    if (passed(checks, "corollary2_2")) {
      EXPECT_TRUE(neg);
    }
    if (passed(checks, "lemma1_hypothesis")) {
      EXPECT_TRUE(passed(checks, "lemma1_conclusion"));
    }
    if (passed(checks, "lemma2_hypothesis")) {
      EXPECT_TRUE(passed(checks, "lemma2_conclusion"));
    }
    if (passed(checks, "top1") && passed(checks, "top2")) {
      EXPECT_TRUE(passed(checks, "corollary2_3_necessary"));
    }
  }
}

TEST(Sufficiency, CorollariesAtLargeW) {
  const SpinModel model = make_model(3, kbuild::FlipGraph{}, 2.0);
  const WaveState st = beta_state(model.space);
  const auto checks = sufficiency_report(nonlinear_pieces(st, model), model.k);
  EXPECT_TRUE(passed(checks, "corollary2_1"));
  EXPECT_TRUE(passed(checks, "corollary2_2"));
  EXPECT_TRUE(passed(checks, "theorem2_top"));
}

TEST(Theorem3, IllustrativeExampleLimits) {
  // S = 0 gives x∞ = 4ΣQ², z∞ = 4ΣP², y∞ = 4ΣQP
  const auto space = enumerate_configs(3);
  for (double beta : {0.05, 0.1, 0.2}) {
    const WaveState st = beta_state(space, beta);
    const XyzQuantities xyz = asymptotic_xyz(st, space);
    EXPECT_NEAR(xyz.x_inf, 4 * (1 - beta), 1e-12);
    EXPECT_NEAR(xyz.z_inf, 4 * beta, 1e-12);
    EXPECT_NEAR(xyz.y_inf, 4 * std::sqrt(beta * (1 - beta)), 1e-12);
    EXPECT_TRUE(theorem3_predict(st, space).predicted_unstable);
  }
}

TEST(Theorem3, LargeSpinRejected) {
  const auto space = enumerate_configs(3);
  Vector q = Vector::Zero(space.n), p = Vector::Zero(space.n);
  q(space.n - 1) = 1.0;  // S = 1.5
  const WaveState st{q, p};
  EXPECT_THROW(asymptotic_xyz(st, space), PreconditionError);
  EXPECT_FALSE(theorem3_predict(st, space).predicted_unstable);
}

TEST(Wstar, BracketsSignChange) {
  const SpinModel model = make_model(3, kbuild::FlipGraph{}, 0.0);
  const WaveState st = beta_state(model.space);
  const WstarResult r = wstar_search(st, model, 50.0);
  ASSERT_TRUE(r.wstar.has_value());
  EXPECT_LE(*r.wstar, 50.0);
  const double below = linalg::lu_determinant(hessian_m(st, model.with_w(*r.wstar - 1e-3)));
  const double above = linalg::lu_determinant(hessian_m(st, model.with_w(*r.wstar + 1e-3)));
  EXPECT_GT(below, 0);
  EXPECT_LT(above, 0);
  EXPECT_EQ(r.grid.size(), r.grid_det.size());
  const DciVerdict v = det_m(st, model.with_w(2 * *r.wstar));
  EXPECT_TRUE(v.holds);
  EXPECT_TRUE(has_mixed_real_parts(v.spectrum));
}

TEST(Wstar, NoCrossingInLinearOnlyRange) {
  const SpinModel model = make_model(3, kbuild::FlipGraph{}, 0.0);
  const WaveState st = beta_state(model.space);
  EXPECT_FALSE(wstar_search(st, model, 0.2).wstar.has_value());
}

TEST(DciSeries, LengthAndFirstValue) {
  const SpinModel model = make_model(3, kbuild::FlipGraph{}, 2.0);
  const WaveState st = beta_state(model.space);
  IntegratorConfig cfg;
  cfg.steps = 200;
  cfg.record_stride = 20;
  const DciSeries s = dci_time_series(st, model, cfg);
  ASSERT_EQ(s.times.size(), 11u);
  EXPECT_NEAR(s.det_m[0], linalg::lu_determinant(hessian_m(st, model)), 1e-9 * std::abs(s.det_m[0]));
}

TEST(Dci, MixedRealPartsHelper) {
  EXPECT_TRUE(has_mixed_real_parts({{1.0, 0.0}, {-1.0, 0.0}}));
  EXPECT_FALSE(has_mixed_real_parts({{0.0, 1.0}, {0.0, -1.0}}));
}
