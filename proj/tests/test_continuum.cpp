#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "nlwave/continuum.hpp"
#include "nlwave/io.hpp"

using namespace nlwave;
using namespace nlwave::continuum;

namespace {

Params params_for(int n) {
  Params p;
  p.n_bodies = n;
  return p;
}

// x̄ over the basis of degree ≤ cap + 1 from the ladder rule x|n> = √((n+1)/2)|n+1> + √(n/2)|n−1>,
// then R = X E⁻¹ X restricted to degree ≤ cap.
Matrix oracle_r(const Params& p, int cap) {
  const auto big = enumerate_basis(p.n_bodies, cap + 1);
  std::map<MultiIndex, Eigen::Index> at;
  for (std::size_t i = 0; i < big.size(); ++i) at[big[i]] = static_cast<Eigen::Index>(i);
  const Eigen::Index n = static_cast<Eigen::Index>(big.size());
  Matrix x = Matrix::Zero(n, n);
  const double scale = 1.0 / std::sqrt(p.mass * p.omega());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < p.n_bodies; ++k) {
      MultiIndex up = big[static_cast<std::size_t>(i)];
      up[static_cast<std::size_t>(k)] += 1;
      if (auto it = at.find(up); it != at.end()) {
        const double v = scale * std::sqrt(0.5 * up[static_cast<std::size_t>(k)]);
        x(i, it->second) = v;
        x(it->second, i) = v;
      }
    }
  }
  Vector inv_e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int d = 0;
    for (int c : big[static_cast<std::size_t>(i)]) d += c;
    inv_e(i) = 1.0 / (p.omega() * (d + 0.5 * p.n_bodies));
  }
  const Matrix r = x * inv_e.asDiagonal() * x;
  const Eigen::Index keep = static_cast<Eigen::Index>(enumerate_basis(p.n_bodies, cap).size());
  return r.topLeftCorner(keep, keep);
}

}  // namespace

TEST(Hermite, LowOrders) {
  EXPECT_DOUBLE_EQ(hermite_eval(0, 0.7), 1.0);
  EXPECT_DOUBLE_EQ(hermite_eval(1, 0.7), 1.4);
  EXPECT_NEAR(hermite_eval(3, 0.7), 8 * 0.343 - 12 * 0.7, 1e-14);
  EXPECT_THROW(hermite_eval(-1, 0.0), DomainError);
}

TEST(Hermite, EigenfunctionsOrthonormalAndLadder) {
  // trapezoid rule on [−12, 12]; the integrands decay like exp(−x²)
  const int m = 24001;
  const double a = -12, h = 24.0 / (m - 1);
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j <= 6; ++j) {
      double overlap = 0, xel = 0;
      for (int t = 0; t < m; ++t) {
        const double x = a + h * t;
        const double f = eigenfunction_1d(i, x) * eigenfunction_1d(j, x);
        overlap += f * h;
        xel += x * f * h;
      }
      EXPECT_NEAR(overlap, i == j ? 1.0 : 0.0, 1e-10);
      MultiIndex ni{i}, nj{j};
      EXPECT_NEAR(xel, xbar_element(ni, nj, params_for(1)), 1e-10);
    }
  }
}

TEST(Basis, CountAndOrder) {
  const auto b = enumerate_basis(3, 4);
  EXPECT_EQ(b.size(), 35u);  // C(4 + 3, 3)
  EXPECT_EQ(b.front(), (MultiIndex{0, 0, 0}));
  EXPECT_EQ(b[1], (MultiIndex{1, 0, 0}));
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LE(degree(b[i - 1]), degree(b[i]));
  EXPECT_THROW(enumerate_basis(8, 40), CapacityError);
}

TEST(Omega, GroundEntryHandDerived) {
  // x̄|0> has norm² N/(2mω) and lands on degree one, where H0 = ω(1 + N/2)
  EXPECT_NEAR(build_omega(params_for(2), 6).matrix.coeff(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(build_omega(params_for(3), 6).matrix.coeff(0, 0), 0.6, 1e-12);
}

TEST(Omega, EntriesMatchLadderOracle) {
  for (int n : {2, 3}) {
    const Params p = params_for(n);
    const auto op = build_omega(p, 8);
    const Matrix ref = oracle_r(p, 8);
    const Matrix dense = Matrix(op.matrix);
    EXPECT_LT((dense - ref).cwiseAbs().maxCoeff(), 1e-13) << "N=" << n;
  }
}

TEST(Omega, InteriorEntriesBoundedAndSymmetric) {
  for (int n : {2, 3}) {
    for (int cap = 6; cap <= 12; cap += 2) {
      const auto op = build_omega(params_for(n), cap);
      const Matrix blk = op.interior_block();
      EXPECT_LE(blk.cwiseAbs().maxCoeff(), 2.0);
      EXPECT_LT((blk - blk.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(Omega, NeighborCountsWithinBounds) {
  for (int n : {2, 3}) {
    const Params p = params_for(n);
    const auto op = build_omega(p, 8);
    for (std::size_t r : op.interior_rows()) {
      const NeighborCount c = neighbor_count(op.basis[r], p);
      EXPECT_GE(c.paths, n * (n + 1));
      EXPECT_LE(c.paths, 4 * n * n);
      EXPECT_LE(c.distinct, 2 * n * n + 1);
    }
    MultiIndex deep(static_cast<std::size_t>(n), 3);
    EXPECT_EQ(neighbor_count(deep, p).paths, 4 * n * n);
    EXPECT_EQ(neighbor_count(MultiIndex(static_cast<std::size_t>(n), 0), p).paths, n * (n + 1));
  }
}

TEST(Omega, NormBoundedAndNondecreasingInCap) {
  for (int n : {2, 3}) {
    double prev = 0;
    for (int cap = 6; cap <= 12; ++cap) {
      const double norm = operator_norm(build_omega(params_for(n), cap));
      EXPECT_LE(norm, 8.0 * n * n);
      EXPECT_GE(norm, prev - 1e-9);
      prev = norm;
    }
  }
}

TEST(Omega, PowerIterationMatchesEigenvalue) {
  const auto op = build_omega(params_for(2), 10);
  const Matrix blk = op.interior_block();
  Eigen::SelfAdjointEigenSolver<Matrix> es(blk);
  const double ref = es.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_NEAR(operator_norm(op), ref, 1e-8 * ref);
}

TEST(Omega, ParityBlocksDecouple) {
  const auto op = build_omega(params_for(3), 8);
  for (int k = 0; k < op.matrix.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(op.matrix, k); it; ++it) {
      if (it.value() == 0.0) continue;
      EXPECT_EQ((degree(op.basis[static_cast<std::size_t>(it.row())]) -
                 degree(op.basis[static_cast<std::size_t>(it.col())])) % 2,
                0);
    }
  }
  const Vector a = example_coeffs(op.basis, 3);
  const auto whole = quadratic_form(op, a);
  const auto even = quadratic_form(op, restrict_parity(op, a, Parity::even));
  const auto odd = quadratic_form(op, restrict_parity(op, a, Parity::odd));
  EXPECT_NEAR(whole.value, even.value + odd.value, 1e-13 * whole.value);
  EXPECT_EQ(parity_subset(op.basis, Parity::even).size() + parity_subset(op.basis, Parity::odd).size(),
            op.basis.size());
}

TEST(Omega, TheoremFiveRatioSettlesAcrossCaps) {
  for (int n : {2, 3}) {
    std::vector<double> ratios;
    for (int cap = 6; cap <= 12; cap += 2) {
      const auto op = build_omega(params_for(n), cap);
      ratios.push_back(quadratic_form(op, example_coeffs(op.basis, n)).ratio);
    }
    for (std::size_t i = 1; i < ratios.size(); ++i) EXPECT_GT(ratios[i], ratios[i - 1]);
    for (std::size_t i = 2; i < ratios.size(); ++i)
      EXPECT_LT(ratios[i] - ratios[i - 1], ratios[i - 1] - ratios[i - 2]) << "N=" << n;
    RecordProperty("ratio_N" + std::to_string(n), io::format_number(ratios.back()));
  }
}

TEST(Omega, QuadraticFormIgnoresBoundaryRows) {
  const auto op = build_omega(params_for(2), 6);
  Vector a = Vector::Zero(static_cast<Eigen::Index>(op.size()));
  for (std::size_t i = 0; i < op.size(); ++i)
    if (op.boundary[i]) a(static_cast<Eigen::Index>(i)) = 1.0;
  EXPECT_EQ(quadratic_form(op, a).norm_squared, 0.0);
}

TEST(Criteria, ScenarioAWindowAtTwoBodies) {
  Params p = params_for(2);
  p.w = 0.22;
  const CriteriaReport rep = scenario_a(p, 12);
  EXPECT_TRUE(rep.window_nonempty);
  EXPECT_NEAR(rep.window_upper, 0.25, 1e-15);  // (σ−1)v/(2N)
  EXPECT_NEAR(rep.window_lower, p.sigma / (4 * rep.omega_expectation), 1e-15);
  EXPECT_TRUE(rep.all_pass);
  p.w = 0.2;
  EXPECT_FALSE(scenario_a(p, 12).all_pass);
  p.w = 0.3;
  EXPECT_FALSE(scenario_a(p, 12).all_pass);
}

TEST(Criteria, SpinConstraintAppearsForNonzeroSpin) {
  Params p = params_for(2);
  p.w = 0.22;
  const CriteriaReport rep = criteria_check(p, 2.4, 3.0);
  const CriterionResult* ii = rep.find("ii");
  ASSERT_NE(ii, nullptr);
  EXPECT_NEAR(ii->bound, p.epsilon * p.omega() * p.n_bodies / (2 * 9.0), 1e-15);
  EXPECT_FALSE(ii->passed);
}

TEST(Criteria, ParamsValidated) {
  Params p;
  p.sigma = 1.0;
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_THROW(build_omega(params_for(2), 1), ValidationError);
}

TEST(Omega, CsvExport) {
  const auto op = build_omega(params_for(2), 4);
  const auto dir = std::filesystem::temp_directory_path() / "nlwave_omega_csv";
  std::filesystem::create_directories(dir);
  write_operator_csv(op, dir / "omega.csv", dir / "omega_basis.csv");
  const io::CsvTable t = io::read_csv_file(dir / "omega.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"i", "j", "value"}));
  EXPECT_EQ(t.columns[0].size(), static_cast<std::size_t>(op.matrix.nonZeros()));
  std::filesystem::remove_all(dir);
}
