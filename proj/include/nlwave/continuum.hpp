#pragma once

// Continuum N-body harmonic model in its Hermite eigenbasis.
//
//   H0 = −(1/2m)Δ + (v/2)Σx²,  ω = √(v/m),  E_n̄ = ω(‖n̄‖ + N/2)
//   x̄ = Σ x_k,  Ω = x̄ H0⁻¹ x̄,  R_{n̄,m̄} = <ψ_n̄|Ω|ψ_m̄>
//
// The truncated operator holds every index of total degree ≤ cap. Intermediate
// sums run to cap + 1, so every stored entry equals the untruncated value;
// rows above cap − 2 are missing couplings to indices outside the basis and
// are flagged as boundary rows.

#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlwave/linalg.hpp"

namespace nlwave::continuum {

struct Params {
  int n_bodies = 2;
  double mass = 1.0;
  double spring = 1.0;
  double w = 0.0;
  double sigma = 2.0;
  double epsilon = 0.5;

  double omega() const;
  void validate() const;
};

using MultiIndex = std::vector<int>;

int degree(const MultiIndex& n);

/// Physicists' Hermite polynomial H_n(x) by forward recurrence.
double hermite_eval(int n, double x);

/// Normalized 1-D oscillator eigenfunction ψ_n(x) for mass·ω = m_omega.
double eigenfunction_1d(int n, double x, double m_omega = 1.0);

double eigenvalue(const MultiIndex& n, const Params& params);

/// <ψ_n̄|x̄|ψ_m̄>: √(max(n_j, m_j)/2)/√(mω) if the indices differ by one in exactly one coordinate, else 0.
double xbar_element(const MultiIndex& n, const MultiIndex& m, const Params& params);

/// All multi-indices of length n_bodies with degree ≤ cap; degree ascending, then lexicographically descending.
std::vector<MultiIndex> enumerate_basis(int n_bodies, int cap);

inline constexpr std::size_t kMaxBasis = 200000;

struct TruncatedOperator {
  int n_bodies = 0;
  int degree_cap = 0;
  double omega_scale = 0.0;
  std::vector<MultiIndex> basis;
  std::vector<bool> boundary;  // true for rows with degree > cap − 2
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

  std::size_t size() const { return basis.size(); }
  std::optional<std::size_t> index_of(const MultiIndex& n) const;
  std::vector<std::size_t> interior_rows() const;
  /// Principal submatrix over interior rows, dense.
  Matrix interior_block() const;

  std::map<MultiIndex, std::size_t> lookup;
};

/// Throws CapacityError if the basis exceeds kMaxBasis. threads = 0 uses worker_count().
TruncatedOperator build_omega(const Params& params, int degree_cap, int threads = 0);

/// |Λ_n̄| counted as valid two-rung ladder paths (with multiplicity) and as distinct nonzero endpoints.
struct NeighborCount {
  int paths = 0;
  int distinct = 0;
};
NeighborCount neighbor_count(const MultiIndex& n, const Params& params);

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
};

inline constexpr double kPowerTol = 1e-10;
inline constexpr int kPowerMaxIterations = 10000;

/// Largest |eigenvalue| of a symmetric matrix by power iteration.
PowerIterationResult power_norm(const Matrix& x, double tol = kPowerTol, int max_iterations = kPowerMaxIterations);

/// Power-iteration norm of the interior block.
double operator_norm(const TruncatedOperator& op);

/// a_n̄ = Π_k 1/(n_k + N).
Vector example_coeffs(const std::vector<MultiIndex>& basis, int n_bodies);

/// min a_m̄/a_n̄ over interior n̄ and m̄ ∈ Λ_n̄ inside the basis.
double neighbor_ratio_bound(const TruncatedOperator& op, const Vector& coeffs);

struct QuadraticForm {
  double value = 0.0;         // aᵗRa over interior coefficients
  double norm_squared = 0.0;  // Σa² over interior coefficients
  double reference = 0.0;     // N(N+1)Σa²
  double ratio = 0.0;         // value / reference
  double expectation = 0.0;   // value / Σa², i.e. <ψ|Ω|ψ> for normalized ψ
};

/// Coefficients on boundary rows are dropped so every entry used is exact.
QuadraticForm quadratic_form(const TruncatedOperator& op, const Vector& coeffs);

enum class Parity { even, odd };

std::vector<MultiIndex> parity_subset(const std::vector<MultiIndex>& basis, Parity parity);

/// Coefficients zeroed outside the parity class.
Vector restrict_parity(const TruncatedOperator& op, const Vector& coeffs, Parity parity);

struct DispersionDebug {
  double alpha = 0.0;      // 1ᵗA⁻¹1
  double b_value = 0.0;    // B = −bᵗAb
  double b_tilde = 0.0;    // B·Π√a_k
  double c_value = 0.0;    // (σ−1)δN²Πa_k/(8m)
  double discriminant = 0.0;
  Vector a_eigenvalues;    // eigenvalues −a_k of A
};

struct CriterionResult {
  std::string name;
  bool passed = false;
  double bound = 0.0;
  std::string note;
};

struct CriteriaReport {
  double spin = 0.0;
  double omega_expectation = 0.0;
  double delta = 0.0;
  std::vector<CriterionResult> criteria;
  double window_lower = 0.0;
  double window_upper = 0.0;
  bool window_nonempty = false;
  bool all_pass = false;
  std::optional<DispersionDebug> debug;  // N ≤ 4 and δ > 0

  const CriterionResult* find(const std::string& name) const;
};

/// Criteria (i)–(v) at params.w for a real wavefunction with <ψ|Ω|ψ> = omega_expectation and spin S.
CriteriaReport criteria_check(const Params& params, double omega_expectation, double spin);

/// Scenario A: S = 0 with example coefficients restricted to one parity class.
CriteriaReport scenario_a(const Params& params, int degree_cap, Parity parity = Parity::even);

std::string format_report(const CriteriaReport& report);

/// CSV "i,j,value" over nonzero entries and a legend "index,multi_index".
void write_operator_csv(const TruncatedOperator& op, const std::filesystem::path& entries,
                        const std::filesystem::path& legend);

std::string format_multi_index(const MultiIndex& n);

}  // namespace nlwave::continuum
