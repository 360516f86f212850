#pragma once

// Determinant criterion for instability (det M < 0).
//
// Two matrices are in play. The ground truth is the Jacobian M built from the
// analytic Hessian of the Hamiltonian (dynamics.hpp). The block-piece model
//   A = u⊗v, B = E − u⊗u, C = −E + v⊗v, D = −A,  E = K + diag(f)
// with u = 2√w s∘P, v = 2√w s∘Q supports the closed-form determinant
//   det = (det E)² (1 − z) (1 − x − y²/(1 − z)),
//   x = vᵗE⁻¹v, y = vᵗE⁻¹u, z = uᵗE⁻¹u,
// and the sufficient conditions built on it. The two matrices differ by
// factors of two in the nonlinear terms and in the orientation of the
// rank-one corner blocks, so the block-piece algebra is validated against its
// own composed matrix and its sign is compared with the Hessian per state.

#include <optional>
#include <string>
#include <vector>

#include "nlwave/dynamics.hpp"

namespace nlwave {

struct BlockPieces {
  Vector u, v, f;
  Matrix e, a, b, c, d;
  double spin = 0.0;

  Matrix composed() const { return linalg::compose_blocks(a, b, c, d); }
};

struct XyzQuantities {
  double x = 0.0, y = 0.0, z = 0.0;
  double x_inf = 0.0, y_inf = 0.0, z_inf = 0.0;
  double spin = 0.0;
};

struct NamedCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string note;
};

struct DciVerdict {
  double det_direct = 0.0;               // LU of the Hessian-derived M
  double det_composed = 0.0;             // LU of the block-piece matrix
  std::optional<double> det_closed;      // closed form, absent when B is singular
  bool holds = false;                    // det_direct < 0
  bool sign_agreement = false;           // sign(det_direct) == sign(det_composed)
  ComplexList spectrum;                  // eigenvalues of the Hessian-derived M
  std::vector<NamedCheck> checks;

  const NamedCheck* find(const std::string& name) const;
};

struct SufficiencyOptions {
  std::optional<double> eta;    // default: smallest eigenvalue of K + diag(f)
  std::optional<double> sigma;  // default: smallest σ satisfying diag(f) ≤ (σ−1)K
};

BlockPieces nonlinear_pieces(const WaveState& state, const SpinModel& model);

/// x, y, z at finite w from the pieces (E must be invertible).
XyzQuantities finite_xyz(const BlockPieces& pieces);

double closed_form_det(const BlockPieces& pieces);

DciVerdict det_m(const WaveState& state, const SpinModel& model);

/// Theorem 2, Corollaries 2.1–2.3, Lemmas 1–2 and the Cauchy–Schwarz bound.
std::vector<NamedCheck> sufficiency_report(const BlockPieces& pieces, const Matrix& k,
                                           const SufficiencyOptions& options = {});

/// w → ∞ limits of x, y, z. Requires |S| < 1/4 so that J = diag(s²) − 2S·diag(s) ≻ 0.
XyzQuantities asymptotic_xyz(const WaveState& state, const SpinConfigSpace& space);

struct Theorem3Prediction {
  bool normalized = false;
  bool spin_below_quarter = false;
  bool z_inf_below_one = false;
  bool product_form = false;  // (x∞ − 1)(1 − z∞) + y∞² > 1
  bool x_inf_above_one = false;
  bool predicted_unstable = false;
  XyzQuantities xyz;
};

Theorem3Prediction theorem3_predict(const WaveState& state, const SpinConfigSpace& space);

struct WstarOptions {
  int grid_points = 200;
  double tol = 1e-4;
};

struct WstarResult {
  std::optional<double> wstar;     // sup of the detected sign changes
  std::vector<double> crossings;   // every refined crossing, ascending
  std::vector<double> grid;        // scanned w values
  std::vector<double> grid_det;    // det M at each grid value
};

WstarResult wstar_search(const WaveState& state, const SpinModel& model_template, double w_max,
                         const WstarOptions& options = {});

struct DciSeries {
  std::vector<double> times;
  std::vector<double> det_m;
};

DciSeries dci_time_series(const WaveState& state, const SpinModel& model, const IntegratorConfig& cfg);

/// Flat "name=value" lines.
std::string format_verdict(const DciVerdict& verdict);

/// At least one eigenvalue with positive real part and one with negative real part.
bool has_mixed_real_parts(const ComplexList& spectrum, double tol = 1e-9);

}  // namespace nlwave
