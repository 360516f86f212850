#pragma once

// Hamiltonian of the nonlinear spin model, its gradient (the real dynamical
// system) and Hessian-derived Jacobian M, Tao's extended phase space
// integrator, and the Heun step for the tangent (Jacobian) flow.
//
//   H = ½PᵗKP + ½QᵗKQ + w{Σ(P²+Q²)s² − S²},  S = Σ s(Q² + P²)
//   dQ/dt =  ∂H/∂P = KP + 2fP,   dP/dt = −∂H/∂Q = −KQ − 2fQ,   f = w s (s − 2S)

#include <optional>
#include <vector>

#include "nlwave/spin_model.hpp"

namespace nlwave {

struct Gradient {
  Vector dq;  // ∂H/∂Q
  Vector dp;  // ∂H/∂P
};

struct PhaseVelocity {
  Vector dq;  // dQ/dt
  Vector dp;  // dP/dt
};

/// (ξ, η) stacked as one 2N vector.
using TangentVector = Vector;

/// Tao's doubled phase space: two copies (Q, P) and (X, Y) of one trajectory
/// bound together by the rotation flow.
///
/// The reported state is the midpoint of the copies. Each copy alone carries
/// an O(dt²) oscillating split from the binding term; the midpoint cancels
/// it and keeps the norm to ~1e-10 at the default step.
struct ExtendedState {
  Vector q, p, x, y;

  static ExtendedState from(const WaveState& s) { return {s.q, s.p, s.q, s.p}; }
  WaveState physical() const { return {0.5 * (q + x), 0.5 * (p + y)}; }
  WaveState first_copy() const { return {q, p}; }
  double defect() const { return (q - x).norm() + (p - y).norm(); }
};

struct IntegratorConfig {
  double dt = 5e-4;
  long steps = 20000;
  double binding = 50.0;  // ω_b
  long record_stride = 20;

  void validate() const;
};

struct Monitors {
  bool det_m = false;
  bool states = false;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> spin;
  std::vector<double> energy;
  std::vector<double> norm;
  std::optional<std::vector<double>> det_m;
  std::optional<std::vector<WaveState>> states;

  std::size_t size() const { return times.size(); }
};

/// Blow-up during evolve; carries every sample recorded before the failure.
class TrajectoryError : public BlowUpError {
 public:
  TrajectoryError(const BlowUpError& cause, TrajectoryRecord partial)
      : BlowUpError(cause), partial_(std::move(partial)) {}
  const TrajectoryRecord& partial() const noexcept { return partial_; }

 private:
  TrajectoryRecord partial_;
};

inline constexpr double kBlowUpThreshold = 1e12;

/// f_k = w s_k (s_k − 2S) for the state (q, p).
Vector nonlinear_weights(const Vector& q, const Vector& p, const SpinModel& model);

double hamiltonian(const WaveState& state, const SpinModel& model);
double hamiltonian(const Vector& q, const Vector& p, const SpinModel& model);

Gradient gradient(const Vector& q, const Vector& p, const SpinModel& model);
PhaseVelocity rds_rhs(const WaveState& state, const SpinModel& model);

/// M = [[∂²H/∂P∂Q, ∂²H/∂P∂P], [−∂²H/∂Q∂Q, −∂²H/∂Q∂P]], analytic second derivatives.
Matrix hessian_m(const WaveState& state, const SpinModel& model);
Matrix hessian_m(const Vector& q, const Vector& p, const SpinModel& model);

/// One symmetric step φ_A(dt/2)∘φ_B(dt/2)∘φ_C(dt)∘φ_B(dt/2)∘φ_A(dt/2).
void tao_step(ExtendedState& state, const SpinModel& model, double dt, double binding);

/// Heun step for dz/dt = M(t) z with M sampled at both ends of the step.
TangentVector heun_tangent_step(const Matrix& m_begin, const Matrix& m_end, const TangentVector& z, double dt);

/// Advances the state by tao_step and the tangent by heun_tangent_step.
void coupled_step(ExtendedState& state, TangentVector& tangent, const SpinModel& model, double dt, double binding);

/// Throws BlowUpError if any entry is non-finite or exceeds kBlowUpThreshold.
void guard_finite(const ExtendedState& state, long step);
void guard_finite(const TangentVector& tangent, long step);

TrajectoryRecord evolve(const WaveState& initial, const SpinModel& model, const IntegratorConfig& cfg,
                        const Monitors& monitors = {});

}  // namespace nlwave
