#include "nlwave/dynamics.hpp"

#include <cmath>

namespace nlwave {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("integrator: dt must be > 0");
  if (steps < 1) throw ValidationError("integrator: steps must be >= 1");
  if (!(binding > 0.0)) throw ValidationError("integrator: binding must be > 0");
  if (record_stride < 1) throw ValidationError("integrator: record_stride must be >= 1");
}

Vector nonlinear_weights(const Vector& q, const Vector& p, const SpinModel& model) {
  const Vector& s = model.space.s;
  const double spin = (s.array() * (q.array().square() + p.array().square())).sum();
  return (model.w * s.array() * (s.array() - 2.0 * spin)).matrix();
}

double hamiltonian(const Vector& q, const Vector& p, const SpinModel& model) {
  const Vector& s = model.space.s;
  const Eigen::ArrayXd density = q.array().square() + p.array().square();
  const double spin = (s.array() * density).sum();
  const double second = (s.array().square() * density).sum();
  return 0.5 * p.dot(model.k * p) + 0.5 * q.dot(model.k * q) + model.w * (second - spin * spin);
}

double hamiltonian(const WaveState& state, const SpinModel& model) { return hamiltonian(state.q, state.p, model); }

Gradient gradient(const Vector& q, const Vector& p, const SpinModel& model) {
  const Vector f = nonlinear_weights(q, p, model);
  Gradient g;
  g.dq = model.k * q + 2.0 * f.cwiseProduct(q);
  g.dp = model.k * p + 2.0 * f.cwiseProduct(p);
  return g;
}

PhaseVelocity rds_rhs(const WaveState& state, const SpinModel& model) {
  Gradient g = gradient(state.q, state.p, model);
  return PhaseVelocity{std::move(g.dp), -g.dq};
}

Matrix hessian_m(const Vector& q, const Vector& p, const SpinModel& model) {
  const Eigen::Index n = q.size();
  const Vector& s = model.space.s;
  const Vector f = nonlinear_weights(q, p, model);
  const double w8 = 8.0 * model.w;
  const Vector sq = s.cwiseProduct(q);
  const Vector sp = s.cwiseProduct(p);

  Matrix diag_part = model.k;
  diag_part.diagonal() += 2.0 * f;

  // ∂²H/∂P_k∂Q_j = −8w s_k P_k s_j Q_j, and so on.
  const Matrix h_pq = -w8 * sp * sq.transpose();
  const Matrix h_pp = diag_part - w8 * sp * sp.transpose();
  const Matrix h_qq = diag_part - w8 * sq * sq.transpose();

  Matrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = h_pq;
  m.topRightCorner(n, n) = h_pp;
  m.bottomLeftCorner(n, n) = -h_qq;
  m.bottomRightCorner(n, n) = -h_pq.transpose();
  return m;
}

Matrix hessian_m(const WaveState& state, const SpinModel& model) { return hessian_m(state.q, state.p, model); }

namespace {

// Flow of H(Q, Y): Q and Y are frozen.
void flow_a(ExtendedState& st, const SpinModel& model, double delta) {
  const Gradient g = gradient(st.q, st.y, model);
  st.p -= delta * g.dq;
  st.x += delta * g.dp;
}

// Flow of H(X, P): X and P are frozen.
void flow_b(ExtendedState& st, const SpinModel& model, double delta) {
  const Gradient g = gradient(st.x, st.p, model);
  st.q += delta * g.dp;
  st.y -= delta * g.dq;
}

// Flow of the binding term ω_b·½(|Q−X|² + |P−Y|²).
void flow_c(ExtendedState& st, double delta, double binding) {
  const double theta = 2.0 * binding * delta;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Vector sum_q = st.q + st.x;
  const Vector sum_p = st.p + st.y;
  const Vector dq = st.q - st.x;
  const Vector dp = st.p - st.y;
  const Vector rq = c * dq + s * dp;
  const Vector rp = -s * dq + c * dp;
  st.q = 0.5 * (sum_q + rq);
  st.x = 0.5 * (sum_q - rq);
  st.p = 0.5 * (sum_p + rp);
  st.y = 0.5 * (sum_p - rp);
}

bool out_of_range(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || std::abs(v(i)) > kBlowUpThreshold) return true;
  }
  return false;
}

}  // namespace

void tao_step(ExtendedState& state, const SpinModel& model, double dt, double binding) {
  const double half = 0.5 * dt;
  flow_a(state, model, half);
  flow_b(state, model, half);
  flow_c(state, dt, binding);
  flow_b(state, model, half);
  flow_a(state, model, half);
}

TangentVector heun_tangent_step(const Matrix& m_begin, const Matrix& m_end, const TangentVector& z, double dt) {
  const Vector k1 = m_begin * z;
  const Vector k2 = m_end * (z + dt * k1);
  return z + 0.5 * dt * (k1 + k2);
}

void coupled_step(ExtendedState& state, TangentVector& tangent, const SpinModel& model, double dt, double binding) {
  const Matrix m_begin = hessian_m(state.physical(), model);
  tao_step(state, model, dt, binding);
  const Matrix m_end = hessian_m(state.physical(), model);
  tangent = heun_tangent_step(m_begin, m_end, tangent, dt);
}

void guard_finite(const ExtendedState& state, long step) {
  if (out_of_range(state.q) || out_of_range(state.p) || out_of_range(state.x) || out_of_range(state.y)) {
    throw BlowUpError("integrator blow-up: non-finite or oversized state entry", step);
  }
}

void guard_finite(const TangentVector& tangent, long step) {
  if (out_of_range(tangent)) throw BlowUpError("tangent blow-up: non-finite or oversized entry", step);
}

TrajectoryRecord evolve(const WaveState& initial, const SpinModel& model, const IntegratorConfig& cfg,
                        const Monitors& monitors) {
  cfg.validate();
  if (initial.size() != model.space.n) throw DimensionError("evolve: state length does not match the model");

  TrajectoryRecord rec;
  const auto samples = static_cast<std::size_t>(cfg.steps / cfg.record_stride + 1);
  rec.times.reserve(samples);
  if (monitors.det_m) rec.det_m.emplace().reserve(samples);
  if (monitors.states) rec.states.emplace().reserve(samples);

  ExtendedState st = ExtendedState::from(initial);
  auto record = [&](long step) {
    const WaveState phys = st.physical();
    rec.times.push_back(static_cast<double>(step) * cfg.dt);
    rec.spin.push_back(spin_observable(phys, model.space));
    rec.energy.push_back(hamiltonian(phys, model));
    rec.norm.push_back(phys.norm_squared());
    if (rec.det_m) rec.det_m->push_back(linalg::lu_determinant(hessian_m(phys, model)));
    if (rec.states) rec.states->push_back(phys);
  };

  record(0);
  for (long step = 1; step <= cfg.steps; ++step) {
    tao_step(st, model, cfg.dt, cfg.binding);
    try {
      guard_finite(st, step);
    } catch (const BlowUpError& e) {
      throw TrajectoryError(e, std::move(rec));
    }
    if (step % cfg.record_stride == 0) record(step);
  }
  return rec;
}

}  // namespace nlwave
