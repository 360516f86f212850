#include "nlwave/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nlwave/parallel.hpp"
#include "nlwave/rng.hpp"

namespace nlwave {

WaveState perturb_rotation(const WaveState& state, Eigen::Index index, double epsilon) {
  if (index < 0 || index >= state.size()) {
    throw ValidationError("perturb_rotation: index " + std::to_string(index) + " out of range [0, " +
                          std::to_string(state.size()) + ")");
  }
  WaveState out = state;
  const double c = std::cos(epsilon);
  const double s = std::sin(epsilon);
  const double q = state.q(index);
  const double p = state.p(index);
  out.q(index) = q * c + p * s;
  out.p(index) = -q * s + p * c;
  return out;
}

DivergenceSeries divergence_series(const WaveState& state, const SpinModel& model, const IntegratorConfig& cfg,
                                   Eigen::Index index, double epsilon) {
  if (!(epsilon >= 0.0)) throw ValidationError("divergence_series: epsilon must be >= 0");
  const WaveState other = perturb_rotation(state, index, epsilon);
  const TrajectoryRecord a = evolve(state, model, cfg);
  const TrajectoryRecord b = evolve(other, model, cfg);

  // Below a few ulps of the spin scale the difference is rounding noise.
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * model.space.q / 2.0;
  DivergenceSeries out;
  out.epsilon = epsilon;
  out.times = a.times;
  out.log_dev.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(b.spin[i] - a.spin[i]);
    out.log_dev.push_back(diff <= floor ? -std::numeric_limits<double>::infinity() : std::log(diff));
  }
  return out;
}

std::vector<double> running_max(const std::vector<double>& series) {
  if (series.empty()) throw DomainError("running_max: empty series");
  std::vector<double> out(series.size());
  double best = series.front();
  for (std::size_t i = 0; i < series.size(); ++i) {
    best = std::max(best, series[i]);
    out[i] = best;
  }
  return out;
}

TangentVector initial_tangent(Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  TangentVector z = rng.gaussian_vector(dim);
  const double n = z.norm();
  if (!(n > 0.0)) throw DegenerateUpdateError("initial_tangent: zero tangent draw, choose another seed");
  return z / n;
}

MlceSeries mlce_run(Eigen::Index dim, long steps, double dt, std::uint64_t seed, long renorm_interval,
                    const TangentStepper& stepper) {
  if (renorm_interval < 1) throw ValidationError("mlce: renorm_interval must be >= 1");
  if (steps < 1) throw ValidationError("mlce: steps must be >= 1");
  MlceSeries out;
  out.seed = seed;
  out.renorm_interval = renorm_interval;
  const auto checkpoints = static_cast<std::size_t>(steps / renorm_interval);
  out.times.reserve(checkpoints);
  out.gamma.reserve(checkpoints);
  out.log_alphas.reserve(checkpoints);

  TangentVector z = initial_tangent(dim, seed);
  double sum = 0.0;
  for (long step = 1; step <= steps; ++step) {
    stepper(z, step);
    if (step % renorm_interval != 0) continue;
    const double alpha = z.norm();
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw BlowUpError("mlce: tangent norm is zero or non-finite at renormalization", step);
    }
    const double la = std::log(alpha);
    sum += la;
    const double t = static_cast<double>(step) * dt;
    out.times.push_back(t);
    out.log_alphas.push_back(la);
    out.gamma.push_back(sum / t);
    z /= alpha;
  }
  return out;
}

MlceSeries mlce_series(const WaveState& state, const SpinModel& model, const IntegratorConfig& cfg,
                       std::uint64_t seed, long renorm_interval) {
  cfg.validate();
  if (state.size() != model.space.n) throw DimensionError("mlce_series: state length does not match the model");
  ExtendedState st = ExtendedState::from(state);
  return mlce_run(2 * model.space.n, cfg.steps, cfg.dt, seed, renorm_interval, [&](TangentVector& z, long step) {
    coupled_step(st, z, model, cfg.dt, cfg.binding);
    guard_finite(st, step);
    guard_finite(z, step);
  });
}

double mlce_estimate(const std::vector<double>& gamma, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ValidationError("mlce_estimate: tail_fraction must lie in (0, 1]");
  }
  if (gamma.empty()) throw DomainError("mlce_estimate: empty series");
  const auto n = gamma.size();
  auto count = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n) - 1e-9));
  count = std::clamp<std::size_t>(count, 1, n);
  const double total = std::accumulate(gamma.end() - static_cast<std::ptrdiff_t>(count), gamma.end(), 0.0);
  return total / static_cast<double>(count);
}

double mlce_estimate(const MlceSeries& series, double tail_fraction) { return mlce_estimate(series.gamma, tail_fraction); }

std::vector<WScanRow> w_scan(const WaveState& state, const SpinModel& model_template, const std::vector<double>& w_grid,
                             const IntegratorConfig& cfg, const WScanOptions& options) {
  if (w_grid.empty()) throw ValidationError("w_scan: empty grid");
  if (options.repeats < 1) throw ValidationError("w_scan: repeats must be >= 1");
  cfg.validate();

  std::vector<WScanRow> rows(w_grid.size());
  auto run_row = [&](std::size_t i) {
    WScanRow& row = rows[i];
    row.w = w_grid[i];
    try {
      const SpinModel model = model_template.with_w(row.w);
      const double det0 = linalg::lu_determinant(hessian_m(state, model));
      row.det_sign = (det0 > 0.0) - (det0 < 0.0);
      double acc = 0.0;
      for (int r = 0; r < options.repeats; ++r) {
        const MlceSeries series = mlce_series(state, model, cfg, options.seed + static_cast<std::uint64_t>(r),
                                              options.renorm_interval);
        acc += mlce_estimate(series, options.tail_fraction);
      }
      row.gamma_hat = acc / options.repeats;
    } catch (const Error& e) {
      row.gamma_hat = std::numeric_limits<double>::quiet_NaN();
      row.error = e.what();
    }
  };

  parallel_for(rows.size(), options.threads, run_row);
  return rows;
}

}  // namespace nlwave
