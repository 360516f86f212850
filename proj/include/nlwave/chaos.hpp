#pragma once

// Perturbed-pair divergence, running maxima, the renormalized tangent-vector
// estimate of the maximal Lyapunov exponent, and scans over w.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlwave/dynamics.hpp"
#include "nlwave/parallel.hpp"

namespace nlwave {

struct MlceSeries {
  std::vector<double> times;
  std::vector<double> gamma;
  std::vector<double> log_alphas;
  std::uint64_t seed = 0;
  long renorm_interval = 0;

  std::size_t size() const { return times.size(); }
};

struct DivergenceSeries {
  std::vector<double> times;
  std::vector<double> log_dev;  // -inf where ΔS vanishes to rounding
  double epsilon = 0.0;
};

inline constexpr double kDefaultEpsilon = 1e-8;
inline constexpr long kDefaultRenormInterval = 10;
inline constexpr double kDefaultTailFraction = 0.2;

/// Rotates (Q_i, P_i) by angle ε; all other entries unchanged.
WaveState perturb_rotation(const WaveState& state, Eigen::Index index, double epsilon);

DivergenceSeries divergence_series(const WaveState& state, const SpinModel& model, const IntegratorConfig& cfg,
                                   Eigen::Index index, double epsilon);

/// Prefix maxima.
std::vector<double> running_max(const std::vector<double>& series);

/// Advances a tangent vector by one step (the step index is 1-based).
using TangentStepper = std::function<void(TangentVector& tangent, long step)>;

/// Renormalization loop shared by the coupled flow and test harnesses.
MlceSeries mlce_run(Eigen::Index dim, long steps, double dt, std::uint64_t seed, long renorm_interval,
                    const TangentStepper& stepper);

MlceSeries mlce_series(const WaveState& state, const SpinModel& model, const IntegratorConfig& cfg,
                       std::uint64_t seed, long renorm_interval = kDefaultRenormInterval);

/// Mean of gamma over the last tail_fraction of samples.
double mlce_estimate(const MlceSeries& series, double tail_fraction = kDefaultTailFraction);
double mlce_estimate(const std::vector<double>& gamma, double tail_fraction = kDefaultTailFraction);

/// Unit Gaussian tangent of length dim drawn from `seed`.
TangentVector initial_tangent(Eigen::Index dim, std::uint64_t seed);

struct WScanOptions {
  std::uint64_t seed = 1;
  long renorm_interval = kDefaultRenormInterval;
  double tail_fraction = kDefaultTailFraction;
  int repeats = 1;   // tangent seeds seed, seed+1, ... averaged
  int threads = 0;   // 0: NLWAVE_THREADS or hardware concurrency
};

struct WScanRow {
  double w = 0.0;
  double gamma_hat = 0.0;
  int det_sign = 0;               // sign of det M at t = 0
  std::optional<std::string> error;
};

std::vector<WScanRow> w_scan(const WaveState& state, const SpinModel& model_template, const std::vector<double>& w_grid,
                             const IntegratorConfig& cfg, const WScanOptions& options = {});

}  // namespace nlwave
