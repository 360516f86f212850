#pragma once

// Run configuration: TOML-style sections with `key = value` lines.
//
//   [model]   q (required), w, k, k_scale, k_kappa, k_shift, k_seed, k_lambda_min, k_lambda_max, k_file
//   [state]   kind (symmetric|random|raw|file), f, g, beta, seed, q_values, p_values, file
//   [integrator] dt, steps, binding, record_stride
//   [experiment] name, epsilon, perturb_index, renorm_interval, tail_fraction, seed, repeats,
//                w_grid, w_min, w_max, w_points, wstar_max, grid_points, tol, detm, threads
//   [continuum] n_bodies, mass, spring, w, sigma, epsilon, cap, parity, spin, dump
//   [output]  dir
//   [run]     seed
//
// Seeds left unset inherit run.seed. Strings may be bare or double-quoted;
// '#' starts a comment.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nlwave/chaos.hpp"
#include "nlwave/continuum.hpp"
#include "nlwave/spin_model.hpp"

namespace nlwave {

enum class ValueType { integer, unsigned_integer, real, text, boolean };

struct ConfigKey {
  std::string section;
  std::string key;
  ValueType type;
  std::string fallback;  // "" for required keys and inherited seeds
  bool required = false;
  bool inherits_seed = false;
};

const std::vector<ConfigKey>& config_schema();

/// Resolved values keyed by "section.key"; every schema key is present.
class RunConfig {
 public:
  const std::string& raw(const std::string& path) const;
  long get_int(const std::string& path) const;
  std::uint64_t get_uint(const std::string& path) const;
  double get_real(const std::string& path) const;
  std::string get_text(const std::string& path) const;
  bool get_bool(const std::string& path) const;

  /// Canonical text; parse_config(to_text()) reproduces this config.
  std::string to_text() const;

  std::map<std::string, std::string> values;
};

/// Parses, applies `key=value` overrides (dotted paths), fills defaults and inherited seeds.
/// Throws ValidationError naming the line or key on unknown keys, type mismatches or a missing q.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Builders from a resolved config.
SpinModel model_from_config(const RunConfig& cfg);
WaveState state_from_config(const RunConfig& cfg, const SpinConfigSpace& space);
IntegratorConfig integrator_from_config(const RunConfig& cfg);
continuum::Params continuum_from_config(const RunConfig& cfg);
std::vector<double> w_grid_from_config(const RunConfig& cfg);
KSpec kspec_from_config(const RunConfig& cfg);

}  // namespace nlwave
