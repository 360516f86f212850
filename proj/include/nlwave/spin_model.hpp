#pragma once

// q-spin configuration space, coupling matrices and normalized wavefunctions.
//
// Configuration k is the bit pattern of k: bit r set means spin r is +1/2.
// The global spin flip maps k to its complement within q bits.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>

#include "nlwave/linalg.hpp"

namespace nlwave {

struct SpinConfigSpace {
  int q = 0;
  Eigen::Index n = 0;  // 2^q
  Vector s;            // total spin of each configuration

  Eigen::Index flip(Eigen::Index k) const { return (~k) & (n - 1); }
  double spin_of(Eigen::Index k, int r) const { return ((k >> r) & 1) ? 0.5 : -0.5; }
};

SpinConfigSpace enumerate_configs(int q);

/// ψ_k = Q_k + i P_k, normalized so Σ(Q² + P²) = 1.
struct WaveState {
  Vector q;
  Vector p;

  Eigen::Index size() const { return q.size(); }
  double norm_squared() const { return q.squaredNorm() + p.squaredNorm(); }
};

struct SpinModel {
  SpinConfigSpace space;
  Matrix k;
  double w = 0.0;

  SpinModel with_w(double new_w) const {
    SpinModel copy = *this;
    copy.w = new_w;
    return copy;
  }
};

namespace kbuild {
struct Identity {
  double scale = 1.0;
};
/// κ·(single-flip hypercube adjacency) + shift·I; positive definite iff shift > κ·q.
struct FlipGraph {
  double kappa = 1.0;
  double shift = 0.0;  // 0 selects the default q + 1
};
/// O^t·diag(λ)·O with O Haar-distributed, λ uniform on [lambda_min, lambda_max].
struct RandomSpd {
  std::uint64_t seed = 1;
  double lambda_min = 0.5;
  double lambda_max = 2.0;
};
struct FromFile {
  std::filesystem::path path;
};
}  // namespace kbuild

using KSpec = std::variant<kbuild::Identity, kbuild::FlipGraph, kbuild::RandomSpd, kbuild::FromFile>;

/// Symmetric positive definite N×N coupling matrix; throws DefinitenessError otherwise.
Matrix build_k_matrix(const SpinConfigSpace& space, const KSpec& spec);

/// Uniform on O(N) via Householder QR of a Gaussian matrix with sign-fixed diagonal.
Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed);

SpinModel make_model(int q, const KSpec& spec, double w);

WaveState make_state(const Vector& q_raw, const Vector& p_raw);

/// Gaussian entries for Q and P, then normalized.
WaveState random_state(const SpinConfigSpace& space, std::uint64_t seed);

enum class FlipParity { even, odd };

/// The sign rule f(τσ) = ±f(σ) satisfied by `values`; throws SymmetryError if neither holds.
FlipParity flip_parity(const SpinConfigSpace& space, const Vector& values, double tol = 1e-12);

/// Q = √(1−β)·f/‖f‖, P = √β·g/‖g‖ for spin-flip symmetric f and g, so ΣP² = β and S = 0.
WaveState make_symmetric_state(const SpinConfigSpace& space, const Vector& f, const Vector& g, double beta);

/// Configuration function from a name: "s", "s2", "s3", "ones", "s+s3", "spin0" (first spin).
Vector config_function(const SpinConfigSpace& space, const std::string& name);

/// S = Σ s_k (Q_k² + P_k²).
double spin_observable(const WaveState& state, const SpinConfigSpace& space);

// State file: "Q: v0 ... vN-1" then "P: v0 ... vN-1".
void write_state(std::ostream& out, const WaveState& state);
WaveState read_state(std::istream& in);
WaveState read_state_file(const std::filesystem::path& path);

std::string describe(const KSpec& spec);

}  // namespace nlwave
