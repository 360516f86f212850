#include "nlwave/spin_model.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlwave/io.hpp"
#include "nlwave/rng.hpp"

namespace nlwave {

SpinConfigSpace enumerate_configs(int q) {
  if (q < 1 || q > 13 || q % 2 == 0) {
    throw DomainError("enumerate_configs: q must be odd with 1 <= q <= 13, got " + std::to_string(q));
  }
  SpinConfigSpace space;
  space.q = q;
  space.n = Eigen::Index{1} << q;
  space.s.resize(space.n);
  for (Eigen::Index k = 0; k < space.n; ++k) {
    double total = 0.0;
    for (int r = 0; r < q; ++r) total += space.spin_of(k, r);
    space.s(k) = total;
  }
  return space;
}

namespace {

Matrix flip_graph_adjacency(const SpinConfigSpace& space) {
  Matrix a = Matrix::Zero(space.n, space.n);
  for (Eigen::Index i = 0; i < space.n; ++i) {
    for (int r = 0; r < space.q; ++r) a(i, i ^ (Eigen::Index{1} << r)) = 1.0;
  }
  return a;
}

void require_positive_definite(const Matrix& k, const std::string& label) {
  const double lmin = linalg::sym_eigen(k).min();
  if (!(lmin > 0.0)) {
    throw DefinitenessError("build_k_matrix: " + label + " is not positive definite (smallest eigenvalue " +
                            io::format_number(lmin) + ")");
  }
}

}  // namespace

Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  const Matrix g = rng.gaussian_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix build_k_matrix(const SpinConfigSpace& space, const KSpec& spec) {
  struct Builder {
    const SpinConfigSpace& space;

    Matrix operator()(const kbuild::Identity& b) const {
      if (!(b.scale > 0.0)) throw DefinitenessError("build_k_matrix: identity scale must be > 0");
      return b.scale * Matrix::Identity(space.n, space.n);
    }
    Matrix operator()(const kbuild::FlipGraph& b) const {
      const double shift = b.shift == 0.0 ? space.q + 1.0 : b.shift;
      Matrix k = b.kappa * flip_graph_adjacency(space);
      k.diagonal().array() += shift;
      require_positive_definite(k, "flip_graph");
      return k;
    }
    Matrix operator()(const kbuild::RandomSpd& b) const {
      if (!(b.lambda_min > 0.0) || !(b.lambda_max >= b.lambda_min)) {
        throw DefinitenessError("build_k_matrix: random_spd needs 0 < lambda_min <= lambda_max");
      }
      const Matrix o = random_orthogonal(space.n, b.seed);
      Rng rng(splitmix64(b.seed) ^ 0x5bd1e995ULL);
      Vector lambda(space.n);
      for (Eigen::Index i = 0; i < space.n; ++i) lambda(i) = rng.uniform(b.lambda_min, b.lambda_max);
      Matrix k = o * lambda.asDiagonal() * o.transpose();
      k = (0.5 * (k + k.transpose())).eval();
      return k;
    }
    Matrix operator()(const kbuild::FromFile& b) const {
      Matrix k = io::read_matrix_file(b.path);
      if (k.rows() != space.n || k.cols() != space.n) {
        throw ValidationError("build_k_matrix: " + b.path.string() + " is " + std::to_string(k.rows()) + "x" +
                              std::to_string(k.cols()) + ", expected " + std::to_string(space.n) + "x" +
                              std::to_string(space.n));
      }
      if (!linalg::is_symmetric(k)) throw ValidationError("build_k_matrix: " + b.path.string() + " is not symmetric");
      require_positive_definite(k, b.path.string());
      return k;
    }
  };
  return std::visit(Builder{space}, spec);
}

SpinModel make_model(int q, const KSpec& spec, double w) {
  SpinModel model;
  model.space = enumerate_configs(q);
  model.k = build_k_matrix(model.space, spec);
  model.w = w;
  return model;
}

WaveState make_state(const Vector& q_raw, const Vector& p_raw) {
  if (q_raw.size() != p_raw.size() || q_raw.size() == 0) {
    throw DimensionError("make_state: Q and P must be nonempty and equally long");
  }
  const double norm2 = q_raw.squaredNorm() + p_raw.squaredNorm();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw DomainError("make_state: state has zero (or non-finite) norm");
  const double scale = 1.0 / std::sqrt(norm2);
  return WaveState{q_raw * scale, p_raw * scale};
}

WaveState random_state(const SpinConfigSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  const Vector q = rng.gaussian_vector(space.n);
  const Vector p = rng.gaussian_vector(space.n);
  return make_state(q, p);
}

FlipParity flip_parity(const SpinConfigSpace& space, const Vector& values, double tol) {
  if (values.size() != space.n) throw DimensionError("flip_parity: function length must equal N");
  bool even = true, odd = true;
  for (Eigen::Index k = 0; k < space.n; ++k) {
    const double here = values(k);
    const double there = values(space.flip(k));
    if (std::abs(there - here) > tol) even = false;
    if (std::abs(there + here) > tol) odd = false;
  }
  if (even) return FlipParity::even;
  if (odd) return FlipParity::odd;
  throw SymmetryError("flip_parity: function is neither even nor odd under the global spin flip");
}

WaveState make_symmetric_state(const SpinConfigSpace& space, const Vector& f, const Vector& g, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("make_symmetric_state: beta must lie in (0, 1)");
  flip_parity(space, f);
  flip_parity(space, g);
  const double nf = f.norm();
  const double ng = g.norm();
  if (!(nf > 0.0) || !(ng > 0.0)) throw DomainError("make_symmetric_state: f and g must be nonzero");
  return WaveState{std::sqrt(1.0 - beta) * f / nf, std::sqrt(beta) * g / ng};
}

Vector config_function(const SpinConfigSpace& space, const std::string& name) {
  const Vector& s = space.s;
  if (name == "s") return s;
  if (name == "s2") return s.array().square().matrix();
  if (name == "s3") return s.array().cube().matrix();
  if (name == "ones") return Vector::Ones(space.n);
  if (name == "s+s3") return (s.array() + s.array().cube()).matrix();
  if (name == "spin0") {
    Vector out(space.n);
    for (Eigen::Index k = 0; k < space.n; ++k) out(k) = space.spin_of(k, 0);
    return out;
  }
  if (name == "spin01") {
    Vector out(space.n);
    for (Eigen::Index k = 0; k < space.n; ++k) out(k) = space.spin_of(k, 0) * space.spin_of(k, 1);
    return out;
  }
  throw ValidationError("unknown configuration function '" + name +
                        "' (expected s, s2, s3, ones, s+s3, spin0, spin01)");
}

double spin_observable(const WaveState& state, const SpinConfigSpace& space) {
  return (space.s.array() * (state.q.array().square() + state.p.array().square())).sum();
}

void write_state(std::ostream& out, const WaveState& state) {
  out << "Q:";
  for (Eigen::Index i = 0; i < state.size(); ++i) out << ' ' << io::format_number(state.q(i));
  out << "\nP:";
  for (Eigen::Index i = 0; i < state.size(); ++i) out << ' ' << io::format_number(state.p(i));
  out << '\n';
}

WaveState read_state(std::istream& in) {
  auto read_line = [&](const char* tag) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(std::string("state file: missing '") + tag + "' line");
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head != tag) throw ValidationError(std::string("state file: expected line starting with '") + tag + "'");
    std::vector<double> values;
    std::string token;
    while (ls >> token) values.push_back(io::parse_number(token));
    return Vector(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  };
  const Vector q = read_line("Q:");
  const Vector p = read_line("P:");
  if (q.size() != p.size() || q.size() == 0) throw ValidationError("state file: Q and P lengths differ");
  return WaveState{q, p};
}

WaveState read_state_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open state file " + path.string());
  return read_state(in);
}

std::string describe(const KSpec& spec) {
  struct Describer {
    std::string operator()(const kbuild::Identity& b) const { return "identity(scale=" + io::format_number(b.scale) + ")"; }
    std::string operator()(const kbuild::FlipGraph& b) const {
      return "flip_graph(kappa=" + io::format_number(b.kappa) + ", shift=" +
             (b.shift == 0.0 ? std::string("q+1") : io::format_number(b.shift)) + ")";
    }
    std::string operator()(const kbuild::RandomSpd& b) const {
      return "random_spd(seed=" + std::to_string(b.seed) + ", lambda_min=" + io::format_number(b.lambda_min) +
             ", lambda_max=" + io::format_number(b.lambda_max) + ")";
    }
    std::string operator()(const kbuild::FromFile& b) const { return "from_file(" + b.path.string() + ")"; }
  };
  return std::visit(Describer{}, spec);
}

}  // namespace nlwave
