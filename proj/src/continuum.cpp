#include "nlwave/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "nlwave/io.hpp"
#include "nlwave/parallel.hpp"

namespace nlwave::continuum {

double Params::omega() const { return std::sqrt(spring / mass); }

void Params::validate() const {
  if (n_bodies < 1) throw ValidationError("continuum: n_bodies must be >= 1");
  if (!(mass > 0.0)) throw ValidationError("continuum: mass must be > 0");
  if (!(spring > 0.0)) throw ValidationError("continuum: spring must be > 0");
  if (!(w >= 0.0)) throw ValidationError("continuum: w must be >= 0");
  if (!(sigma > 1.0)) throw ValidationError("continuum: sigma must be > 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("continuum: epsilon must lie in (0, 1)");
}

int degree(const MultiIndex& n) { return std::accumulate(n.begin(), n.end(), 0); }

double hermite_eval(int n, double x) {
  if (n < 0) throw DomainError("hermite_eval: n must be >= 0");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double eigenfunction_1d(int n, double x, double m_omega) {
  if (n < 0) throw DomainError("eigenfunction_1d: n must be >= 0");
  // Normalized recurrence avoids the 2^n n! prefactor.
  const double xi = std::sqrt(m_omega) * x;
  double prev = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
  double cur = std::sqrt(2.0) * xi * prev;
  if (n == 0) cur = prev;
  for (int k = 1; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * xi * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return std::pow(m_omega, 0.25) * cur;
}

double eigenvalue(const MultiIndex& n, const Params& params) {
  return params.omega() * (degree(n) + 0.5 * static_cast<double>(n.size()));
}

double xbar_element(const MultiIndex& n, const MultiIndex& m, const Params& params) {
  if (n.size() != m.size()) throw DimensionError("xbar_element: multi-indices differ in length");
  int where = -1;
  for (std::size_t j = 0; j < n.size(); ++j) {
    const int d = n[j] - m[j];
    if (d == 0) continue;
    if (std::abs(d) != 1 || where >= 0) return 0.0;
    where = static_cast<int>(j);
  }
  if (where < 0) return 0.0;
  const double top = std::max(n[where], m[where]);
  return std::sqrt(0.5 * top) / std::sqrt(params.mass * params.omega());
}

std::vector<MultiIndex> enumerate_basis(int n_bodies, int cap) {
  if (n_bodies < 1) throw ValidationError("enumerate_basis: n_bodies must be >= 1");
  if (cap < 0) throw ValidationError("enumerate_basis: cap must be >= 0");
  std::vector<MultiIndex> out;
  MultiIndex cur(n_bodies, 0);
  // Lexicographically descending compositions of each degree.
  auto fill = [&](auto& self, int pos, int remaining) -> void {
    if (pos == n_bodies - 1) {
      cur[pos] = remaining;
      out.push_back(cur);
      if (out.size() > kMaxBasis) {
        throw CapacityError("build_omega: basis exceeds " + std::to_string(kMaxBasis) + " entries");
      }
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  for (int d = 0; d <= cap; ++d) fill(fill, 0, d);
  return out;
}

std::optional<std::size_t> TruncatedOperator::index_of(const MultiIndex& n) const {
  const auto it = lookup.find(n);
  if (it == lookup.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> TruncatedOperator::interior_rows() const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!boundary[i]) rows.push_back(i);
  }
  return rows;
}

Matrix TruncatedOperator::interior_block() const {
  const auto rows = interior_rows();
  std::vector<Eigen::Index> position(basis.size(), -1);
  for (std::size_t r = 0; r < rows.size(); ++r) position[rows[r]] = static_cast<Eigen::Index>(r);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (decltype(matrix)::InnerIterator it(matrix, static_cast<Eigen::Index>(rows[r])); it; ++it) {
      const Eigen::Index c = position[static_cast<std::size_t>(it.col())];
      if (c >= 0) out(static_cast<Eigen::Index>(r), c) = it.value();
    }
  }
  return out;
}

namespace {

// Two-rung walks n̄ → m̄' → m̄ with m̄' one rung away; `visit(end, weight)` per walk.
template <typename Visit>
void for_each_walk(const MultiIndex& n, const Params& params, Visit&& visit) {
  const double m_omega = params.mass * params.omega();
  const double omega = params.omega();
  const double half_n = 0.5 * static_cast<double>(n.size());
  const int deg = degree(n);
  MultiIndex mid = n;
  for (std::size_t j = 0; j < n.size(); ++j) {
    for (int d1 : {+1, -1}) {
      if (n[j] + d1 < 0) continue;
      mid[j] = n[j] + d1;
      const double q1 = std::sqrt(0.5 * std::max(n[j], mid[j]) / m_omega);
      const double energy = omega * (deg + d1 + half_n);
      MultiIndex end = mid;
      for (std::size_t k = 0; k < n.size(); ++k) {
        for (int d2 : {+1, -1}) {
          if (mid[k] + d2 < 0) continue;
          end[k] = mid[k] + d2;
          const double q2 = std::sqrt(0.5 * std::max(mid[k], end[k]) / m_omega);
          visit(end, q1 * q2 / energy);
          end[k] = mid[k];
        }
      }
      mid[j] = n[j];
    }
  }
}

}  // namespace

TruncatedOperator build_omega(const Params& params, int degree_cap, int threads) {
  params.validate();
  if (degree_cap < 2) throw ValidationError("build_omega: degree_cap must be >= 2");
  TruncatedOperator op;
  op.n_bodies = params.n_bodies;
  op.degree_cap = degree_cap;
  op.omega_scale = params.omega();
  op.basis = enumerate_basis(params.n_bodies, degree_cap);
  const std::size_t size = op.basis.size();
  op.boundary.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    op.lookup.emplace(op.basis[i], i);
    op.boundary[i] = degree(op.basis[i]) > degree_cap - 2;
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(size);
  parallel_for(size, threads, [&](std::size_t i) {
    std::map<std::size_t, double> acc;
    for_each_walk(op.basis[i], params, [&](const MultiIndex& end, double weight) {
      if (degree(end) > degree_cap) return;
      acc[op.lookup.at(end)] += weight;
    });
    rows[i].assign(acc.begin(), acc.end());
  });

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < size; ++i) {
    for (const auto& [j, v] : rows[i]) {
      triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), v);
    }
  }
  op.matrix.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return op;
}

NeighborCount neighbor_count(const MultiIndex& n, const Params& params) {
  NeighborCount out;
  std::map<MultiIndex, double> ends;
  for_each_walk(n, params, [&](const MultiIndex& end, double weight) {
    ++out.paths;
    ends[end] += weight;
  });
  for (const auto& [idx, v] : ends) {
    if (v != 0.0) ++out.distinct;
  }
  return out;
}

PowerIterationResult power_norm(const Matrix& x, double tol, int max_iterations) {
  linalg::require_square(x, "power_norm");
  const Eigen::Index n = x.rows();
  PowerIterationResult res;
  if (n == 0) return res;
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Vector y = x * v;
    const double est = y.norm();
    res.iterations = it;
    if (est == 0.0) {
      res.value = 0.0;
      return res;
    }
    v = y / est;
    if (std::abs(est - prev) <= tol * est) {
      res.value = est;
      return res;
    }
    prev = est;
  }
  throw ConvergenceError("power_norm: no convergence", max_iterations);
}

double operator_norm(const TruncatedOperator& op) { return power_norm(op.interior_block()).value; }

Vector example_coeffs(const std::vector<MultiIndex>& basis, int n_bodies) {
  if (basis.empty()) throw ValidationError("example_coeffs: empty basis");
  Vector a(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double prod = 1.0;
    for (int nk : basis[i]) prod /= (nk + n_bodies);
    a(static_cast<Eigen::Index>(i)) = prod;
  }
  return a;
}

double neighbor_ratio_bound(const TruncatedOperator& op, const Vector& coeffs) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : op.interior_rows()) {
    const double here = coeffs(static_cast<Eigen::Index>(i));
    for (decltype(op.matrix)::InnerIterator it(op.matrix, static_cast<Eigen::Index>(i)); it; ++it) {
      best = std::min(best, coeffs(it.col()) / here);
    }
  }
  return best;
}

QuadraticForm quadratic_form(const TruncatedOperator& op, const Vector& coeffs) {
  if (coeffs.size() != static_cast<Eigen::Index>(op.size())) {
    throw DimensionError("quadratic_form: coefficients are not aligned with the basis");
  }
  Vector a = coeffs;
  for (std::size_t i = 0; i < op.size(); ++i) {
    if (op.boundary[i]) a(static_cast<Eigen::Index>(i)) = 0.0;
  }
  QuadraticForm qf;
  qf.value = a.dot(op.matrix * a);
  qf.norm_squared = a.squaredNorm();
  const double nb = op.n_bodies;
  qf.reference = nb * (nb + 1.0) * qf.norm_squared;
  qf.ratio = qf.reference > 0.0 ? qf.value / qf.reference : 0.0;
  qf.expectation = qf.norm_squared > 0.0 ? qf.value / qf.norm_squared : 0.0;
  return qf;
}

std::vector<MultiIndex> parity_subset(const std::vector<MultiIndex>& basis, Parity parity) {
  const int want = parity == Parity::even ? 0 : 1;
  std::vector<MultiIndex> out;
  for (const auto& n : basis) {
    if (degree(n) % 2 == want) out.push_back(n);
  }
  return out;
}

Vector restrict_parity(const TruncatedOperator& op, const Vector& coeffs, Parity parity) {
  const int want = parity == Parity::even ? 0 : 1;
  Vector out = coeffs;
  for (std::size_t i = 0; i < op.size(); ++i) {
    if (degree(op.basis[i]) % 2 != want) out(static_cast<Eigen::Index>(i)) = 0.0;
  }
  return out;
}

const CriterionResult* CriteriaReport::find(const std::string& name) const {
  for (const auto& c : criteria) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

CriteriaReport criteria_check(const Params& params, double omega_expectation, double spin) {
  params.validate();
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double n = params.n_bodies;
  const double w = params.w;
  const double sm1 = params.sigma - 1.0;
  const double e0 = 0.5 * params.omega() * n;

  CriteriaReport rep;
  rep.spin = spin;
  rep.omega_expectation = omega_expectation;
  rep.delta = 0.5 * sm1 * params.spring - w * n;

  rep.criteria.push_back({"i", true, e0, "ground energy bound"});

  const double reqone = spin == 0.0 ? inf : params.epsilon * e0 / (spin * spin);
  rep.criteria.push_back({"ii", w <= reqone, reqone, spin == 0.0 ? "S = 0, no constraint" : ""});

  rep.criteria.push_back({"iii", true, 0.0, "real wavefunction, Im psi = 0"});

  const double first = sm1 * params.spring / (2.0 * n);
  if (rep.delta > 0.0) {
    const double second = spin == 0.0 ? inf : std::pow(sm1 * std::pow(rep.delta, 3) / (2.0 * params.mass), 0.25) / std::abs(spin);
    const double bound = std::min(first, second);
    rep.criteria.push_back({"iv", w < bound, bound, ""});
  } else {
    rep.criteria.push_back({"iv", false, first, "delta <= 0, unsatisfiable"});
  }

  const double reqthree = omega_expectation > 0.0 ? params.sigma / (4.0 * omega_expectation) : inf;
  rep.criteria.push_back({"v", w >= reqthree, reqthree, ""});

  rep.window_lower = reqthree;
  rep.window_upper = std::min(reqone, first);
  rep.window_nonempty = rep.window_lower < rep.window_upper;
  rep.all_pass = std::all_of(rep.criteria.begin(), rep.criteria.end(), [](const auto& c) { return c.passed; });

  if (params.n_bodies <= 4 && rep.delta > 0.0) {
    const auto nb = static_cast<Eigen::Index>(params.n_bodies);
    Matrix a = Matrix::Constant(nb, nb, w);
    a.diagonal().array() -= 0.5 * sm1 * params.spring;
    const Vector ones = Vector::Ones(nb);
    DispersionDebug dbg;
    dbg.alpha = ones.dot(linalg::solve(a, ones));
    const Vector b = linalg::solve(a, Vector(w * spin * ones));
    dbg.b_value = -b.dot(a * b);
    dbg.a_eigenvalues = linalg::sym_eigen(a).eigenvalues;
    double prod = 1.0;
    for (Eigen::Index k = 0; k < nb; ++k) prod *= -dbg.a_eigenvalues(k);
    dbg.b_tilde = dbg.b_value * std::sqrt(prod);
    dbg.c_value = sm1 * rep.delta * n * n * prod / (8.0 * params.mass);
    dbg.discriminant = dbg.b_tilde * dbg.b_tilde - 4.0 * dbg.c_value;
    rep.debug = dbg;
  }
  return rep;
}

CriteriaReport scenario_a(const Params& params, int degree_cap, Parity parity) {
  const TruncatedOperator op = build_omega(params, degree_cap);
  const Vector coeffs = restrict_parity(op, example_coeffs(op.basis, params.n_bodies), parity);
  const QuadraticForm qf = quadratic_form(op, coeffs);
  return criteria_check(params, qf.expectation, 0.0);
}

std::string format_report(const CriteriaReport& r) {
  std::ostringstream out;
  out << "spin=" << io::format_number(r.spin) << '\n';
  out << "omega_expectation=" << io::format_number(r.omega_expectation) << '\n';
  out << "delta=" << io::format_number(r.delta) << '\n';
  for (const auto& c : r.criteria) {
    out << "criterion_" << c.name << '=' << (c.passed ? "pass" : "fail") << '\n';
    out << "criterion_" << c.name << ".bound=" << io::format_number(c.bound) << '\n';
    if (!c.note.empty()) out << "criterion_" << c.name << ".note=" << c.note << '\n';
  }
  out << "window_lower=" << io::format_number(r.window_lower) << '\n';
  out << "window_upper=" << io::format_number(r.window_upper) << '\n';
  out << "window_nonempty=" << (r.window_nonempty ? "true" : "false") << '\n';
  out << "all_pass=" << (r.all_pass ? "true" : "false") << '\n';
  if (r.debug) {
    out << "debug.alpha=" << io::format_number(r.debug->alpha) << '\n';
    out << "debug.B=" << io::format_number(r.debug->b_value) << '\n';
    out << "debug.B_tilde=" << io::format_number(r.debug->b_tilde) << '\n';
    out << "debug.C=" << io::format_number(r.debug->c_value) << '\n';
    out << "debug.discriminant=" << io::format_number(r.debug->discriminant) << '\n';
  }
  return out.str();
}

std::string format_multi_index(const MultiIndex& n) {
  std::string s;
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (k) s += ' ';
    s += std::to_string(n[k]);
  }
  return s;
}

void write_operator_csv(const TruncatedOperator& op, const std::filesystem::path& entries,
                        const std::filesystem::path& legend) {
  std::ofstream e(entries);
  if (!e) throw ValidationError("cannot write " + entries.string());
  e << "i,j,value\n";
  for (Eigen::Index i = 0; i < op.matrix.outerSize(); ++i) {
    for (decltype(op.matrix)::InnerIterator it(op.matrix, i); it; ++it) {
      e << i << ',' << it.col() << ',' << io::format_number(it.value()) << '\n';
    }
  }
  std::ofstream l(legend);
  if (!l) throw ValidationError("cannot write " + legend.string());
  l << "index,multi_index,boundary\n";
  for (std::size_t i = 0; i < op.size(); ++i) {
    l << i << ',' << format_multi_index(op.basis[i]) << ',' << (op.boundary[i] ? 1 : 0) << '\n';
  }
}

}  // namespace nlwave::continuum
