#include "nlwave/identities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "nlwave/io.hpp"
#include "nlwave/linalg.hpp"
#include "nlwave/rng.hpp"

namespace nlwave::identities {

namespace {

double rel(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

Eigen::Index draw_size(Rng& rng) { return 1 + static_cast<Eigen::Index>(rng.next() % 8); }

// Gaussian plus a diagonal shift keeps the draws comfortably conditioned.
Matrix well_conditioned(Rng& rng, Eigen::Index n) {
  Matrix x = rng.gaussian_matrix(n, n);
  x.diagonal().array() += 2.0 * std::sqrt(static_cast<double>(n));
  return x;
}

Matrix random_spd(Rng& rng, Eigen::Index n) {
  const Matrix g = rng.gaussian_matrix(n, n);
  Matrix e = g * g.transpose() / static_cast<double>(n);
  e.diagonal().array() += 1.0;
  return e;
}

IdentityCheck run(const std::string& name, int instances, Rng& rng, const std::function<double(Rng&)>& draw) {
  IdentityCheck c;
  c.name = name;
  c.instances = instances;
  c.tolerance = kIdentityTol;
  for (int i = 0; i < instances; ++i) c.max_error = std::max(c.max_error, draw(rng));
  c.passed = c.max_error <= c.tolerance;
  return c;
}

}  // namespace

std::vector<IdentityCheck> run_suite(std::uint64_t seed, int instances) {
  Rng rng(seed);
  std::vector<IdentityCheck> out;

  out.push_back(run("product", instances, rng, [](Rng& r) {
    const auto n = draw_size(r);
    const Matrix x = r.gaussian_matrix(n, n), y = r.gaussian_matrix(n, n);
    return rel(linalg::lu_determinant(Matrix(x * y)), linalg::lu_determinant(x) * linalg::lu_determinant(y));
  }));
  out.push_back(run("transpose", instances, rng, [](Rng& r) {
    const auto n = draw_size(r);
    const Matrix x = r.gaussian_matrix(n, n);
    return rel(linalg::lu_determinant(Matrix(x.transpose())), linalg::lu_determinant(x));
  }));
  out.push_back(run("inverse", instances, rng, [](Rng& r) {
    const auto n = draw_size(r);
    const Matrix x = well_conditioned(r, n);
    return rel(linalg::lu_determinant(linalg::inverse(x)), 1.0 / linalg::lu_determinant(x));
  }));
  out.push_back(run("reversal", instances, rng, [](Rng& r) {
    const auto n = draw_size(r);
    const Matrix a = r.gaussian_matrix(n, n), b = r.gaussian_matrix(n, n);
    const Matrix c = r.gaussian_matrix(n, n), d = r.gaussian_matrix(n, n);
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return rel(linalg::lu_determinant(linalg::compose_blocks(b, a, d, c)),
               sign * linalg::lu_determinant(linalg::compose_blocks(a, b, c, d)));
  }));
  out.push_back(run("sylvester", instances, rng, [](Rng& r) {
    const auto n = draw_size(r);
    const Matrix x = well_conditioned(r, n);
    const Vector u = r.gaussian_vector(n), v = r.gaussian_vector(n);
    return rel(linalg::sylvester_det(x, u, v), linalg::lu_determinant(Matrix(x + v * u.transpose())));
  }));
  out.push_back(run("block_reduction", instances, rng, [](Rng& r) {
    const auto n = draw_size(r);
    const Matrix a = r.gaussian_matrix(n, n), b = well_conditioned(r, n);
    const Matrix c = r.gaussian_matrix(n, n), d = r.gaussian_matrix(n, n);
    return rel(linalg::block_det_reduction(a, b, c, d), linalg::lu_determinant(linalg::compose_blocks(a, b, c, d)));
  }));
  out.push_back(run("rank_one_inverse", instances, rng, [](Rng& r) {
    const auto n = draw_size(r);
    const Matrix e = random_spd(r, n);
    const Vector u = 0.3 * r.gaussian_vector(n) / std::sqrt(static_cast<double>(n));
    const Matrix b = e - u * u.transpose();
    const Matrix binv = linalg::rank_one_inverse_update(e, u);
    return (b * binv - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  }));
  return out;
}

std::string format_suite(const std::vector<IdentityCheck>& checks) {
  std::ostringstream out;
  bool all = true;
  for (const auto& c : checks) {
    out << c.name << '=' << (c.passed ? "pass" : "fail") << '\n';
    out << c.name << ".instances=" << c.instances << '\n';
    out << c.name << ".max_error=" << io::format_number(c.max_error) << '\n';
    out << c.name << ".tolerance=" << io::format_number(c.tolerance) << '\n';
    all = all && c.passed;
  }
  out << "all_pass=" << (all ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace nlwave::identities
