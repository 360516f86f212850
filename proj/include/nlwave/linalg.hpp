#pragma once

// Dense kernels: LU with partial pivoting, cyclic Jacobi for symmetric
// matrices, Hessenberg + Francis double-shift QR for general spectra, and the
// rank-one / block determinant identities built on top of them.
//
// Everything is templated on the scalar and accepts any Eigen dense
// expression; results are returned by value.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlwave/errors.hpp"

namespace nlwave {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using ComplexList = std::vector<std::complex<double>>;

namespace linalg {

inline constexpr double kSingularRelTol = 1e-12;
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr int kQrMaxIterations = 100;

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& x, const char* op) {
  if (x.rows() != x.cols() || x.rows() < 1) {
    throw DimensionError(std::string(op) + ": expected a nonempty square matrix, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& x, double tol = kSymmetryTol) {
  if (x.rows() != x.cols()) return false;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.cols(); ++j) {
      const double a = static_cast<double>(x(i, j));
      const double b = static_cast<double>(x(j, i));
      if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) return false;
    }
  }
  return true;
}

/// P·A = L·U with L unit lower triangular; both factors share `lu`.
template <typename Scalar>
struct LuFactorization {
  MatrixX<Scalar> lu;
  std::vector<Eigen::Index> perm;  // row i of P·A is row perm[i] of A
  int parity = 1;
  Scalar scale = Scalar(0);  // infinity norm of the factored matrix

  Eigen::Index size() const { return lu.rows(); }

  Scalar determinant() const {
    Scalar det = Scalar(parity);
    for (Eigen::Index i = 0; i < lu.rows(); ++i) det *= lu(i, i);
    return det;
  }

  /// First pivot below the singularity threshold, or -1.
  Eigen::Index weak_pivot() const {
    const Scalar threshold = Scalar(kSingularRelTol) * scale;
    for (Eigen::Index i = 0; i < lu.rows(); ++i) {
      if (!(std::abs(lu(i, i)) >= threshold) || lu(i, i) == Scalar(0)) return i;
    }
    return -1;
  }

  MatrixX<Scalar> lower() const {
    MatrixX<Scalar> l = lu.template triangularView<Eigen::StrictlyLower>();
    l.diagonal().setOnes();
    return l;
  }
  MatrixX<Scalar> upper() const { return lu.template triangularView<Eigen::Upper>(); }
  MatrixX<Scalar> permutation() const {
    MatrixX<Scalar> p = MatrixX<Scalar>::Zero(size(), size());
    for (Eigen::Index i = 0; i < size(); ++i) p(i, perm[i]) = Scalar(1);
    return p;
  }

  template <typename Rhs>
  VectorX<Scalar> solve(const Eigen::MatrixBase<Rhs>& b) const {
    const Eigen::Index n = size();
    if (b.size() != n) {
      throw DimensionError("solve: rhs has length " + std::to_string(b.size()) + ", expected " +
                           std::to_string(n));
    }
    if (const auto k = weak_pivot(); k >= 0) {
      throw SingularityError("solve: matrix is singular to tolerance", k);
    }
    VectorX<Scalar> y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar acc = b(perm[i]);
      for (Eigen::Index j = 0; j < i; ++j) acc -= lu(i, j) * y(j);
      y(i) = acc;
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      Scalar acc = y(i);
      for (Eigen::Index j = i + 1; j < n; ++j) acc -= lu(i, j) * y(j);
      y(i) = acc / lu(i, i);
    }
    return y;
  }

  MatrixX<Scalar> inverse() const {
    MatrixX<Scalar> inv(size(), size());
    for (Eigen::Index j = 0; j < size(); ++j) inv.col(j) = solve(VectorX<Scalar>::Unit(size(), j));
    return inv;
  }
};

template <typename Derived>
LuFactorization<typename Derived::Scalar> lu_factor(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  require_square(x, "lu_factor");
  const Eigen::Index n = x.rows();
  LuFactorization<Scalar> f;
  f.lu = x;
  f.perm.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) f.perm[i] = i;
  f.scale = f.lu.cwiseAbs().rowwise().sum().maxCoeff();

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    Scalar best = std::abs(f.lu(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(f.lu(i, k)) > best) {
        best = std::abs(f.lu(i, k));
        piv = i;
      }
    }
    if (piv != k) {
      f.lu.row(k).swap(f.lu.row(piv));
      std::swap(f.perm[k], f.perm[piv]);
      f.parity = -f.parity;
    }
    const Scalar pivot = f.lu(k, k);
    if (pivot == Scalar(0)) continue;  // exact zero column; determinant is 0
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const Scalar factor = f.lu(i, k) / pivot;
      f.lu(i, k) = factor;
      if (factor != Scalar(0)) {
        f.lu.row(i).tail(n - k - 1) -= factor * f.lu.row(k).tail(n - k - 1);
      }
    }
  }
  return f;
}

template <typename Derived>
typename Derived::Scalar lu_determinant(const Eigen::MatrixBase<Derived>& x) {
  return lu_factor(x).determinant();
}

template <typename Derived, typename Rhs>
VectorX<typename Derived::Scalar> solve(const Eigen::MatrixBase<Derived>& x,
                                        const Eigen::MatrixBase<Rhs>& b) {
  return lu_factor(x).solve(b);
}

template <typename Derived>
MatrixX<typename Derived::Scalar> inverse(const Eigen::MatrixBase<Derived>& x) {
  return lu_factor(x).inverse();
}

template <typename Scalar>
struct EigenDecomposition {
  VectorX<Scalar> eigenvalues;   // ascending
  MatrixX<Scalar> eigenvectors;  // column n pairs with eigenvalues(n)

  Scalar min() const { return eigenvalues(0); }
  Scalar max() const { return eigenvalues(eigenvalues.size() - 1); }

  /// O^t·diag[F(λ)]·O, i.e. V·diag[F(λ)]·V^t.
  template <typename F>
  MatrixX<Scalar> apply(F&& fn) const {
    VectorX<Scalar> mapped = eigenvalues.unaryExpr(fn);
    return eigenvectors * mapped.asDiagonal() * eigenvectors.transpose();
  }
};

/// Cyclic Jacobi rotations. Accurate for the small dimensions used here.
template <typename Derived>
EigenDecomposition<typename Derived::Scalar> sym_eigen(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  require_square(x, "sym_eigen");
  if (!is_symmetric(x)) throw ContractError("sym_eigen: input matrix is not symmetric");

  const Eigen::Index n = x.rows();
  MatrixX<Scalar> a = (x + x.transpose()) / Scalar(2);
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);
  const Scalar total = a.norm();

  int sweep = 0;
  for (; sweep < kJacobiMaxSweeps; ++sweep) {
    Scalar off = Scalar(0);
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= std::numeric_limits<Scalar>::epsilon() * total || off == Scalar(0)) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        const Scalar sign = theta >= Scalar(0) ? Scalar(1) : Scalar(-1);
        const Scalar t = sign / (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = Scalar(0);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kJacobiMaxSweeps) throw ConvergenceError("sym_eigen: Jacobi sweeps did not converge", sweep);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  EigenDecomposition<Scalar> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = a(order[i], order[i]);
    out.eigenvectors.col(i) = v.col(order[i]);
  }
  return out;
}

/// Householder reduction to upper Hessenberg form (similarity transform).
template <typename Derived>
MatrixX<typename Derived::Scalar> hessenberg(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  require_square(x, "hessenberg");
  const Eigen::Index n = x.rows();
  MatrixX<Scalar> h = x;
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    VectorX<Scalar> col = h.col(k).tail(n - k - 1);
    const Scalar alpha = col.norm();
    if (alpha == Scalar(0)) continue;
    VectorX<Scalar> reflector = col;
    reflector(0) += (col(0) >= Scalar(0) ? alpha : -alpha);
    const Scalar rnorm = reflector.norm();
    if (rnorm == Scalar(0)) continue;
    reflector /= rnorm;
    auto rows = h.bottomRows(n - k - 1);
    rows -= Scalar(2) * reflector * (reflector.transpose() * rows);
    auto cols = h.rightCols(n - k - 1);
    cols -= Scalar(2) * (cols * reflector) * reflector.transpose();
    h.col(k).tail(n - k - 2).setZero();
  }
  return h;
}

/// Every eigenvalue of a real square matrix, sorted by (real, imag).
///
/// Hessenberg reduction followed by implicit Francis double-shift QR with
/// deflation; each eigenvalue may take at most kQrMaxIterations sweeps.
template <typename Derived>
ComplexList general_eigenvalues(const Eigen::MatrixBase<Derived>& x) {
  require_square(x, "general_eigenvalues");
  const Eigen::Index n = x.rows();
  Matrix a = hessenberg(x.template cast<double>().eval());
  ComplexList out(static_cast<std::size_t>(n));
  const double eps = std::numeric_limits<double>::epsilon();

  double anorm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = std::max<Eigen::Index>(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

  Eigen::Index hi = n - 1;
  double shift_total = 0.0;
  long total_iterations = 0;
  while (hi >= 0) {
    int its = 0;
    Eigen::Index lo;
    while (true) {
      // Look for a negligible subdiagonal element to split the problem.
      for (lo = hi; lo > 0; --lo) {
        double s = std::abs(a(lo - 1, lo - 1)) + std::abs(a(lo, lo));
        if (s == 0.0) s = anorm;
        if (std::abs(a(lo, lo - 1)) <= eps * s) {
          a(lo, lo - 1) = 0.0;
          break;
        }
      }
      double xx = a(hi, hi);
      if (lo == hi) {
        out[static_cast<std::size_t>(hi)] = xx + shift_total;
        --hi;
        break;
      }
      double yy = a(hi - 1, hi - 1);
      double ww = a(hi, hi - 1) * a(hi - 1, hi);
      if (lo == hi - 1) {
        const double p = 0.5 * (yy - xx);
        const double q = p * p + ww;
        double z = std::sqrt(std::abs(q));
        xx += shift_total;
        if (q >= 0.0) {
          z = p + (p >= 0.0 ? z : -z);
          out[static_cast<std::size_t>(hi - 1)] = out[static_cast<std::size_t>(hi)] = xx + z;
          if (z != 0.0) out[static_cast<std::size_t>(hi)] = xx - ww / z;
        } else {
          out[static_cast<std::size_t>(hi)] = std::complex<double>(xx + p, -z);
          out[static_cast<std::size_t>(hi - 1)] = std::complex<double>(xx + p, z);
        }
        hi -= 2;
        break;
      }
      if (its == kQrMaxIterations) {
        throw ConvergenceError("general_eigenvalues: QR iteration did not converge", total_iterations);
      }
      if (its > 0 && its % 10 == 0) {
        // Exceptional shift.
        shift_total += xx;
        for (Eigen::Index i = 0; i <= hi; ++i) a(i, i) -= xx;
        const double s = std::abs(a(hi, hi - 1)) + std::abs(a(hi - 1, hi - 2));
        yy = xx = 0.75 * s;
        ww = -0.4375 * s * s;
      }
      ++its;
      ++total_iterations;

      Eigen::Index m;
      double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
      for (m = hi - 2; m >= lo; --m) {
        z = a(m, m);
        r = xx - z;
        double s = yy - z;
        p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
        q = a(m + 1, m + 1) - z - r - s;
        r = a(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == lo) break;
        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
        if (u <= eps * v) break;
      }
      for (Eigen::Index i = m; i < hi - 1; ++i) {
        a(i + 2, i) = 0.0;
        if (i != m) a(i + 2, i - 1) = 0.0;
      }
      for (Eigen::Index k = m; k < hi; ++k) {
        double scale = 1.0;
        if (k != m) {
          p = a(k, k - 1);
          q = a(k + 1, k - 1);
          r = (k + 1 != hi) ? a(k + 2, k - 1) : 0.0;
          scale = std::abs(p) + std::abs(q) + std::abs(r);
          if (scale != 0.0) {
            p /= scale;
            q /= scale;
            r /= scale;
          }
        }
        double s = std::sqrt(p * p + q * q + r * r);
        if (p < 0.0) s = -s;
        if (s == 0.0) continue;
        if (k == m) {
          if (lo != m) a(k, k - 1) = -a(k, k - 1);
        } else {
          a(k, k - 1) = -s * scale;
        }
        p += s;
        const double hx = p / s;
        const double hy = q / s;
        const double hz = r / s;
        q /= p;
        r /= p;
        for (Eigen::Index j = k; j <= hi; ++j) {
          double t = a(k, j) + q * a(k + 1, j);
          if (k + 1 != hi) {
            t += r * a(k + 2, j);
            a(k + 2, j) -= t * hz;
          }
          a(k + 1, j) -= t * hy;
          a(k, j) -= t * hx;
        }
        const Eigen::Index mmin = std::min(hi, k + 3);
        for (Eigen::Index i = lo; i <= mmin; ++i) {
          double t = hx * a(i, k) + hy * a(i, k + 1);
          if (k + 1 != hi) {
            t += hz * a(i, k + 2);
            a(i, k + 2) -= t * r;
          }
          a(i, k + 1) -= t * q;
          a(i, k) -= t;
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  });
  return out;
}

/// det(X + v⊗u) = det(X)·[1 + u^t X^{-1} v], with (v⊗u)[i,j] = v_i u_j.
template <typename Derived, typename U, typename V>
typename Derived::Scalar sylvester_det(const Eigen::MatrixBase<Derived>& x, const Eigen::MatrixBase<U>& u,
                                       const Eigen::MatrixBase<V>& v) {
  require_square(x, "sylvester_det");
  if (u.size() != x.rows() || v.size() != x.rows()) {
    throw DimensionError("sylvester_det: vector length does not match matrix size");
  }
  const auto f = lu_factor(x);
  const auto xinv_v = f.solve(v);
  return f.determinant() * (typename Derived::Scalar(1) + u.dot(xinv_v));
}

/// [[A, B], [C, D]] assembled into one 2N×2N matrix.
template <typename A, typename B, typename C, typename D>
MatrixX<typename A::Scalar> compose_blocks(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                                           const Eigen::MatrixBase<C>& c, const Eigen::MatrixBase<D>& d) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index dim : {a.cols(), b.rows(), b.cols(), c.rows(), c.cols(), d.rows(), d.cols()}) {
    if (dim != n) throw DimensionError("compose_blocks: all blocks must be N x N");
  }
  MatrixX<typename A::Scalar> m(2 * n, 2 * n);
  m << a, b, c, d;
  return m;
}

/// R = [[0, I], [I, 0]]; M·R swaps the block columns of M.
template <typename Scalar = double>
MatrixX<Scalar> reversal_matrix(Eigen::Index n) {
  MatrixX<Scalar> r = MatrixX<Scalar>::Zero(2 * n, 2 * n);
  r.topRightCorner(n, n).setIdentity();
  r.bottomLeftCorner(n, n).setIdentity();
  return r;
}

/// det [[A, B], [C, D]] = (−1)^N det B det(C − D B^{-1} A). Requires invertible B.
template <typename A, typename B, typename C, typename D>
typename A::Scalar block_det_reduction(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                                       const Eigen::MatrixBase<C>& c, const Eigen::MatrixBase<D>& d) {
  using Scalar = typename A::Scalar;
  const Eigen::Index n = a.rows();
  for (Eigen::Index dim : {a.cols(), b.rows(), b.cols(), c.rows(), c.cols(), d.rows(), d.cols()}) {
    if (dim != n) throw DimensionError("block_det_reduction: all blocks must be N x N");
  }
  const auto fb = lu_factor(b);
  if (const auto k = fb.weak_pivot(); k >= 0) {
    throw SingularityError("block_det_reduction: B is singular; use lu_determinant on the composed matrix", k);
  }
  MatrixX<Scalar> binv_a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) binv_a.col(j) = fb.solve(a.col(j));
  const MatrixX<Scalar> schur = c - d * binv_a;
  const Scalar sign = (n % 2 == 0) ? Scalar(1) : Scalar(-1);
  return sign * fb.determinant() * lu_determinant(schur);
}

/// (E − u⊗u)^{-1} = E^{-1} + ρ (E^{-1}u)⊗(E^{-1}u), ρ = 1/(1 − u^t E^{-1} u).
template <typename Derived, typename U>
MatrixX<typename Derived::Scalar> rank_one_inverse_update(const Eigen::MatrixBase<Derived>& e,
                                                          const Eigen::MatrixBase<U>& u) {
  using Scalar = typename Derived::Scalar;
  require_square(e, "rank_one_inverse_update");
  if (!is_symmetric(e)) throw ContractError("rank_one_inverse_update: E must be symmetric");
  if (u.size() != e.rows()) throw DimensionError("rank_one_inverse_update: u length mismatch");
  const auto fe = lu_factor(e);
  const MatrixX<Scalar> einv = fe.inverse();
  const VectorX<Scalar> einv_u = einv * u;
  const Scalar z = u.dot(einv_u);
  if (std::abs(Scalar(1) - z) <= Scalar(1e-10)) {
    throw DegenerateUpdateError("rank_one_inverse_update: u^t E^-1 u = 1, E - u*u^t is singular");
  }
  const Scalar rho = Scalar(1) / (Scalar(1) - z);
  return einv + rho * einv_u * einv_u.transpose();
}

}  // namespace linalg
}  // namespace nlwave
