#include "nlwave/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlwave/io.hpp"

namespace nlwave {

namespace {

constexpr double kDegenerateZ = 1e-10;

NamedCheck check(std::string name, bool passed, double value, std::string note = {}) {
  return NamedCheck{std::move(name), passed, value, std::move(note)};
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Smallest σ with diag(f) ≤ (σ−1)K, i.e. 1 + λmax(K^{-1/2} diag(f) K^{-1/2}).
double minimal_sigma(const Matrix& k, const Vector& f) {
  const auto ek = linalg::sym_eigen(k);
  const Matrix k_inv_half = ek.apply([](double l) { return 1.0 / std::sqrt(l); });
  Matrix x = k_inv_half * f.asDiagonal() * k_inv_half;
  x = (0.5 * (x + x.transpose())).eval();
  const double top = linalg::sym_eigen(x).max();
  return 1.0 + std::max(top, 1e-12);
}

}  // namespace

const NamedCheck* DciVerdict::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

BlockPieces nonlinear_pieces(const WaveState& state, const SpinModel& model) {
  if (model.w < 0.0) throw DomainError("nonlinear_pieces: w must be >= 0");
  if (state.size() != model.space.n) throw DimensionError("nonlinear_pieces: state length does not match the model");
  const Vector& s = model.space.s;
  const double root = 2.0 * std::sqrt(model.w);

  BlockPieces bp;
  bp.spin = spin_observable(state, model.space);
  bp.u = root * s.cwiseProduct(state.p);
  bp.v = root * s.cwiseProduct(state.q);
  bp.f = nonlinear_weights(state.q, state.p, model);
  bp.e = model.k;
  bp.e.diagonal() += bp.f;
  bp.a = bp.u * bp.v.transpose();
  bp.d = -bp.a;
  bp.b = bp.e - bp.u * bp.u.transpose();
  bp.c = -bp.e + bp.v * bp.v.transpose();
  return bp;
}

XyzQuantities finite_xyz(const BlockPieces& pieces) {
  const auto lu = linalg::lu_factor(pieces.e);
  const Vector einv_u = lu.solve(pieces.u);
  const Vector einv_v = lu.solve(pieces.v);
  XyzQuantities out;
  out.x = pieces.v.dot(einv_v);
  out.y = pieces.v.dot(einv_u);
  out.z = pieces.u.dot(einv_u);
  out.spin = pieces.spin;
  return out;
}

double closed_form_det(const BlockPieces& pieces) {
  const XyzQuantities q = finite_xyz(pieces);
  if (std::abs(1.0 - q.z) <= kDegenerateZ) {
    throw DegenerateUpdateError("closed_form_det: u^t E^-1 u = 1, B is singular");
  }
  const double det_e = linalg::lu_determinant(pieces.e);
  return det_e * det_e * (1.0 - q.z) * (1.0 - q.x - q.y * q.y / (1.0 - q.z));
}

std::vector<NamedCheck> sufficiency_report(const BlockPieces& pieces, const Matrix& k,
                                           const SufficiencyOptions& options) {
  std::vector<NamedCheck> out;
  if (!linalg::is_symmetric(pieces.e)) throw ContractError("sufficiency_report: E is not symmetric");

  const double e_min = linalg::sym_eigen(pieces.e).min();
  const bool e_pos = e_min > 0.0;
  out.push_back(check("E_positive_definite", e_pos, e_min));
  if (linalg::lu_factor(pieces.e).weak_pivot() >= 0) {
    out.push_back(check("E_invertible", false, 0.0, "remaining conditions not evaluated"));
    return out;
  }
  out.push_back(check("E_invertible", true, linalg::lu_determinant(pieces.e)));

  const XyzQuantities q = finite_xyz(pieces);
  const bool z_ok = std::abs(1.0 - q.z) > kDegenerateZ;
  const double top2_value = z_ok ? q.x + q.y * q.y / (1.0 - q.z) : std::numeric_limits<double>::quiet_NaN();
  const bool top1 = q.z < 1.0 && z_ok;
  const bool bottom1 = q.z > 1.0 && z_ok;
  const bool top2 = z_ok && top2_value > 1.0;
  const bool bottom2 = z_ok && top2_value < 1.0;

  out.push_back(check("top1", top1, q.z, z_ok ? (q.z < 1.0 ? "top" : "bottom") : "degenerate"));
  out.push_back(check("bottom1", bottom1, q.z));
  out.push_back(check("top2", top2, top2_value));
  out.push_back(check("bottom2", bottom2, top2_value));
  out.push_back(check("theorem2_top", top1 && top2, top2_value));
  out.push_back(check("theorem2_bottom", bottom1 && bottom2, top2_value));
  out.push_back(check("corollary2_1", top1 && q.x > 1.0, q.x));

  // Corollary 2.2 with (η, σ).
  const double eta = options.eta.value_or(e_min);
  const double sigma = options.sigma.value_or(minimal_sigma(k, pieces.f));
  const double k_min = linalg::sym_eigen(k).min();
  const bool c_i = linalg::is_symmetric(k) && k_min > 0.0;
  const bool c_ii = eta > 0.0 && e_min >= eta;
  const double utu = pieces.u.squaredNorm();
  const bool c_iii = utu < eta;
  bool c_iv = false;
  double vkv = std::numeric_limits<double>::quiet_NaN();
  if (c_i && sigma > 1.0) {
    Matrix gap = (sigma - 1.0) * k;
    gap.diagonal() -= pieces.f;
    const double gap_min = linalg::sym_eigen(gap).min();
    c_iv = gap_min >= -1e-12 * std::max(1.0, gap.cwiseAbs().maxCoeff());
    vkv = pieces.v.dot(linalg::solve(k, pieces.v));
  }
  const bool c_v = c_i && vkv > sigma;
  out.push_back(check("corollary2_2_i", c_i, k_min));
  out.push_back(check("corollary2_2_ii", c_ii, eta));
  out.push_back(check("corollary2_2_iii", c_iii, utu));
  out.push_back(check("corollary2_2_iv", c_iv, sigma));
  out.push_back(check("corollary2_2_v", c_v, vkv));
  out.push_back(check("corollary2_2", c_i && c_ii && c_iii && c_iv && c_v, sigma));

  // Necessary condition for top 2 (E > 0, z < 1): x + z > 1.
  if (e_pos && top1) {
    out.push_back(check("corollary2_3_necessary", q.x + q.z > 1.0, q.x + q.z, top2 ? "top2 holds" : "top2 fails"));
  } else {
    out.push_back(check("corollary2_3_necessary", false, q.x + q.z, "not applicable"));
  }

  out.push_back(check("lemma1_hypothesis", e_pos && c_iii && eta > 0.0 && e_min >= eta, utu));
  out.push_back(check("lemma1_conclusion", q.z < 1.0, q.z));
  const double xi2 = c_i ? vkv : std::numeric_limits<double>::quiet_NaN();
  out.push_back(check("lemma2_hypothesis", c_i && e_pos && c_iv && xi2 > sigma, xi2));
  out.push_back(check("lemma2_conclusion", q.x > 1.0, q.x));

  if (e_pos) {
    const double bound = std::sqrt(std::max(0.0, q.x * q.z));
    out.push_back(check("cauchy_schwarz", std::abs(q.y) <= bound + 1e-12 * std::max(1.0, bound), std::abs(q.y) - bound));
  }
  return out;
}

DciVerdict det_m(const WaveState& state, const SpinModel& model) {
  DciVerdict verdict;
  const Matrix m = hessian_m(state, model);
  verdict.det_direct = linalg::lu_determinant(m);
  verdict.holds = verdict.det_direct < 0.0;
  verdict.spectrum = linalg::general_eigenvalues(m);

  const BlockPieces pieces = nonlinear_pieces(state, model);
  verdict.det_composed = linalg::lu_determinant(pieces.composed());
  verdict.sign_agreement = sign_of(verdict.det_direct) == sign_of(verdict.det_composed);

  const auto e_lu = linalg::lu_factor(pieces.e);
  bool b_invertible = e_lu.weak_pivot() < 0;
  if (b_invertible) {
    const double z = pieces.u.dot(e_lu.solve(pieces.u));
    b_invertible = std::abs(1.0 - z) > kDegenerateZ;
  }
  if (b_invertible) {
    verdict.det_closed = closed_form_det(pieces);
    const double scale = std::max(std::abs(verdict.det_composed), std::numeric_limits<double>::min());
    const double rel = std::abs(*verdict.det_closed - verdict.det_composed) / scale;
    verdict.checks.push_back(check("closed_vs_composed", rel <= 1e-8, rel));
  } else {
    verdict.checks.push_back(check("closed_vs_composed", false, 0.0, "B singular, closed form unavailable"));
  }
  verdict.checks.push_back(check("sign_agreement", verdict.sign_agreement, verdict.det_composed));
  verdict.checks.push_back(check("mixed_real_parts", has_mixed_real_parts(verdict.spectrum), 0.0));
  for (auto& c : sufficiency_report(pieces, model.k)) verdict.checks.push_back(std::move(c));
  return verdict;
}

XyzQuantities asymptotic_xyz(const WaveState& state, const SpinConfigSpace& space) {
  if (state.size() != space.n) throw DimensionError("asymptotic_xyz: state length does not match the space");
  const double spin = spin_observable(state, space);
  if (!(std::abs(spin) < 0.25)) {
    throw PreconditionError("asymptotic_xyz: requires |S| < 1/4, got S = " + io::format_number(spin));
  }
  XyzQuantities out;
  out.spin = spin;
  for (Eigen::Index k = 0; k < space.n; ++k) {
    const double weight = 4.0 * space.s(k) / (space.s(k) - 2.0 * spin);
    out.x_inf += weight * state.q(k) * state.q(k);
    out.y_inf += weight * state.q(k) * state.p(k);
    out.z_inf += weight * state.p(k) * state.p(k);
  }
  return out;
}

Theorem3Prediction theorem3_predict(const WaveState& state, const SpinConfigSpace& space) {
  Theorem3Prediction pr;
  pr.normalized = std::abs(state.norm_squared() - 1.0) <= 1e-10;
  const double spin = spin_observable(state, space);
  pr.spin_below_quarter = std::abs(spin) < 0.25;
  if (!pr.spin_below_quarter) {
    pr.xyz.spin = spin;
    return pr;
  }
  pr.xyz = asymptotic_xyz(state, space);
  const auto& q = pr.xyz;
  pr.z_inf_below_one = q.z_inf < 1.0;
  pr.product_form = (q.x_inf - 1.0) * (1.0 - q.z_inf) + q.y_inf * q.y_inf > 1.0;
  pr.x_inf_above_one = q.x_inf > 1.0;
  pr.predicted_unstable = pr.normalized && pr.z_inf_below_one && (pr.product_form || pr.x_inf_above_one);
  return pr;
}

WstarResult wstar_search(const WaveState& state, const SpinModel& model_template, double w_max,
                         const WstarOptions& options) {
  if (!(w_max > 0.0)) throw ValidationError("wstar_search: w_max must be > 0");
  if (!(options.tol > 0.0)) throw ValidationError("wstar_search: tol must be > 0");
  if (options.grid_points < 2) throw ValidationError("wstar_search: grid_points must be >= 2");

  auto det_at = [&](double w) { return linalg::lu_determinant(hessian_m(state, model_template.with_w(w))); };

  WstarResult res;
  const int n = options.grid_points;
  res.grid.resize(n);
  res.grid_det.resize(n);
  for (int i = 0; i < n; ++i) {
    res.grid[i] = w_max * static_cast<double>(i) / static_cast<double>(n - 1);
    res.grid_det[i] = det_at(res.grid[i]);
  }

  for (int i = 0; i + 1 < n; ++i) {
    const int sa = sign_of(res.grid_det[i]);
    const int sb = sign_of(res.grid_det[i + 1]);
    if (sa == 0 || sb == 0 || sa == sb) {
      if (sa == 0 && i > 0 && sign_of(res.grid_det[i - 1]) * sb < 0) res.crossings.push_back(res.grid[i]);
      continue;
    }
    double lo = res.grid[i], hi = res.grid[i + 1];
    while (hi - lo > options.tol) {
      const double mid = 0.5 * (lo + hi);
      const int sm = sign_of(det_at(mid));
      if (sm == 0) {
        lo = hi = mid;
        break;
      }
      if (sm == sa) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    res.crossings.push_back(0.5 * (lo + hi));
  }
  std::sort(res.crossings.begin(), res.crossings.end());
  if (!res.crossings.empty()) res.wstar = res.crossings.back();
  return res;
}

DciSeries dci_time_series(const WaveState& state, const SpinModel& model, const IntegratorConfig& cfg) {
  Monitors mon;
  mon.det_m = true;
  TrajectoryRecord rec = evolve(state, model, cfg, mon);
  return DciSeries{std::move(rec.times), std::move(*rec.det_m)};
}

bool has_mixed_real_parts(const ComplexList& spectrum, double tol) {
  bool pos = false, neg = false;
  for (const auto& l : spectrum) {
    if (l.real() > tol) pos = true;
    if (l.real() < -tol) neg = true;
  }
  return pos && neg;
}

std::string format_verdict(const DciVerdict& verdict) {
  std::ostringstream out;
  out << "det_direct=" << io::format_number(verdict.det_direct) << '\n';
  out << "det_composed=" << io::format_number(verdict.det_composed) << '\n';
  out << "det_closed=" << (verdict.det_closed ? io::format_number(*verdict.det_closed) : std::string("none")) << '\n';
  out << "holds=" << (verdict.holds ? "true" : "false") << '\n';
  out << "sign_agreement=" << (verdict.sign_agreement ? "true" : "false") << '\n';
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& l : verdict.spectrum) max_re = std::max(max_re, l.real());
  out << "max_real_eigenvalue=" << io::format_number(max_re) << '\n';
  for (const auto& c : verdict.checks) {
    out << c.name << '=' << (c.passed ? "true" : "false") << '\n';
    out << c.name << ".value=" << io::format_number(c.value) << '\n';
    if (!c.note.empty()) out << c.name << ".note=" << c.note << '\n';
  }
  return out.str();
}

}  // namespace nlwave
