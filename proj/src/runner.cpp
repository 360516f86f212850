#include "nlwave/runner.hpp"

#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nlwave/chaos.hpp"
#include "nlwave/config.hpp"
#include "nlwave/continuum.hpp"
#include "nlwave/identities.hpp"
#include "nlwave/io.hpp"
#include "nlwave/stability.hpp"

#ifndef NLWAVE_VERSION
#define NLWAVE_VERSION "0.0.0"
#endif

namespace nlwave {

namespace fs = std::filesystem;

namespace {

std::string platform_note() {
  std::string os =
#if defined(__linux__)
      "linux";
#elif defined(__APPLE__)
      "macos";
#elif defined(_WIN32)
      "windows";
#else
      "unknown-os";
#endif
  std::string arch =
#if defined(__x86_64__) || defined(_M_X64)
      "x86_64";
#elif defined(__aarch64__)
      "aarch64";
#else
      "unknown-arch";
#endif
  std::string compiler =
#if defined(__clang__)
      "clang " __clang_version__;
#elif defined(__GNUC__)
      "gcc " __VERSION__;
#else
      "unknown-compiler";
#endif
  return os + " " + arch + " " + compiler;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

// Collects output files in write order.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void csv(const std::string& name, const io::CsvTable& table) {
    write([&](const fs::path& p) { io::write_csv_file(p, table); }, name);
  }
  void text(const std::string& name, const std::string& body) {
    write([&](const fs::path& p) { io::write_text_file(p, body); }, name);
  }
  template <typename Fn>
  void custom(const std::string& name, Fn&& fn) {
    write(fn, name);
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  template <typename Fn>
  void write(Fn&& fn, const std::string& name) {
    const fs::path p = dir_ / name;
    try {
      fn(p);
    } catch (const std::exception& e) {
      std::string done;
      for (const auto& f : files_) done += " " + f.filename().string();
      throw ValidationError("writing " + p.string() + " failed (" + e.what() + "); completed:" +
                            (done.empty() ? std::string(" none") : done));
    }
    files_.push_back(p);
  }

  fs::path dir_;
  std::vector<fs::path> files_;
};

io::CsvTable trajectory_table(const TrajectoryRecord& rec) {
  io::CsvTable t;
  t.header = {"t", "spin", "energy", "norm"};
  t.columns = {rec.times, rec.spin, rec.energy, rec.norm};
  if (rec.det_m) {
    t.header.push_back("detM");
    t.columns.push_back(*rec.det_m);
  }
  return t;
}

void run_simulate(const RunConfig& cfg, OutputSet& out) {
  const SpinModel model = model_from_config(cfg);
  const WaveState state = state_from_config(cfg, model.space);
  const IntegratorConfig ic = integrator_from_config(cfg);
  Monitors mon;
  mon.det_m = cfg.get_bool("experiment.detm");
  try {
    out.csv("trajectory.csv", trajectory_table(evolve(state, model, ic, mon)));
  } catch (const TrajectoryError& e) {
    out.csv("trajectory.csv", trajectory_table(e.partial()));
    throw;
  }
}

void run_diverge(const RunConfig& cfg, OutputSet& out) {
  const SpinModel model = model_from_config(cfg);
  const WaveState state = state_from_config(cfg, model.space);
  const IntegratorConfig ic = integrator_from_config(cfg);
  const DivergenceSeries d = divergence_series(state, model, ic, cfg.get_int("experiment.perturb_index"),
                                               cfg.get_real("experiment.epsilon"));
  out.csv("divergence.csv", io::CsvTable{{"t", "log_dev"}, {d.times, d.log_dev}});
  out.csv("maxdev.csv", io::CsvTable{{"t", "max_log_dev"}, {d.times, running_max(d.log_dev)}});
}

void run_mlce(const RunConfig& cfg, OutputSet& out) {
  const SpinModel model = model_from_config(cfg);
  const WaveState state = state_from_config(cfg, model.space);
  const IntegratorConfig ic = integrator_from_config(cfg);
  const auto seed = cfg.get_uint("experiment.seed");
  const long tau = cfg.get_int("experiment.renorm_interval");
  const double tail = cfg.get_real("experiment.tail_fraction");
  const long repeats = cfg.get_int("experiment.repeats");
  if (repeats < 1) throw ValidationError("config: experiment.repeats must be >= 1");

  std::ostringstream summary;
  double acc = 0.0;
  for (long r = 0; r < repeats; ++r) {
    const MlceSeries s = mlce_series(state, model, ic, seed + static_cast<std::uint64_t>(r), tau);
    const double g = mlce_estimate(s, tail);
    acc += g;
    summary << "gamma_hat.seed_" << (seed + static_cast<std::uint64_t>(r)) << '=' << io::format_number(g) << '\n';
    if (r == 0) out.csv("mlce.csv", io::CsvTable{{"t", "gamma"}, {s.times, s.gamma}});
  }
  summary << "gamma_hat=" << io::format_number(acc / static_cast<double>(repeats)) << '\n';
  summary << "repeats=" << repeats << '\n';
  summary << "tail_fraction=" << io::format_number(tail) << '\n';
  out.text("mlce_summary.txt", summary.str());
}

void run_wscan(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
  const SpinModel model = model_from_config(cfg);
  const WaveState state = state_from_config(cfg, model.space);
  const IntegratorConfig ic = integrator_from_config(cfg);
  WScanOptions opt;
  opt.seed = cfg.get_uint("experiment.seed");
  opt.renorm_interval = cfg.get_int("experiment.renorm_interval");
  opt.tail_fraction = cfg.get_real("experiment.tail_fraction");
  opt.repeats = static_cast<int>(cfg.get_int("experiment.repeats"));
  opt.threads = static_cast<int>(cfg.get_int("experiment.threads"));
  const auto rows = w_scan(state, model, w_grid_from_config(cfg), ic, opt);

  io::CsvTable t{{"w", "gamma_hat", "detM_sign"}, {{}, {}, {}}};
  std::ostringstream errors;
  for (const auto& r : rows) {
    t.columns[0].push_back(r.w);
    t.columns[1].push_back(r.gamma_hat);
    t.columns[2].push_back(r.det_sign);
    if (r.error) {
      errors << "w=" << io::format_number(r.w) << " error=" << *r.error << '\n';
      log << "wscan: row w=" << io::format_number(r.w) << " failed: " << *r.error << '\n';
    }
  }
  out.csv("wscan.csv", t);
  if (!errors.str().empty()) out.text("wscan_errors.txt", errors.str());
}

void run_dci_series(const RunConfig& cfg, OutputSet& out) {
  const SpinModel model = model_from_config(cfg);
  const WaveState state = state_from_config(cfg, model.space);
  const DciSeries s = dci_time_series(state, model, integrator_from_config(cfg));
  out.csv("dci_series.csv", io::CsvTable{{"t", "detM"}, {s.times, s.det_m}});
}

void run_theorem3(const RunConfig& cfg, OutputSet& out) {
  const SpinModel model = model_from_config(cfg);
  const WaveState state = state_from_config(cfg, model.space);
  const Theorem3Prediction pr = theorem3_predict(state, model.space);
  std::ostringstream body;
  body << "normalized=" << bool_text(pr.normalized) << '\n';
  body << "spin=" << io::format_number(pr.xyz.spin) << '\n';
  body << "spin_below_quarter=" << bool_text(pr.spin_below_quarter) << '\n';
  if (pr.spin_below_quarter) {
    body << "x_inf=" << io::format_number(pr.xyz.x_inf) << '\n';
    body << "y_inf=" << io::format_number(pr.xyz.y_inf) << '\n';
    body << "z_inf=" << io::format_number(pr.xyz.z_inf) << '\n';
  }
  body << "z_inf_below_one=" << bool_text(pr.z_inf_below_one) << '\n';
  body << "product_form=" << bool_text(pr.product_form) << '\n';
  body << "x_inf_above_one=" << bool_text(pr.x_inf_above_one) << '\n';
  body << "predicted_unstable=" << bool_text(pr.predicted_unstable) << '\n';
  body << "w=" << io::format_number(model.w) << '\n';
  body << format_verdict(det_m(state, model));
  out.text("theorem3.txt", body.str());
}

void run_wstar(const RunConfig& cfg, OutputSet& out) {
  const SpinModel model = model_from_config(cfg);
  const WaveState state = state_from_config(cfg, model.space);
  WstarOptions opt;
  opt.grid_points = static_cast<int>(cfg.get_int("experiment.grid_points"));
  opt.tol = cfg.get_real("experiment.tol");
  const WstarResult r = wstar_search(state, model, cfg.get_real("experiment.wstar_max"), opt);
  std::ostringstream body;
  body << "found=" << bool_text(r.wstar.has_value()) << '\n';
  if (r.wstar) {
    body << "wstar=" << io::format_number(*r.wstar) << '\n';
    const double lo = linalg::lu_determinant(hessian_m(state, model.with_w(std::max(0.0, *r.wstar - 10 * opt.tol))));
    const double hi = linalg::lu_determinant(hessian_m(state, model.with_w(*r.wstar + 10 * opt.tol)));
    body << "det_below=" << io::format_number(lo) << '\n';
    body << "det_above=" << io::format_number(hi) << '\n';
    body << "bracketed=" << bool_text((lo > 0) != (hi > 0)) << '\n';
  }
  body << "crossings=" << r.crossings.size() << '\n';
  for (std::size_t i = 0; i < r.crossings.size(); ++i) {
    body << "crossing_" << i << '=' << io::format_number(r.crossings[i]) << '\n';
  }
  out.text("wstar.txt", body.str());
  out.csv("wstar_grid.csv", io::CsvTable{{"w", "detM"}, {r.grid, r.grid_det}});
}

void run_continuum(const RunConfig& cfg, OutputSet& out) {
  using namespace continuum;
  const Params p = continuum_from_config(cfg);
  const int cap = static_cast<int>(cfg.get_int("continuum.cap"));
  const std::string parity = cfg.get_text("continuum.parity");
  if (parity != "even" && parity != "odd" && parity != "all") {
    throw ValidationError("config: continuum.parity must be even, odd or all, got '" + parity + "'");
  }
  const TruncatedOperator op = build_omega(p, cap, static_cast<int>(cfg.get_int("experiment.threads")));
  Vector coeffs = example_coeffs(op.basis, p.n_bodies);
  const QuadraticForm full = quadratic_form(op, coeffs);
  double spin = cfg.get_real("continuum.spin");
  if (parity != "all") {
    coeffs = restrict_parity(op, coeffs, parity == "even" ? Parity::even : Parity::odd);
    spin = 0.0;
  }
  const QuadraticForm qf = quadratic_form(op, coeffs);
  const CriteriaReport rep = criteria_check(p, qf.expectation, spin);

  std::ostringstream body;
  body << "n_bodies=" << p.n_bodies << '\n';
  body << "cap=" << cap << '\n';
  body << "basis_size=" << op.size() << '\n';
  body << "interior_size=" << op.interior_rows().size() << '\n';
  body << "operator_norm=" << io::format_number(operator_norm(op)) << '\n';
  body << "norm_bound=" << io::format_number(8.0 * p.n_bodies * p.n_bodies) << '\n';
  body << "neighbor_ratio_min=" << io::format_number(neighbor_ratio_bound(op, example_coeffs(op.basis, p.n_bodies)))
       << '\n';
  body << "theorem5b_ratio=" << io::format_number(full.ratio) << '\n';
  body << "scenario=" << (parity == "all" ? "general" : "A") << '\n';
  body << "parity=" << parity << '\n';
  body << format_report(rep);
  out.text("continuum_report.txt", body.str());
  if (cfg.get_bool("continuum.dump")) {
    out.custom("omega.csv", [&](const fs::path& path) {
      write_operator_csv(op, path, out.dir() / "omega_basis.csv");
    });
    out.custom("omega_basis.csv", [](const fs::path&) {});
  }
}

void run_identities(const RunConfig& cfg, OutputSet& out) {
  const auto checks = identities::run_suite(cfg.get_uint("run.seed"));
  out.text("identities.txt", identities::format_suite(checks));
  for (const auto& c : checks) {
    if (!c.passed) {
      throw DegenerateUpdateError("identities: " + c.name + " exceeded tolerance (" + io::format_number(c.max_error) +
                                  ")");
    }
  }
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate", "diverge", "mlce",      "wscan",     "dci-series",
                                                 "theorem3", "wstar",   "continuum", "identities"};
  return names;
}

std::string tool_version() { return NLWAVE_VERSION; }

RunOutcome run_experiment(const RunRequest& request, std::ostream& log) {
  RunOutcome outcome;
  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<OutputSet> out;
  try {
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), request.subcommand) == names.end()) {
      throw ValidationError("unknown subcommand '" + request.subcommand + "'");
    }
    std::vector<std::string> overrides = request.overrides;
    if (request.out_dir) overrides.push_back("output.dir=" + request.out_dir->string());
    RunConfig cfg = parse_config(request.config_text, overrides);
    const std::string named = cfg.get_text("experiment.name");
    if (!named.empty() && named != request.subcommand) {
      throw ValidationError("config: experiment.name is '" + named + "' but the subcommand is '" +
                            request.subcommand + "'");
    }
    cfg.values["experiment.name"] = request.subcommand;

    outcome.out_dir = cfg.get_text("output.dir");
    std::error_code ec;
    fs::create_directories(outcome.out_dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + outcome.out_dir.string() + ": " + ec.message());
    out = std::make_unique<OutputSet>(outcome.out_dir);

    const std::string& sub = request.subcommand;
    if (sub == "simulate") run_simulate(cfg, *out);
    else if (sub == "diverge") run_diverge(cfg, *out);
    else if (sub == "mlce") run_mlce(cfg, *out);
    else if (sub == "wscan") run_wscan(cfg, *out, log);
    else if (sub == "dci-series") run_dci_series(cfg, *out);
    else if (sub == "theorem3") run_theorem3(cfg, *out);
    else if (sub == "wstar") run_wstar(cfg, *out);
    else if (sub == "continuum") run_continuum(cfg, *out);
    else run_identities(cfg, *out);

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nlohmann::ordered_json manifest;
    manifest["tool"] = "nlwave";
    manifest["version"] = tool_version();
    manifest["subcommand"] = sub;
    manifest["platform"] = platform_note();
    manifest["threads"] = worker_count(static_cast<int>(cfg.get_int("experiment.threads")));
    manifest["duration_seconds"] = seconds;
    manifest["resolved_config"] = cfg.to_text();
    auto& files = manifest["outputs"] = nlohmann::ordered_json::array();
    for (const auto& f : out->files()) {
      files.push_back({{"file", f.filename().string()},
                       {"bytes", fs::file_size(f)},
                       {"fnv1a64", io::hex64(io::fnv1a64_file(f))}});
    }
    out->text("manifest.json", manifest.dump(2) + "\n");
    outcome.files = out->files();
    outcome.message = "ok";
  } catch (const Error& e) {
    outcome.exit_code = e.kind() == ErrorKind::numerical ? kExitNumerical : kExitValidation;
    outcome.message = e.what();
    if (out) outcome.files = out->files();
    log << "nlwave " << request.subcommand << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    outcome.exit_code = kExitValidation;
    outcome.message = e.what();
    if (out) outcome.files = out->files();
    log << "nlwave " << request.subcommand << ": " << e.what() << '\n';
  }
  return outcome;
}

}  // namespace nlwave
