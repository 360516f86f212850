#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlwave/io.hpp"
#include "nlwave/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nlwave: nonlinear wavefunction experiments"};
  app.set_version_flag("--version", nlwave::tool_version());
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  for (const auto& name : nlwave::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "section.key=value override (repeatable)");
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : nlwave::kExitValidation;
  }

  nlwave::RunRequest req;
  req.subcommand = app.get_subcommands().front()->get_name();
  try {
    req.config_text = nlwave::io::read_text_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "nlwave: " << e.what() << '\n';
    return nlwave::kExitValidation;
  }
  req.overrides = overrides;
  if (!out_dir.empty()) req.out_dir = out_dir;

  const nlwave::RunOutcome outcome = nlwave::run_experiment(req, std::cerr);
  if (outcome.exit_code == nlwave::kExitOk) {
    for (const auto& f : outcome.files) std::cout << f.string() << '\n';
  } else if (!outcome.files.empty()) {
    std::cerr << "nlwave: partial outputs:";
    for (const auto& f : outcome.files) std::cerr << ' ' << f.filename().string();
    std::cerr << '\n';
  }
  return outcome.exit_code;
}
