// homsim: run or validate a scenario config.
//
// Exit codes: 0 success, 1 I/O or internal error, 2 config not parseable,
// 3 config invalid, 4 numerical quadrature did not converge.

#include <CLI11.hpp>

#include <iostream>

#include "scenario.hpp"

namespace {

enum Exit : int { ok = 0, io_error = 1, parse_error = 2, invalid = 3, not_converged = 4 };

void print_issues(const std::vector<std::string>& issues) {
  for (const auto& i : issues) std::cout << "error: " << i << '\n';
  std::cout << issues.size() << (issues.size() == 1 ? " issue" : " issues") << '\n';
}

int validate_command(const std::string& path) {
  try {
    auto loaded = homsim::load_config(path);
    if (auto o = homsim::check_output(loaded.config.output); !o.empty()) loaded.issues.push_back(o);
    print_issues(loaded.issues);
    return loaded.issues.empty() ? ok : invalid;
  } catch (const homsim::ParseError& e) {
    std::cerr << "homsim: cannot parse " << path << ": " << e.what() << '\n';
    return parse_error;
  }
}

int run_command(const std::string& path, const std::string& out_override) {
  homsim::Loaded loaded;
  try {
    loaded = homsim::load_config(path);
  } catch (const homsim::ParseError& e) {
    std::cerr << "homsim: cannot parse " << path << ": " << e.what() << '\n';
    return parse_error;
  }
  if (!out_override.empty()) loaded.config.output = out_override;
  if (auto o = homsim::check_output(loaded.config.output); !o.empty()) loaded.issues.push_back(o);
  if (!loaded.issues.empty()) {
    print_issues(loaded.issues);
    return invalid;
  }
  try {
    const auto result = homsim::run_scenario(loaded.config);
    homsim::write_outputs(loaded.config.output, loaded, result);
    for (const auto& f : result.files)
      std::cout << (loaded.config.output / f.name).string() << '\n';
    std::cout << (loaded.config.output / "manifest.json").string() << '\n';
    return ok;
  } catch (const hom::Error& e) {
    std::cerr << "homsim: " << e.what() << '\n';
    return e.kind() == hom::ErrorKind::quadrature_not_converged ? not_converged : invalid;
  } catch (const std::exception& e) {
    std::cerr << "homsim: " << e.what() << '\n';
    return io_error;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-photon interference scenarios: writes plot-ready CSV data and a manifest."};
  app.set_version_flag("--version", std::string(hom::version));
  app.require_subcommand(1);

  std::string run_config;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run a scenario and write <scenario>.csv plus manifest.json");
  run->add_option("config", run_config, "Scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config's \"output\")");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "Check a config and list every violated invariant");
  validate->add_option("config", validate_config, "Scenario config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);
  if (*run) return run_command(run_config, out_dir);
  return validate_command(validate_config);
}
