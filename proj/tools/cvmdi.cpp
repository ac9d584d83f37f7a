#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cvmdi/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Key rates for CV-MDI QKD with photon-subtracted squeezed coherent states"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  cvmdi::cli::CommandOptions opts;
  opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"keyrate", "Secret key rate at a single operating point (JSON)"},
      {"sweep", "Key rates over a one-dimensional parameter grid (CSV)"},
      {"max-distance", "Largest L_AC reaching the target key rate, per family (JSON)"},
      {"optimize", "Scalar optimization of tau, d or V_A (JSON)"},
      {"oracle-check", "Closed forms against the truncated-Fock oracle (JSON)"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_path, "Output file (default stdout)");
    sub->add_option("--threads", opts.threads, "Worker threads");
    sub->add_option("--set", overrides, "Override a config entry, key=value")->take_all()->allow_extra_args(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cvmdi::cli::kExitConfig;
  }

  const auto* chosen = app.get_subcommands().front();
  const auto cmd = cvmdi::cli::parse_command(chosen->get_name());
  return cvmdi::cli::run(cmd, config_path, overrides, opts, std::cout, std::cerr);
}
