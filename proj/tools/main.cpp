// dpm: command-line front end.
//
//   dpm run <config>        integrate the porous-medium system
//   dpm blowup1d <config>   stream-slope trajectories on the 1D torus
//   dpm sweep <config>      parameter sweep, one subdirectory per point
//   dpm verify              built-in identity suite
//
// Exit codes: 0 ok, 1 runtime error, 2 a bound check failed, 3 unexpected
// blow-up, 4 bad configuration or input file.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "dpm/app.hpp"
#include "dpm/verify.hpp"

namespace {

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "dpm: " << e.what() << '\n';
    return dpm::app::exit_code_for(e);
  }
}

int report(const dpm::app::Outcome& outcome) {
  if (outcome.exit_code != dpm::app::kOk && !outcome.message.empty()) std::cerr << "dpm: " << outcome.message << '\n';
  return outcome.exit_code;
}

int verify_command(bool quiet) {
  const auto results = dpm::verify::run_all();
  std::size_t passed = 0;
  for (const auto& id : results) {
    if (id.pass) ++passed;
    if (!quiet || !id.pass) {
      std::printf("%-40s %s  error %.3e  tol %.1e\n", id.name.c_str(), id.pass ? "pass" : "FAIL", id.error,
                  id.tolerance);
    }
  }
  std::printf("%zu/%zu identities passed\n", passed, results.size());
  return passed == results.size() ? dpm::app::kOk : dpm::app::kBoundFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral porous-medium convection with fractional diffusion"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Integrate the porous-medium system and write diagnostics");
  run->add_option("config", config_path, "configuration file")->required();
  auto* blowup = app.add_subcommand("blowup1d", "Stream-slope trajectories and blow-up detection");
  blowup->add_option("config", config_path, "configuration file")->required();
  auto* sweep = app.add_subcommand("sweep", "Cartesian parameter sweep");
  sweep->add_option("config", config_path, "configuration file")->required();
  bool quiet = false;
  auto* verify = app.add_subcommand("verify", "Check the built-in identities");
  verify->add_flag("-q,--quiet", quiet, "only print failures and the total");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dpm::app::kConfigError;
  }

  if (*verify) return guarded([&] { return verify_command(quiet); });
  return guarded([&] {
    const auto cfg = dpm::config::parse_file(config_path);
    if (*run) return report(dpm::app::run_dpm(cfg, std::cout));
    if (*blowup) return report(dpm::app::run_blowup(cfg, std::cout));
    return report(dpm::app::run_sweep(cfg, std::cout));
  });
}
