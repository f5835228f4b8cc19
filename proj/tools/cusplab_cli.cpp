// Command-line front end. All inputs are in scaled units (hbar^2/2mu = 1).
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <filesystem>

#include "CLI11.hpp"
#include "cusplab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "cusplab: cusp functions, regular radial solutions, rigidity identities,\n"
      "energy series and pair separability.\n"
      "Scaled units throughout: hbar^2/(2 mu) = 1, so lengths are r, energies\n"
      "e = 2 mu E / hbar^2 and potentials v = 2 mu V / hbar^2.\n"
      "Exit codes: 0 ok, 2 invalid config, 3 nonphysical potential, 4 numerical failure."};
  std::string config, output;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config, "JSON run configuration (\"version\": 1)")->required();
  app.add_option("--output", output, "output directory (overrides the config)");
  app.add_option("--threads", threads, "worker threads for energy and radius sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::ifstream in(config, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: ConfigError: cannot read %s\n", config.c_str());
    return 2;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string base = std::filesystem::path(config).parent_path().string();
  if (base.empty()) base = ".";

  const cusplab::cli::RunResult r =
      cusplab::cli::run_text(ss.str(), base, output, seed, cusplab::cli::RunOptions{threads});
  if (r.exit_code == 0) {
    std::printf("%s\n", r.summary.c_str());
  } else {
    std::fprintf(stderr, "error: %s\n", r.error.c_str());
  }
  return r.exit_code;
}
