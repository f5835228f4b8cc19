#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cusplab/potential.hpp"
#include "cusplab/separability.hpp"

// Config-driven runs. Every physical input is in scaled units
// (hbar^2 / 2 mu = 1): lengths r, energies e = 2 mu E / hbar^2, and
// potentials v = 2 mu V / hbar^2.

namespace cusplab::cli {

enum class Command { Classify, CuspEval, Solve, RigidityCheck, EnergySeries, Separability };

std::string to_string(Command c);

struct GridParams {
  std::optional<double> r_min;
  double r_max = 10.0;
  int points = 400;
  std::vector<double> extra;
};

struct SeparabilityParams {
  ParticleConfig particles;
  std::vector<double> sweep;  // empty: default sweep
  std::optional<double> density;
  std::size_t samples = 10000;
};

struct RunConfig {
  Command command = Command::Classify;
  PotentialModel potential;
  bool has_potential = false;
  int l = 0;
  std::vector<double> energies;
  GridParams grid;
  bool has_grid = false;
  std::vector<double> radii;
  int j_max = 4;
  std::optional<double> eval_radius;
  std::optional<SeparabilityParams> separability;
  std::string output = ".";
  std::optional<std::uint64_t> seed;
  // Canonical JSON of the parsed document after overrides; hashed into
  // every CSV.
  std::string canonical;
};

// ConfigError on malformed documents, unknown keys or missing fields.
// Relative file references resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// Potential documents: {"terms": [{"strength", "exponent"}], "yukawa":
// {"strength", "range"}, "table": {"r": [...], "v": [...]} | "table_csv": path},
// or a string naming a JSON or two-column CSV file.
PotentialModel potential_from_json_text(const std::string& text, const std::string& base_dir = ".");
PotentialModel potential_from_csv(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);
std::string hash_hex(std::uint64_t h);

// Cells are kept as text; numeric cells are written with format_double so
// that parse_double reads back the identical value.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  double number(std::size_t row, std::size_t col) const;
};

// %.17g floats, inf / -inf / nan spelled out, LF endings.
std::string format_double(double x);
double parse_double(const std::string& s);
std::string write_csv(const CsvTable& t);
CsvTable read_csv(const std::string& text);
void write_csv_file(const std::string& path, const CsvTable& t);
CsvTable read_csv_file(const std::string& path);

struct RunOptions {
  int threads = 1;
};

struct RunResult {
  int exit_code = 0;
  std::string summary;  // one line for stdout
  std::string error;    // "<ErrorName>: message" on failure
  std::vector<std::string> files;
};

// Exit 0 success, 2 invalid config, 3 nonphysical potential for
// solve-type commands, 4 numerical failure.
RunResult run(const RunConfig& config, const RunOptions& options = {});

// Parse-and-run with exit-code mapping for parse failures too.
RunResult run_text(const std::string& text, const std::string& base_dir, const std::string& output_override,
                   std::optional<std::uint64_t> seed_override, const RunOptions& options);

}  // namespace cusplab::cli
