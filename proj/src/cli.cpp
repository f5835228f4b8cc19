#include "cusplab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cusplab/cuspfn.hpp"
#include "cusplab/energyseries.hpp"
#include "cusplab/errors.hpp"
#include "cusplab/radial.hpp"
#include "cusplab/rigidity.hpp"

namespace cusplab::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve(const std::string& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).string();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
      throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " needs '" + key + "'");
  if (!j[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
  return j[key].get<double>();
}

std::vector<double> get_numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
  return j.get<int>();
}

PotentialModel potential_from_json(const json& j, const std::string& base);

// A path reference: .csv is a two-column table, anything else JSON.
PotentialModel potential_from_path(const std::string& base, const std::string& p) {
  const std::string path = resolve(base, p);
  if (fs::path(path).extension() == ".csv") return potential_from_csv(path);
  const std::string dir = fs::path(path).parent_path().string();
  return potential_from_json_text(read_file(path), dir.empty() ? "." : dir);
}

PotentialModel potential_from_json(const json& j, const std::string& base) {
  if (j.is_string()) return potential_from_path(base, j.get<std::string>());
  check_keys(j, {"terms", "yukawa", "table", "table_csv"}, "potential");
  PotentialModel m;
  if (j.contains("terms")) {
    if (!j["terms"].is_array()) throw ConfigError("potential.terms must be an array");
    for (const auto& t : j["terms"]) {
      check_keys(t, {"strength", "exponent"}, "potential.terms[]");
      m.terms.push_back({get_number(t, "strength", "term"), get_number(t, "exponent", "term")});
    }
  }
  if (j.contains("yukawa")) {
    const auto& y = j["yukawa"];
    check_keys(y, {"strength", "range"}, "potential.yukawa");
    m.yukawa = YukawaTerm{get_number(y, "strength", "yukawa"), get_number(y, "range", "yukawa")};
  }
  if (j.contains("table") && j.contains("table_csv")) throw ConfigError("give either table or table_csv");
  if (j.contains("table")) {
    const auto& t = j["table"];
    check_keys(t, {"r", "v"}, "potential.table");
    if (!t.contains("r") || !t.contains("v")) throw ConfigError("potential.table needs r and v");
    m.table = Table(get_numbers(t["r"], "table.r"), get_numbers(t["v"], "table.v"));
  }
  if (j.contains("table_csv")) {
    if (!j["table_csv"].is_string()) throw ConfigError("table_csv must be a path");
    m.table = potential_from_csv(resolve(base, j["table_csv"].get<std::string>())).table;
  }
  try {
    m.validate();
  } catch (const InvalidModel& e) {
    throw ConfigError(std::string("invalid potential: ") + e.what());
  }
  return m;
}

// Replaces file references in the canonical document by a digest of their
// contents, so the hash follows the data rather than the path.
void digest_references(json& pot, const std::string& base) {
  auto digest = [&](const std::string& p) {
    return json{{"file_fnv1a64", hash_hex(fnv1a64(read_file(resolve(base, p))))}};
  };
  if (pot.is_string()) {
    pot = digest(pot.get<std::string>());
  } else if (pot.is_object() && pot.contains("table_csv") && pot["table_csv"].is_string()) {
    pot["table_csv"] = digest(pot["table_csv"].get<std::string>());
  }
}

Command command_from_string(const std::string& s) {
  if (s == "classify") return Command::Classify;
  if (s == "cusp-eval") return Command::CuspEval;
  if (s == "solve") return Command::Solve;
  if (s == "rigidity-check") return Command::RigidityCheck;
  if (s == "energy-series") return Command::EnergySeries;
  if (s == "separability") return Command::Separability;
  throw ConfigError("unknown command '" + s + "'");
}

ParticleConfig particles_from_json(const json& j, const std::string& base) {
  check_keys(j, {"masses", "positions", "pair", "potentials"}, "particles");
  ParticleConfig c;
  if (!j.contains("masses") || !j.contains("positions") || !j.contains("pair") || !j.contains("potentials"))
    throw ConfigError("particles needs masses, positions, pair and potentials");
  c.masses = get_numbers(j["masses"], "particles.masses");
  if (!j["positions"].is_array()) throw ConfigError("particles.positions must be an array");
  for (const auto& p : j["positions"]) {
    const auto v = get_numbers(p, "particles.positions[]");
    if (v.size() != 3) throw ConfigError("positions are 3-vectors");
    c.positions.push_back({v[0], v[1], v[2]});
  }
  const auto& pr = j["pair"];
  if (!pr.is_array() || pr.size() != 2) throw ConfigError("particles.pair must be [i, j]");
  c.pair = {get_int(pr[0], "pair[0]"), get_int(pr[1], "pair[1]")};
  if (!j["potentials"].is_array()) throw ConfigError("particles.potentials must be an array");
  for (const auto& e : j["potentials"]) {
    check_keys(e, {"pair", "potential"}, "particles.potentials[]");
    if (!e.contains("pair") || !e.contains("potential")) throw ConfigError("potential entries need pair and potential");
    const auto& ab = e["pair"];
    if (!ab.is_array() || ab.size() != 2) throw ConfigError("potential pair must be [a, b]");
    const int a = get_int(ab[0], "pair[0]"), b = get_int(ab[1], "pair[1]");
    c.pair_potentials[{std::min(a, b), std::max(a, b)}] = potential_from_json(e["potential"], base);
  }
  try {
    c.validate();
  } catch (const InvalidModel& e) {
    throw ConfigError(std::string("invalid particles: ") + e.what());
  }
  return c;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  std::vector<std::exception_ptr> errs(n);
  auto body = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  };
  const std::size_t nt = std::min<std::size_t>(std::max(1, threads), std::max<std::size_t>(n, 1));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nt; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      });
    for (auto& t : pool) t.join();
  }
  // The lowest failing index wins, independent of scheduling.
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

RadialGrid build_grid(const RunConfig& c) {
  const GridParams& g = c.grid;
  if (g.r_min) return make_grid(*g.r_min, g.r_max, g.points, g.extra);
  return default_grid(c.potential, c.l, g.r_max, g.points, g.extra);
}

CsvTable table(const RunConfig& c, std::vector<std::string> header) {
  CsvTable t;
  t.comments.push_back("config-hash: " + hash_hex(fnv1a64(c.canonical)));
  t.comments.push_back("command: " + to_string(c.command));
  t.header = std::move(header);
  return t;
}

std::string emit(const RunConfig& c, RunResult& res, const std::string& name, const CsvTable& t) {
  fs::create_directories(c.output);
  const std::string path = (fs::path(c.output) / name).string();
  write_csv_file(path, t);
  res.files.push_back(path);
  return path;
}

std::string index_name(const char* stem, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem, i);
  return buf;
}

std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

void run_classify(const RunConfig& c, RunResult& res) {
  const ShortRangeClass cls = classify(c.potential);
  const double nan = std::nan("");
  CsvTable t = table(c, {"tag", "dominant_alpha", "dominant_strength", "gamma2", "beta_alpha", "physical"});
  t.rows.push_back({to_string(cls.tag), format_double(cls.dominant_alpha), format_double(cls.dominant_strength),
                    format_double(cls.gamma2.value_or(nan)), format_double(cls.beta_alpha.value_or(nan)),
                    cls.physical() ? "1" : "0"});
  emit(c, res, "classify.csv", t);
  res.summary = to_string(cls.tag);
}

void run_cusp_eval(const RunConfig& c, RunResult& res) {
  const CuspSpec spec = make_cusp_spec(classify(c.potential), c.l);
  const double len = cusp_length(spec);
  CsvTable t = table(c, {"r", "r_s", "f", "df", "g", "dg", "F_strict", "log_abs_f"});
  for (double r : c.radii) {
    const CuspValue f = cusp_f(spec, r), g = irregular_g(spec, r), F = strict_cusp(spec, r);
    t.add_row({r, r / len, f.value(), f.derivative(), g.value(), g.derivative(), F.value(), f.log_abs()});
  }
  emit(c, res, "cusp_eval.csv", t);
  res.summary = "cusp-eval: " + std::to_string(c.radii.size()) + " radii, class " +
                to_string(spec.cls.tag) + ", l = " + std::to_string(c.l);
}

void run_solve(const RunConfig& c, const RunOptions& o, RunResult& res) {
  const RadialGrid grid = build_grid(c);
  std::vector<CsvTable> out(c.energies.size());
  parallel_for(c.energies.size(), o.threads, [&](std::size_t k) {
    const RadialSolution s = solve_regular(c.potential, c.l, c.energies[k], grid);
    CsvTable t = table(c, {"r", "u", "du", "L", "R", "P", "scale_offset"});
    t.comments.push_back("energy: " + format_double(c.energies[k]));
    for (std::size_t i = 0; i < grid.points.size(); ++i)
      t.add_row({grid.points[i], s.u[i], s.du[i], s.logderiv[i], s.rmatrix[i], s.prob[i], s.scale_offsets[i]});
    out[k] = std::move(t);
  });
  for (std::size_t k = 0; k < out.size(); ++k) emit(c, res, index_name("solve", k), out[k]);
  res.summary = "solve: " + std::to_string(c.energies.size()) + " energies on " +
                std::to_string(grid.points.size()) + " points";
}

void run_rigidity(const RunConfig& c, const RunOptions& o, RunResult& res) {
  std::vector<FundamentalReport> reps(c.energies.size());
  parallel_for(c.energies.size(), o.threads, [&](std::size_t k) {
    reps[k] = verify_fundamental(c.potential, c.l, c.energies[k], c.radii);
  });
  const double nan = std::nan("");
  CsvTable t = table(c, {"energy", "r", "P", "rigidity", "dL_de", "dR_de", "residual1", "residual2", "max_residual"});
  double worst = 0.0;
  for (std::size_t k = 0; k < reps.size(); ++k) {
    const double mr = reps[k].max_residual();
    worst = std::max(worst, mr);
    for (const auto& p : reps[k].points)
      t.add_row({c.energies[k], p.r, p.P, p.rigidity, p.skip1 ? nan : p.dL_de, p.skip2 ? nan : p.dR_de,
                 p.skip1 ? nan : p.residual1, p.skip2 ? nan : p.residual2, mr});
  }
  emit(c, res, "rigidity.csv", t);
  res.summary = "rigidity-check: max residual " + fmt_short(worst) + " over " +
                std::to_string(c.energies.size()) + " energies";
}

void run_energy_series(const RunConfig& c, RunResult& res) {
  const RadialGrid grid = build_grid(c);
  const EnergySeries s = build_series(c.potential, c.l, grid, c.j_max);
  std::vector<std::string> header = {"r", "f_cp"};
  for (int j = 1; j <= c.j_max; ++j) header.push_back("x" + std::to_string(j));
  CsvTable t = table(c, header);
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    std::vector<double> row = {grid.points[i], s.f_cp[i]};
    for (int j = 0; j < c.j_max; ++j) row.push_back(s.x[j][i]);
    t.add_row(row);
  }
  t.comments.push_back("validity_energy: " + format_double(s.validity_energy));
  emit(c, res, "energy_series.csv", t);
  res.summary = "energy-series: j_max = " + std::to_string(c.j_max) + ", validity |e| < " + fmt_short(s.validity_energy);
  if (!c.energies.empty()) {
    const double r = c.eval_radius.value_or(grid.r_max);
    const auto rows = entirety_check(c.potential, c.l, r, c.energies);
    CsvTable e = table(c, {"energy", "err_j2", "err_j4", "err_j6", "monotone"});
    e.comments.push_back("radius: " + format_double(r));
    bool all = true;
    for (const auto& row : rows) {
      e.add_row({row.energy, row.errors[0], row.errors[1], row.errors[2], row.monotone ? 1.0 : 0.0});
      all = all && row.monotone;
    }
    emit(c, res, "entirety.csv", e);
    res.summary += all ? ", truncation errors decrease" : ", truncation errors NOT monotone";
  }
}

void run_separability(const RunConfig& c, const RunOptions& o, RunResult& res) {
  const SeparabilityParams& sp = *c.separability;
  const ParticleConfig& pc = sp.particles;
  const std::vector<double> sweep = sp.sweep.empty() ? default_sweep(pc) : sp.sweep;
  std::vector<SeparabilityReport> reps(sweep.size());
  parallel_for(sweep.size(), o.threads, [&](std::size_t k) {
    reps[k] = separability_report(with_separation(pc, sweep[k]));
  });
  CsvTable t = table(c, {"r", "V_full", "V_sp", "residual", "first_order", "second_order", "small_param", "r_rho"});
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const auto& r = reps[k];
    t.add_row({sweep[k], r.V_full, r.V_sp, r.residual, r.first_order_pred, r.second_order_pred, r.small_param, r.r_rho});
  }
  emit(c, res, "separability.csv", t);
  const ScalingFit fit = residual_scaling_fit(pc, sweep);
  CsvTable f = table(c, {"slope", "intercept", "order", "prefactor", "predicted_prefactor", "prefactor_rel_error"});
  f.add_row({fit.slope, fit.intercept, static_cast<double>(fit.order), fit.prefactor, fit.predicted_prefactor,
             fit.prefactor_rel_error});
  emit(c, res, "separability_fit.csv", f);
  res.summary = "separability: slope " + fmt_short(fit.slope) + ", prefactor error " + fmt_short(fit.prefactor_rel_error);
  if (sp.density) {
    const NearestSpectatorStats ns = nearest_spectator_stats(*sp.density, sp.samples, c.seed.value_or(0), o.threads);
    CsvTable n = table(c, {"density", "samples", "mean", "std_error", "radius", "expectation"});
    n.add_row({ns.density, static_cast<double>(ns.samples), ns.mean, ns.std_error, ns.radius, ns.expectation});
    emit(c, res, "nearest_spectator.csv", n);
  }
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::CuspEval: return "cusp-eval";
    case Command::Solve: return "solve";
    case Command::RigidityCheck: return "rigidity-check";
    case Command::EnergySeries: return "energy-series";
    case Command::Separability: return "separability";
  }
  return "?";
}

PotentialModel potential_from_json_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed potential JSON: ") + e.what());
  }
  return potential_from_json(j, base_dir);
}

PotentialModel potential_from_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::vector<double> r, v;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("table rows need two columns: " + line);
    char* end = nullptr;
    const double a = std::strtod(line.c_str(), &end);
    if (end == line.c_str()) {
      if (r.empty()) continue;  // header line
      throw ConfigError("non-numeric table row: " + line);
    }
    r.push_back(a);
    v.push_back(parse_double(line.substr(comma + 1)));
  }
  PotentialModel m;
  try {
    m.table = Table(r, v);
    m.validate();
  } catch (const InvalidModel& e) {
    throw ConfigError(std::string("invalid table ") + path + ": " + e.what());
  }
  return m;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  check_keys(j, {"version", "command", "potential", "l", "energies", "grid", "radii", "j_max", "eval_radius",
                 "particles", "sweep", "density", "samples", "output", "seed"},
             "config");
  if (!j.contains("version") || j["version"] != 1) throw ConfigError("config needs \"version\": 1");
  if (!j.contains("command") || !j["command"].is_string()) throw ConfigError("config needs a command");

  RunConfig c;
  c.command = command_from_string(j["command"].get<std::string>());
  if (j.contains("potential")) {
    c.potential = potential_from_json(j["potential"], base_dir);
    c.has_potential = true;
  }
  if (j.contains("l")) {
    c.l = get_int(j["l"], "l");
    if (c.l < 0) throw ConfigError("l must be non-negative");
  }
  if (j.contains("energies")) c.energies = get_numbers(j["energies"], "energies");
  if (j.contains("radii")) c.radii = get_numbers(j["radii"], "radii");
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    check_keys(g, {"r_min", "r_max", "points", "extra"}, "grid");
    c.grid.r_max = get_number(g, "r_max", "grid");
    if (g.contains("r_min")) c.grid.r_min = get_number(g, "r_min", "grid");
    if (g.contains("points")) c.grid.points = get_int(g["points"], "grid.points");
    if (g.contains("extra")) c.grid.extra = get_numbers(g["extra"], "grid.extra");
    if (!(c.grid.r_max > 0.0)) throw ConfigError("grid.r_max must be positive");
    if (c.grid.points < 64) throw ConfigError("grid.points must be at least 64");
    c.has_grid = true;
  }
  if (j.contains("j_max")) c.j_max = get_int(j["j_max"], "j_max");
  if (j.contains("eval_radius")) c.eval_radius = get_number(j, "eval_radius", "config");
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("output must be a path");
    c.output = resolve(base_dir, j["output"].get<std::string>());
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("particles")) {
    SeparabilityParams sp;
    sp.particles = particles_from_json(j["particles"], base_dir);
    if (j.contains("sweep")) sp.sweep = get_numbers(j["sweep"], "sweep");
    if (j.contains("density")) sp.density = get_number(j, "density", "config");
    if (j.contains("samples")) {
      const int n = get_int(j["samples"], "samples");
      if (n < 1) throw ConfigError("samples must be positive");
      sp.samples = static_cast<std::size_t>(n);
    }
    c.separability = std::move(sp);
  }

  // Command-specific requirements.
  auto need = [&](bool ok, const char* what) {
    if (!ok) throw ConfigError(to_string(c.command) + " needs " + what);
  };
  switch (c.command) {
    case Command::Classify: need(c.has_potential, "a potential"); break;
    case Command::CuspEval:
      need(c.has_potential, "a potential");
      need(!c.radii.empty(), "radii");
      break;
    case Command::Solve:
      need(c.has_potential, "a potential");
      need(!c.energies.empty(), "energies");
      need(c.has_grid, "a grid");
      break;
    case Command::RigidityCheck:
      need(c.has_potential, "a potential");
      need(!c.energies.empty(), "energies");
      need(!c.radii.empty(), "radii");
      break;
    case Command::EnergySeries:
      need(c.has_potential, "a potential");
      need(c.has_grid, "a grid");
      if (c.j_max < 1 || c.j_max > kMaxSeriesOrder) throw ConfigError("j_max must lie in [1, 6]");
      break;
    case Command::Separability: need(c.separability.has_value(), "particles"); break;
  }

  json canon = j;
  canon.erase("output");
  if (canon.contains("potential")) digest_references(canon["potential"], base_dir);
  if (canon.contains("particles"))
    for (auto& e : canon["particles"]["potentials"]) digest_references(e["potential"], base_dir);
  c.canonical = canon.dump();
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string dir = fs::path(path).parent_path().string();
  return parse_config(read_file(path), dir.empty() ? "." : dir);
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) throw ConfigError("empty numeric cell");
  const std::string t = s.substr(a, b - a + 1);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ConfigError("not a number: '" + t + "'");
  return v;
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_double(v));
  rows.push_back(std::move(row));
}

double CsvTable::number(std::size_t row, std::size_t col) const { return parse_double(rows.at(row).at(col)); }

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string q = "\"";
  for (char ch : cell) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

// One RFC-4180 record starting at pos; quoted cells may span lines. Leaves
// pos after the terminating LF (CR LF is accepted on input).
std::vector<std::string> next_record(const std::string& text, std::size_t& pos) {
  std::vector<std::string> out;
  std::string cur;
  bool inq = false;
  while (pos < text.size()) {
    const char ch = text[pos++];
    if (inq) {
      if (ch == '"' && pos < text.size() && text[pos] == '"') {
        cur += '"';
        ++pos;
      } else if (ch == '"') {
        inq = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      inq = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      out.push_back(cur);
      return out;
    } else {
      cur += ch;
    }
  }
  if (inq) throw ConfigError("unterminated quote in CSV record");
  if (!cur.empty() && cur.back() == '\r') cur.pop_back();
  out.push_back(cur);
  return out;
}

}  // namespace

std::string write_csv(const CsvTable& t) {
  std::string s;
  for (const auto& c : t.comments) {
    if (c.find_first_of("\r\n") != std::string::npos) throw ConfigError("CSV comments must be single lines");
    s += "# " + c + "\n";
  }
  auto record = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += quote(cells[i]);
    }
    s += '\n';
  };
  record(t.header);
  for (const auto& r : t.rows) record(r);
  return s;
}

CsvTable read_csv(const std::string& text) {
  CsvTable t;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    if (!have_header && text[pos] == '#') {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      pos = end + 1;
      continue;
    }
    if (text[pos] == '\n' || (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n')) {
      pos = text.find('\n', pos) + 1;
      continue;
    }
    std::vector<std::string> rec = next_record(text, pos);
    if (!have_header) {
      t.header = std::move(rec);
      have_header = true;
      continue;
    }
    if (rec.size() != t.header.size()) throw ConfigError("CSV row width differs from header");
    t.rows.push_back(std::move(rec));
  }
  return t;
}

void write_csv_file(const std::string& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << write_csv(t);
}

CsvTable read_csv_file(const std::string& path) { return read_csv(read_file(path)); }

RunResult run(const RunConfig& c, const RunOptions& o) {
  RunResult res;
  try {
    const bool solve_type = c.command == Command::CuspEval || c.command == Command::Solve ||
                            c.command == Command::RigidityCheck || c.command == Command::EnergySeries;
    if (solve_type) {
      const ShortRangeClass cls = classify(c.potential);
      if (!cls.physical())
        throw NonphysicalPotential("class " + to_string(cls.tag) + " has no regular solution at the origin");
    }
    switch (c.command) {
      case Command::Classify: run_classify(c, res); break;
      case Command::CuspEval: run_cusp_eval(c, res); break;
      case Command::Solve: run_solve(c, o, res); break;
      case Command::RigidityCheck: run_rigidity(c, o, res); break;
      case Command::EnergySeries: run_energy_series(c, res); break;
      case Command::Separability: run_separability(c, o, res); break;
    }
  } catch (const NonphysicalPotential& e) {
    res.exit_code = 3;
    res.error = e.name() + ": " + e.what();
  } catch (const ConfigError& e) {
    res.exit_code = 2;
    res.error = e.name() + ": " + e.what();
  } catch (const Error& e) {
    res.exit_code = 4;
    res.error = e.name() + ": " + e.what();
  } catch (const std::exception& e) {
    res.exit_code = 4;
    res.error = std::string("InternalError: ") + e.what();
  }
  if (res.exit_code != 0) res.summary = to_string(c.command) + " failed: " + res.error;
  return res;
}

RunResult run_text(const std::string& text, const std::string& base_dir, const std::string& output_override,
                   std::optional<std::uint64_t> seed_override, const RunOptions& options) {
  RunConfig c;
  try {
    std::string doc = text;
    if (seed_override) {
      json j = json::parse(text);
      j["seed"] = *seed_override;
      doc = j.dump();
    }
    c = parse_config(doc, base_dir);
  } catch (const json::exception& e) {
    RunResult r;
    r.exit_code = 2;
    r.error = std::string("ConfigError: malformed config JSON: ") + e.what();
    r.summary = "config rejected: " + r.error;
    return r;
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = 2;
    r.error = e.name() + ": " + e.what();
    r.summary = "config rejected: " + r.error;
    return r;
  }
  if (!output_override.empty()) c.output = output_override;
  return run(c, options);
}

}  // namespace cusplab::cli
