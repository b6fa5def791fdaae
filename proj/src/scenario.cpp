#include "chargeq/scenario.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "chargeq/csv.hpp"
#include "chargeq/oracle.hpp"
#include "chargeq/svg.hpp"

namespace chargeq {

namespace {

using nlohmann::json;

Complex complex_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config key '" + key + "' must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

void apply_scenario_json(ScenarioConfig& cfg, const json& j) {
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "delta") cfg.delta = value.get<double>();
      else if (key == "field") {
        const auto kind = value.get<std::string>();
        if (kind == "coherent") cfg.field.kind = FieldSpec::Kind::coherent;
        else if (kind == "fock") cfg.field.kind = FieldSpec::Kind::fock;
        else throw ConfigError("field must be 'coherent' or 'fock'");
      }
      else if (key == "nbar") cfg.field.nbar = value.get<double>();
      else if (key == "fock_n") cfg.field.n = value.get<int>();
      else if (key == "epsilon") cfg.field.truncation_epsilon = value.get<double>();
      else if (key == "initial") cfg.initial = value.get<std::string>();
      else if (key == "a1") cfg.a1 = complex_from_json(value, key);
      else if (key == "b1") cfg.b1 = complex_from_json(value, key);
      else if (key == "a2") cfg.a2 = complex_from_json(value, key);
      else if (key == "b2") cfg.b2 = complex_from_json(value, key);
      else if (key == "tau_max") cfg.tau_max = value.get<double>();
      else if (key == "steps") cfg.steps = value.get<int>();
      else if (key == "opt_grid_starts") cfg.optimizer.grid_starts = value.get<int>();
      else if (key == "opt_random_starts") cfg.optimizer.random_starts = value.get<int>();
      else if (key == "opt_max_evals") cfg.optimizer.max_evaluations = value.get<int>();
      else if (key == "opt_tolerance") cfg.optimizer.entropy_tolerance = value.get<double>();
      else if (key == "opt_seed") cfg.optimizer.seed = value.get<std::uint64_t>();
      else if (key == "measures") {
        cfg.measure_correlations = cfg.measure_deficits = false;
        for (const auto& m : value) {
          const auto name = m.get<std::string>();
          if (name == "correlations") cfg.measure_correlations = true;
          else if (name == "deficits") cfg.measure_deficits = true;
          else throw ConfigError("unknown measure group '" + name + "'");
        }
      }
      else if (key == "out") cfg.out = value.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["delta"] = cfg.delta;
  j["field"] = cfg.field.kind == FieldSpec::Kind::coherent ? "coherent" : "fock";
  j["nbar"] = cfg.field.nbar;
  j["fock_n"] = cfg.field.n;
  j["epsilon"] = cfg.field.truncation_epsilon;
  j["initial"] = cfg.initial;
  j["a1"] = complex_to_json(cfg.a1);
  j["b1"] = complex_to_json(cfg.b1);
  j["a2"] = complex_to_json(cfg.a2);
  j["b2"] = complex_to_json(cfg.b2);
  j["tau_max"] = cfg.tau_max;
  j["steps"] = cfg.steps;
  j["opt_grid_starts"] = cfg.optimizer.grid_starts;
  j["opt_random_starts"] = cfg.optimizer.random_starts;
  j["opt_max_evals"] = cfg.optimizer.max_evaluations;
  j["opt_tolerance"] = cfg.optimizer.entropy_tolerance;
  j["opt_seed"] = cfg.optimizer.seed;
  json measures = json::array();
  if (cfg.measure_correlations) measures.push_back("correlations");
  if (cfg.measure_deficits) measures.push_back("deficits");
  j["measures"] = measures;
  j["out"] = cfg.out;
  return j;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  if (steps < 2) throw ConfigError("steps must be >= 2");
  if (!(tau_max > 0.0)) throw ConfigError("tau_max must be > 0");
  if (initial != "ee" && initial != "gg" && initial != "custom")
    throw ConfigError("initial must be one of ee, gg, custom");
  if (field.truncation_epsilon <= 0.0 || field.truncation_epsilon >= 1.0)
    throw ConfigError("epsilon must lie in (0,1)");
  try {
    model().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ModelParams ScenarioConfig::model() const {
  ModelParams p;
  p.delta = delta;
  p.field = field;
  if (initial == "ee") {
    p.a1 = p.a2 = Complex(1.0, 0.0);
    p.b1 = p.b2 = Complex(0.0, 0.0);
  } else if (initial == "gg") {
    p.a1 = p.a2 = Complex(0.0, 0.0);
    p.b1 = p.b2 = Complex(1.0, 0.0);
  } else {
    p.a1 = a1;
    p.b1 = b1;
    p.a2 = a2;
    p.b2 = b2;
  }
  return p;
}

std::vector<double> ScenarioConfig::tau_grid() const {
  std::vector<double> grid(static_cast<size_t>(steps));
  for (int i = 0; i < steps; ++i)
    grid[static_cast<size_t>(i)] = tau_max * static_cast<double>(i) / (steps - 1);
  return grid;
}

void SweepConfig::validate() const {
  if (deltas.empty() || nbars.empty() || initials.empty())
    throw ConfigError("sweep lists must all be non-empty");
  for (const auto& ini : initials)
    if (ini != "ee" && ini != "gg") throw ConfigError("sweep initial must be ee or gg");
  if (out_dir.empty()) throw ConfigError("sweep needs an output directory");
  base.validate();
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
  ScenarioConfig cfg;
  apply_scenario_json(cfg, parse_json_text(text));
  return cfg;
}

std::string scenario_to_json_text(const ScenarioConfig& cfg) {
  return scenario_to_json(cfg).dump(2) + "\n";
}

SweepConfig sweep_from_json_text(const std::string& text) {
  const json j = parse_json_text(text);
  SweepConfig sweep;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "deltas") sweep.deltas = value.get<std::vector<double>>();
      else if (key == "nbars") sweep.nbars = value.get<std::vector<double>>();
      else if (key == "initials") sweep.initials = value.get<std::vector<std::string>>();
      else if (key == "base") apply_scenario_json(sweep.base, value);
      else if (key == "out_dir") sweep.out_dir = value.get<std::string>();
      else throw ConfigError("unknown sweep key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("sweep key '" + key + "': " + e.what());
    }
  }
  return sweep;
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string canonical = scenario_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto grid = cfg.tau_grid();
  const auto rhos = reduced_density_series(cfg.model(), grid);
  ScenarioResult result;
  result.records =
      evaluate_series(rhos, grid, cfg.optimizer, cfg.measure_correlations, cfg.measure_deficits);
  for (const auto& r : result.records) result.warnings = result.warnings || !r.ok;
  return result;
}

ExitCode run_scenario_to_csv(const ScenarioConfig& cfg, const std::string& out) {
  const std::string path = out.empty() ? cfg.out : out;
  if (path.empty()) throw ConfigError("simulate needs an output path (out)");
  const ScenarioResult result = run_scenario(cfg);
  write_records_csv(result.records, path);
  return result.warnings ? ExitCode::completed_with_warnings : ExitCode::ok;
}

VerifyOutcome verify_scenario(const ScenarioConfig& cfg, bool scramble_basis) {
  cfg.validate();
  const auto grid = cfg.tau_grid();
  const ModelParams params = cfg.model();

  oracle::DeviationReport report;
  if (!scramble_basis) {
    report = oracle::deviation_report(params, grid);
  } else {
    // negative control: reverse the two-qubit basis on the manifold side
    const ManifoldPropagator manifold(params);
    report.dynamics_field_dim = manifold.field_dim();
    report.oracle_field_dim = manifold.field_dim() + 2;
    const auto h = oracle::build_full_hamiltonian(params.delta, report.oracle_field_dim - 1);
    const PureState psi0 = product_state(params.a1, params.b1, params.a2, params.b2,
                                         manifold.weights(), report.oracle_field_dim);
    const oracle::DenseEvolution dense(h, psi0);
    Eigen::Matrix4cd reverse = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) reverse(i, 3 - i) = 1.0;
    for (double tau : grid) {
      const auto rho_m = partial_trace_field(manifold.state_at(tau)).entries();
      const auto rho_o = partial_trace_field(dense.state_at(tau)).entries();
      const double dev = (reverse * rho_m * reverse - rho_o).cwiseAbs().maxCoeff();
      if (dev > report.max_deviation) {
        report.max_deviation = dev;
        report.argmax_tau = tau;
      }
    }
    report.pass = report.max_deviation < 1e-8;
    report.convention_mismatch = report.max_deviation > 1e-4;
  }

  VerifyOutcome outcome;
  outcome.max_deviation = report.max_deviation;
  outcome.argmax_tau = report.argmax_tau;
  outcome.dynamics_field_dim = report.dynamics_field_dim;
  outcome.oracle_field_dim = report.oracle_field_dim;
  outcome.exit = report.pass ? ExitCode::ok : ExitCode::verification_failure;

  std::ostringstream text;
  text << "verification of the manifold engine against the dense oracle\n";
  text << "  grid points:        " << grid.size() << " on [" << grid.front() << ", "
       << grid.back() << "]\n";
  text << "  dynamics field dim: " << outcome.dynamics_field_dim << "\n";
  text << "  oracle field dim:   " << outcome.oracle_field_dim << "\n";
  char line[128];
  std::snprintf(line, sizeof(line), "  max |drho|:         %.6e at tau = %.6g\n",
                outcome.max_deviation, outcome.argmax_tau);
  text << line;
  text << "  threshold:          1e-8 -> " << (report.pass ? "PASS" : "FAIL") << "\n";
  if (report.convention_mismatch)
    text << "  deviation above 1e-4: convention mismatch (check basis ordering)\n";
  outcome.report = text.str();
  return outcome;
}

std::string regime_stem(double delta, double nbar, const std::string& initial) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "d%g_n%g_%s", delta, nbar, initial.c_str());
  return buf;
}

namespace {

struct SweepItem {
  std::string file;
  double delta, nbar;
  std::string initial;
  std::string hash;
  std::string status;  // ok | warnings | failed
  std::string error;
};

ExitCode worst(ExitCode a, ExitCode b) {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

}  // namespace

ExitCode run_sweep(const SweepConfig& sweep) {
  sweep.validate();
  std::filesystem::create_directories(sweep.out_dir);

  std::vector<SweepItem> items;
  for (double delta : sweep.deltas)
    for (double nbar : sweep.nbars)
      for (const auto& initial : sweep.initials)
        items.push_back({regime_stem(delta, nbar, initial) + ".csv", delta, nbar, initial,
                         "", "pending", ""});

  const int count = static_cast<int>(items.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    auto& item = items[static_cast<size_t>(i)];
    ScenarioConfig cfg = sweep.base;
    cfg.delta = item.delta;
    cfg.field = FieldSpec::coherent(item.nbar, sweep.base.field.truncation_epsilon);
    cfg.initial = item.initial;
    cfg.out = (std::filesystem::path(sweep.out_dir) / item.file).string();
    item.hash = config_hash(cfg);
    try {
      const ExitCode code = run_scenario_to_csv(cfg, "");
      item.status = code == ExitCode::ok ? "ok" : "warnings";
    } catch (const std::exception& e) {
      item.status = "failed";
      item.error = e.what();
    }
  }

  json manifest;
  manifest["outputs"] = json::array();
  ExitCode exit = ExitCode::ok;
  for (const auto& item : items) {
    json entry;
    entry["file"] = item.file;
    entry["delta"] = item.delta;
    entry["nbar"] = item.nbar;
    entry["initial"] = item.initial;
    entry["config_hash"] = item.hash;
    entry["status"] = item.status;
    if (!item.error.empty()) entry["error"] = item.error;
    manifest["outputs"].push_back(entry);
    if (item.status == "warnings") exit = worst(exit, ExitCode::completed_with_warnings);
    if (item.status == "failed") exit = worst(exit, ExitCode::completed_with_warnings);
  }
  std::ofstream mf(std::filesystem::path(sweep.out_dir) / "manifest.json", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot write sweep manifest");
  mf << manifest.dump(2) << "\n";
  return exit;
}

ExitCode run_figures(const std::string& out_dir, int steps) {
  SweepConfig sweep;
  sweep.deltas = {0.5, 1.0};
  sweep.nbars = {10.0, 20.0};
  sweep.initials = {"ee", "gg"};
  sweep.base.steps = steps;
  sweep.base.tau_max = 25.0;
  sweep.out_dir = out_dir;
  ExitCode exit = run_sweep(sweep);

  for (double delta : sweep.deltas)
    for (double nbar : sweep.nbars)
      for (const auto& initial : sweep.initials) {
        const std::string stem = regime_stem(delta, nbar, initial);
        const auto csv_path = (std::filesystem::path(out_dir) / (stem + ".csv")).string();
        const auto corr = (std::filesystem::path(out_dir) / (stem + "_correlations.svg")).string();
        const auto defs = (std::filesystem::path(out_dir) / (stem + "_deficits.svg")).string();
        exit = worst(exit, run_plot(csv_path, {"Tc", "Qc", "Cc"}, corr));
        exit = worst(exit, run_plot(csv_path, {"Q_def", "C_def"}, defs));
      }
  return exit;
}

ExitCode run_plot(const std::string& csv_path, const std::vector<std::string>& columns,
                  const std::string& out_path) {
  if (columns.empty()) throw ConfigError("plot needs at least one column");
  const CsvTable table = read_csv(csv_path);
  if (table.column_index("tau") < 0) throw ConfigError("CSV has no tau column: " + csv_path);

  const auto tau = table.column("tau");
  std::vector<PlotSeries> series;
  for (const auto& name : columns) {
    if (table.column_index(name) < 0) {
      std::string available;
      for (const auto& c : table.columns) available += (available.empty() ? "" : ", ") + c;
      throw ConfigError("unknown column '" + name + "'; available: " + available);
    }
    series.push_back({name, tau, table.column(name)});
  }

  const std::string title = std::filesystem::path(csv_path).stem().string();
  write_line_chart_svg(series, "tau", title, out_path);
  return ExitCode::ok;
}

void apply_thread_cap_from_env() {
  const char* env = std::getenv("CHARGEQ_THREADS");
  if (env == nullptr || *env == '\0') return;
  const int cap = std::atoi(env);
  if (cap > 0) omp_set_num_threads(std::min(cap, omp_get_num_procs()));
}

}  // namespace chargeq
