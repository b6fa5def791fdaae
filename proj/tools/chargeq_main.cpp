#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chargeq/scenario.hpp"

namespace {

using chargeq::Complex;
using chargeq::ConfigError;
using chargeq::ExitCode;
using chargeq::FieldSpec;
using chargeq::ScenarioConfig;

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Complex parse_complex(const std::string& text) {
  std::istringstream ss(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(ss >> re)) throw ConfigError("cannot parse complex value '" + text + "'");
  if (ss >> comma) {
    if (comma != ',' || !(ss >> im))
      throw ConfigError("complex values are 're' or 're,im', got '" + text + "'");
  }
  return {re, im};
}

// Scenario options shared by `simulate` and `verify`; every JSON config key
// has a flag of the same name, and flags override the file.
struct ScenarioOptions {
  CLI::App* sub = nullptr;
  std::string config, field, initial, a1, b1, a2, b2, out, measures;
  double delta = 0, nbar = 0, tau_max = 0, epsilon = 0, opt_tolerance = 0;
  int steps = 0, fock_n = 0, opt_grid_starts = 0, opt_random_starts = 0, opt_max_evals = 0;
  std::uint64_t opt_seed = 0;

  void attach(CLI::App* s) {
    sub = s;
    s->add_option("--config", config, "JSON config file (flags override it)");
    s->add_option("--delta", delta, "detuning over coupling");
    s->add_option("--field", field, "coherent | fock");
    s->add_option("--nbar", nbar, "coherent mean photon number");
    s->add_option("--fock-n", fock_n, "fock photon number");
    s->add_option("--epsilon", epsilon, "field truncation epsilon");
    s->add_option("--initial", initial, "ee | gg | custom");
    s->add_option("--a1", a1, "qubit a |e> amplitude, 're' or 're,im' (custom initial)");
    s->add_option("--b1", b1, "qubit a |g> amplitude");
    s->add_option("--a2", a2, "qubit b |e> amplitude");
    s->add_option("--b2", b2, "qubit b |g> amplitude");
    s->add_option("--tau-max", tau_max, "end of the time grid (units of 1/coupling)");
    s->add_option("--steps", steps, "grid points, endpoints included");
    s->add_option("--opt-grid-starts", opt_grid_starts, "optimizer starts from the seed grid");
    s->add_option("--opt-random-starts", opt_random_starts, "additional random starts");
    s->add_option("--opt-max-evals", opt_max_evals, "optimizer evaluation cap");
    s->add_option("--opt-tolerance", opt_tolerance, "optimizer entropy tolerance");
    s->add_option("--opt-seed", opt_seed, "optimizer RNG seed");
    s->add_option("--measures", measures, "comma list of groups: correlations,deficits");
    s->add_option("--out", out, "output path");
  }

  ScenarioConfig build() const {
    ScenarioConfig cfg =
        config.empty() ? ScenarioConfig{} : chargeq::scenario_from_json_text(slurp(config));
    const auto set = [this](const char* name) { return sub->count(name) > 0; };
    if (set("--delta")) cfg.delta = delta;
    if (set("--field")) {
      if (field == "coherent") cfg.field.kind = FieldSpec::Kind::coherent;
      else if (field == "fock") cfg.field.kind = FieldSpec::Kind::fock;
      else throw ConfigError("--field must be coherent or fock");
    }
    if (set("--nbar")) cfg.field.nbar = nbar;
    if (set("--fock-n")) cfg.field.n = fock_n;
    if (set("--epsilon")) cfg.field.truncation_epsilon = epsilon;
    if (set("--initial")) cfg.initial = initial;
    if (set("--a1")) cfg.a1 = parse_complex(a1);
    if (set("--b1")) cfg.b1 = parse_complex(b1);
    if (set("--a2")) cfg.a2 = parse_complex(a2);
    if (set("--b2")) cfg.b2 = parse_complex(b2);
    if (set("--tau-max")) cfg.tau_max = tau_max;
    if (set("--steps")) cfg.steps = steps;
    if (set("--opt-grid-starts")) cfg.optimizer.grid_starts = opt_grid_starts;
    if (set("--opt-random-starts")) cfg.optimizer.random_starts = opt_random_starts;
    if (set("--opt-max-evals")) cfg.optimizer.max_evaluations = opt_max_evals;
    if (set("--opt-tolerance")) cfg.optimizer.entropy_tolerance = opt_tolerance;
    if (set("--opt-seed")) cfg.optimizer.seed = opt_seed;
    if (set("--measures")) {
      cfg.measure_correlations = cfg.measure_deficits = false;
      std::stringstream ss(measures);
      for (std::string item; std::getline(ss, item, ',');) {
        if (item == "correlations") cfg.measure_correlations = true;
        else if (item == "deficits") cfg.measure_deficits = true;
        else throw ConfigError("unknown measure group '" + item + "'");
      }
    }
    if (set("--out")) cfg.out = out;
    return cfg;
  }
};

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  chargeq::apply_thread_cap_from_env();

  CLI::App app{"two charge qubits coupled to a stripline resonator: "
               "correlation and deficit dynamics"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a scenario and write the trajectory CSV");
  ScenarioOptions sim_opts;
  sim_opts.attach(sim);

  auto* ver = app.add_subcommand("verify", "check the manifold engine against the dense oracle");
  ScenarioOptions ver_opts;
  ver_opts.attach(ver);
  bool scramble = false;
  ver->add_flag("--test-scramble-basis", scramble)->group("");  // negative-control hook

  auto* swp = app.add_subcommand("sweep", "run a batch of scenarios into a directory");
  std::string sweep_config, sweep_out_dir;
  swp->add_option("--config", sweep_config, "sweep JSON config")->required();
  swp->add_option("--out-dir", sweep_out_dir, "output directory (overrides config)");

  auto* plt = app.add_subcommand("plot", "render CSV columns to an SVG line chart");
  std::string plot_csv, plot_columns, plot_out;
  plt->add_option("csv", plot_csv, "input CSV from simulate/sweep")->required();
  plt->add_option("--columns", plot_columns, "comma list of column names")->required();
  plt->add_option("--out", plot_out, "output SVG path")->required();

  auto* fig = app.add_subcommand("figures", "regenerate the eight figure-regime CSVs and SVGs");
  std::string fig_out_dir = "paper_figs";
  int fig_steps = 251;
  fig->add_option("--out-dir", fig_out_dir, "output directory");
  fig->add_option("--steps", fig_steps, "grid points per trajectory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      const ExitCode code = chargeq::run_scenario_to_csv(sim_opts.build(), "");
      return static_cast<int>(code);
    }
    if (ver->parsed()) {
      const auto outcome = chargeq::verify_scenario(ver_opts.build(), scramble);
      std::cout << outcome.report;
      const std::string report_path = ver_opts.build().out;
      if (!report_path.empty()) {
        std::ofstream f(report_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report: " + report_path);
        f << outcome.report;
      }
      return static_cast<int>(outcome.exit);
    }
    if (swp->parsed()) {
      auto sweep = chargeq::sweep_from_json_text(slurp(sweep_config));
      if (!sweep_out_dir.empty()) sweep.out_dir = sweep_out_dir;
      return static_cast<int>(chargeq::run_sweep(sweep));
    }
    if (plt->parsed())
      return static_cast<int>(chargeq::run_plot(plot_csv, split_commas(plot_columns), plot_out));
    if (fig->parsed()) return static_cast<int>(chargeq::run_figures(fig_out_dir, fig_steps));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }
  return 0;
}
