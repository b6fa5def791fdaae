#ifndef CHARGEQ_SCENARIO_HPP
#define CHARGEQ_SCENARIO_HPP

#include <string>
#include <vector>

#include "chargeq/dynamics.hpp"
#include "chargeq/measures.hpp"

// Scenario configuration and the drivers behind the CLI subcommands. The
// drivers live in the library so tests can exercise them directly; the CLI
// binary is a thin argument-parsing wrapper.

namespace chargeq {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExitCode : int {
  ok = 0,
  config_error = 1,
  verification_failure = 2,
  completed_with_warnings = 3,
};

struct ScenarioConfig {
  double delta = 0.5;
  FieldSpec field = FieldSpec::coherent(10.0);
  std::string initial = "ee";  // ee | gg | custom
  Complex a1{1.0, 0.0}, b1{0.0, 0.0}, a2{1.0, 0.0}, b2{0.0, 0.0};  // for custom
  double tau_max = 25.0;
  int steps = 251;
  OptimizerConfig optimizer;
  bool measure_correlations = true;
  bool measure_deficits = true;
  std::string out;

  void validate() const;           // throws ConfigError
  ModelParams model() const;       // expands named initial states
  std::vector<double> tau_grid() const;
};

struct SweepConfig {
  std::vector<double> deltas;
  std::vector<double> nbars;
  std::vector<std::string> initials;
  ScenarioConfig base;
  std::string out_dir;

  void validate() const;
};

// JSON round trip; unknown keys are configuration errors
ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& cfg);
SweepConfig sweep_from_json_text(const std::string& text);

/// FNV-1a hash of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

struct ScenarioResult {
  std::vector<CorrelationRecord> records;
  bool warnings = false;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// simulate driver: records -> CSV at cfg.out (or `out` override).
ExitCode run_scenario_to_csv(const ScenarioConfig& cfg, const std::string& out);

struct VerifyOutcome {
  double max_deviation = 0.0;
  double argmax_tau = 0.0;
  int dynamics_field_dim = 0;
  int oracle_field_dim = 0;
  ExitCode exit = ExitCode::ok;
  std::string report;  // plain text
};

/// verify driver. scramble_basis deliberately mis-orders the two-qubit basis
/// on the manifold side; it exists as a negative control for the mismatch
/// path and is exposed only through a hidden CLI flag.
VerifyOutcome verify_scenario(const ScenarioConfig& cfg, bool scramble_basis = false);

/// sweep driver: one CSV per (delta, nbar, initial), plus manifest.json.
ExitCode run_sweep(const SweepConfig& sweep);

/// figures driver: the eight figure regimes (delta in {0.5,1}, nbar in
/// {10,20}, initial in {ee,gg}) as CSVs plus correlation/deficit SVGs.
ExitCode run_figures(const std::string& out_dir, int steps = 251);

/// plot driver: selected CSV columns against tau into an SVG.
ExitCode run_plot(const std::string& csv_path, const std::vector<std::string>& columns,
                  const std::string& out_path);

/// `d{delta}_n{nbar}_{initial}` used by sweep and figures outputs.
std::string regime_stem(double delta, double nbar, const std::string& initial);

/// Honors the CHARGEQ_THREADS cap (default: available parallelism).
void apply_thread_cap_from_env();

}  // namespace chargeq

#endif
