#include <doctest.h>
#include <omp.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chargeq/csv.hpp"
#include "chargeq/scenario.hpp"
#include "chargeq/svg.hpp"

using namespace chargeq;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ScenarioConfig small_scenario() {
  ScenarioConfig cfg;
  cfg.delta = 0.5;
  cfg.field = FieldSpec::coherent(3.0);
  cfg.initial = "ee";
  cfg.tau_max = 5.0;
  cfg.steps = 6;
  return cfg;
}

}  // namespace

TEST_CASE("scenario config: JSON round trip and validation") {
  ScenarioConfig cfg = small_scenario();
  cfg.optimizer.seed = 77;
  cfg.measure_deficits = false;
  cfg.out = "x.csv";

  const auto text = scenario_to_json_text(cfg);
  const auto parsed = scenario_from_json_text(text);
  CHECK(parsed.delta == cfg.delta);
  CHECK(parsed.field.nbar == cfg.field.nbar);
  CHECK(parsed.steps == cfg.steps);
  CHECK(parsed.optimizer.seed == 77);
  CHECK(parsed.measure_deficits == false);
  CHECK(parsed.measure_correlations == true);
  CHECK(parsed.out == "x.csv");
  CHECK(config_hash(parsed) == config_hash(cfg));

  CHECK_THROWS_AS(scenario_from_json_text("{\"no_such_key\": 1}"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json_text("{\"delta\": \"oops\"}"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json_text("{not json"), ConfigError);
  CHECK_THROWS_AS(scenario_from_json_text("{\"a1\": [1]}"), ConfigError);

  ScenarioConfig bad = small_scenario();
  bad.steps = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_scenario();
  bad.tau_max = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_scenario();
  bad.initial = "both";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_scenario();
  bad.initial = "custom";
  bad.a1 = Complex(1.0, 0.0);
  bad.b1 = Complex(1.0, 0.0);  // not normalized
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("run_scenario emits the documented CSV layout") {
  TempDir dir("chargeq_csv_test");
  ScenarioConfig cfg = small_scenario();
  const auto out = (dir.path / "run.csv").string();
  const ExitCode code = run_scenario_to_csv(cfg, out);
  CHECK(code == ExitCode::ok);

  const std::string text = slurp(out);
  CHECK(text.rfind("tau,Tc,Qc,Cc,I_lo,I_loz,Q_def,C_def,S_ab,trace_err,min_eig,opt_evals\n",
                   0) == 0);
  const CsvTable table = read_csv(out);
  CHECK(table.rows.size() == 6);
  CHECK(table.columns.size() == 12);

  // tau = 0: product state, no correlations yet
  CHECK(std::abs(table.rows[0][1]) < 1e-9);   // Tc
  CHECK(std::abs(table.rows[0][2]) < 1e-9);   // Qc
  CHECK(std::abs(table.rows[0][3]) < 1e-9);   // Cc
  for (const auto& row : table.rows) {
    CHECK(std::abs(row[9]) < 1e-10);   // trace_err
    CHECK(row[10] > -1e-10);           // min_eig
  }
}

TEST_CASE("ground state with the vacuum stays uncorrelated") {
  ScenarioConfig cfg;
  cfg.delta = 0.8;
  cfg.field = FieldSpec::coherent(0.0);
  cfg.initial = "gg";
  cfg.tau_max = 10.0;
  cfg.steps = 5;
  cfg.measure_deficits = false;
  const auto result = run_scenario(cfg);
  for (const auto& rec : result.records) {
    CHECK(std::abs(rec.T_c) < 1e-10);
    CHECK(std::abs(rec.Q_c) < 1e-10);
  }
}

TEST_CASE("identical configs give byte-identical CSVs") {
  ScenarioConfig cfg = small_scenario();
  const auto a = records_to_csv(run_scenario(cfg).records);
  const auto b = records_to_csv(run_scenario(cfg).records);
  CHECK(a == b);
}

TEST_CASE("thread count does not change any output byte") {
  ScenarioConfig cfg = small_scenario();
  const int before = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto serial = records_to_csv(run_scenario(cfg).records);
  omp_set_num_threads(3);
  const auto parallel = records_to_csv(run_scenario(cfg).records);
  omp_set_num_threads(before);
  CHECK(serial == parallel);
}

TEST_CASE("measure toggles blank out the disabled columns") {
  ScenarioConfig cfg = small_scenario();
  cfg.measure_deficits = false;
  const auto result = run_scenario(cfg);
  for (const auto& rec : result.records) {
    CHECK(std::isnan(rec.I_loz));
    CHECK(std::isnan(rec.Q_def));
    CHECK(!std::isnan(rec.T_c));
  }
  const auto csv = records_to_csv(result.records);
  CHECK(csv.find("nan") != std::string::npos);
}

TEST_CASE("verify driver passes honestly and fails the scrambled control") {
  ScenarioConfig cfg = small_scenario();
  cfg.steps = 5;
  const auto ok = verify_scenario(cfg);
  CHECK(ok.exit == ExitCode::ok);
  CHECK(ok.max_deviation < 1e-8);
  CHECK(ok.report.find("PASS") != std::string::npos);
  CHECK(ok.oracle_field_dim == ok.dynamics_field_dim + 2);

  const auto scrambled = verify_scenario(cfg, true);
  CHECK(scrambled.exit == ExitCode::verification_failure);
  CHECK(scrambled.max_deviation > 1e-4);
  CHECK(scrambled.report.find("convention mismatch") != std::string::npos);
}

TEST_CASE("sweep writes one CSV per combination plus a manifest") {
  TempDir dir("chargeq_sweep_test");
  SweepConfig sweep;
  sweep.deltas = {0.5, 1.0};
  sweep.nbars = {2.0};
  sweep.initials = {"ee"};
  sweep.base = small_scenario();
  sweep.base.steps = 4;
  sweep.out_dir = dir.path.string();

  const ExitCode code = run_sweep(sweep);
  CHECK(code == ExitCode::ok);
  CHECK(fs::exists(dir.path / "d0.5_n2_ee.csv"));
  CHECK(fs::exists(dir.path / "d1_n2_ee.csv"));
  const std::string manifest = slurp(dir.path / "manifest.json");
  CHECK(manifest.find("d0.5_n2_ee.csv") != std::string::npos);
  CHECK(manifest.find("config_hash") != std::string::npos);
  CHECK(manifest.find("\"status\": \"ok\"") != std::string::npos);

  // a degenerate sweep reproduces the single-scenario output bytes
  ScenarioConfig single = sweep.base;
  single.delta = 0.5;
  single.field = FieldSpec::coherent(2.0, single.field.truncation_epsilon);
  single.initial = "ee";
  const auto direct = (dir.path / "direct.csv").string();
  run_scenario_to_csv(single, direct);
  CHECK(slurp(direct) == slurp(dir.path / "d0.5_n2_ee.csv"));

  SweepConfig empty = sweep;
  empty.deltas.clear();
  CHECK_THROWS_AS(run_sweep(empty), ConfigError);
}

TEST_CASE("plot renders selected columns and rejects unknown ones") {
  TempDir dir("chargeq_plot_test");
  ScenarioConfig cfg = small_scenario();
  cfg.steps = 4;
  const auto csv = (dir.path / "run.csv").string();
  run_scenario_to_csv(cfg, csv);

  const auto svg_path = (dir.path / "run.svg").string();
  CHECK(run_plot(csv, {"Tc", "Qc", "Cc"}, svg_path) == ExitCode::ok);
  const std::string svg = slurp(svg_path);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("Tc") != std::string::npos);
  CHECK(svg.find("viewBox=\"0 0 800 500\"") != std::string::npos);

  CHECK_THROWS_WITH_AS(run_plot(csv, {"nope"}, svg_path),
                       doctest::Contains("available"), ConfigError);
  CHECK_THROWS_AS(run_plot(csv, {}, svg_path), ConfigError);
}

TEST_CASE("figures regime naming covers the eight paper regimes") {
  CHECK(regime_stem(0.5, 10, "ee") == "d0.5_n10_ee");
  CHECK(regime_stem(1.0, 20, "gg") == "d1_n20_gg");
}

TEST_CASE("CHARGEQ_THREADS caps the worker count") {
  const int before = omp_get_max_threads();
  setenv("CHARGEQ_THREADS", "1", 1);
  apply_thread_cap_from_env();
  CHECK(omp_get_max_threads() == 1);
  unsetenv("CHARGEQ_THREADS");
  omp_set_num_threads(before);
}

#ifdef CHARGEQ_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CHARGEQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("CLI binary end to end: flags, exit codes, outputs") {
  TempDir dir("chargeq_cli_e2e");
  const auto csv = (dir.path / "run.csv").string();

  CHECK(run_cli("simulate --delta 0.5 --nbar 2 --initial ee --tau-max 5 --steps 4 --out " + csv) ==
        0);
  CHECK(fs::exists(csv));
  CHECK(read_csv(csv).rows.size() == 4);

  const auto svg = (dir.path / "run.svg").string();
  CHECK(run_cli("plot " + csv + " --columns Tc,Qc,Cc --out " + svg) == 0);
  CHECK(fs::exists(svg));

  // config file with a flag override
  const auto cfg_path = (dir.path / "cfg.json").string();
  {
    ScenarioConfig cfg = small_scenario();
    cfg.steps = 4;
    cfg.out = (dir.path / "from_config.csv").string();
    std::ofstream f(cfg_path);
    f << scenario_to_json_text(cfg);
  }
  CHECK(run_cli("simulate --config " + cfg_path + " --steps 3") == 0);
  CHECK(read_csv((dir.path / "from_config.csv").string()).rows.size() == 3);

  CHECK(run_cli("verify --nbar 1 --initial ee --tau-max 2 --steps 3") == 0);
  CHECK(run_cli("verify --nbar 1 --initial ee --tau-max 2 --steps 3 --test-scramble-basis") == 2);

  // config errors exit with 1
  CHECK(run_cli("simulate --steps 1 --out " + csv) == 1);
  CHECK(run_cli("simulate --initial nonsense --out " + csv) == 1);
  CHECK(run_cli("plot " + csv + " --columns NoSuchColumn --out " + svg) == 1);
}
#endif
