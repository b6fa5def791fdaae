// Benchmark: manifold engine vs dense-oracle reference on a full trajectory
// (propagation + partial trace only, no measures). The oracle time includes
// its one-time eigendecomposition, which is the honest cost of using it.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <vector>

#include "chargeq/oracle.hpp"
#include "chargeq/scenario.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  chargeq::apply_thread_cap_from_env();

  CLI::App app{"manifold engine vs dense oracle trajectory benchmark"};
  double nbar = 20.0, delta = 0.5, tau_max = 25.0;
  int steps = 101, repeats = 3;
  std::string initial = "ee";
  app.add_option("--nbar", nbar, "coherent mean photon number");
  app.add_option("--delta", delta, "detuning over coupling");
  app.add_option("--tau-max", tau_max, "end of the grid");
  app.add_option("--steps", steps, "grid points");
  app.add_option("--initial", initial, "ee | gg");
  app.add_option("--repeats", repeats, "timing repetitions, best is reported");
  CLI11_PARSE(app, argc, argv);

  chargeq::ScenarioConfig cfg;
  cfg.delta = delta;
  cfg.field = chargeq::FieldSpec::coherent(nbar);
  cfg.initial = initial;
  cfg.tau_max = tau_max;
  cfg.steps = steps;
  cfg.validate();

  const auto grid = cfg.tau_grid();
  const auto params = cfg.model();

  double manifold_best = 1e300, oracle_best = 1e300;
  int field_dim = 0;
  for (int r = 0; r < repeats; ++r) {
    {
      const auto start = Clock::now();
      const auto rhos = chargeq::reduced_density_series(params, grid);
      manifold_best = std::min(manifold_best, seconds_since(start));
      field_dim = 0;  // recovered below from the engine
      (void)rhos;
    }
    {
      const auto start = Clock::now();
      const chargeq::ManifoldPropagator probe(params);  // for matched cutoffs only
      field_dim = probe.field_dim();
      const auto h = chargeq::oracle::build_full_hamiltonian(delta, field_dim + 1);
      const auto psi0 = chargeq::product_state(params.a1, params.b1, params.a2, params.b2,
                                               probe.weights(), field_dim + 2);
      const chargeq::oracle::DenseEvolution dense(h, psi0);
      std::vector<chargeq::DensityMatrix> rhos;
      rhos.reserve(grid.size());
      for (double tau : grid) rhos.push_back(chargeq::partial_trace_field(dense.state_at(tau)));
      oracle_best = std::min(oracle_best, seconds_since(start));
    }
  }

  std::printf("trajectory: %d points on [0, %g], delta=%g, nbar=%g, initial=%s\n", steps,
              tau_max, delta, nbar, initial.c_str());
  std::printf("  field dim (manifold): %d, oracle dim: %d\n", field_dim, 4 * (field_dim + 2));
  std::printf("  manifold engine: %10.4f ms\n", 1e3 * manifold_best);
  std::printf("  dense oracle:    %10.4f ms\n", 1e3 * oracle_best);
  std::printf("  speedup:         %10.1fx\n", oracle_best / manifold_best);
  return 0;
}
