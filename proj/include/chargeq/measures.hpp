#ifndef CHARGEQ_MEASURES_HPP
#define CHARGEQ_MEASURES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "chargeq/qstate.hpp"

// Correlation and deficit measures for two-qubit states, in bits (the
// negativity is unitless). The localizable information is computed in the
// zero-way approximation: optimal complete local product-basis dephasing,
// which lower-bounds the LOCC supremum.

namespace chargeq {

/// Local orthonormal qubit basis {cos(t/2)|e> + e^{i p} sin(t/2)|g>,
/// -e^{-i p} sin(t/2)|e> + cos(t/2)|g>} parameterized by Bloch angles.
struct MeasurementBasis {
  double theta = 0.0;  // polar, [0, pi]
  double phi = 0.0;    // azimuth, [0, 2pi)

  Eigen::Matrix2cd unitary() const;  // columns are the two basis states
};

struct OptimizerConfig {
  int grid_starts = 16;    // best points of the 8x8 (theta_a, theta_b) seed grid
  int random_starts = 4;
  int max_evaluations = 20000;
  double entropy_tolerance = 1e-6;
  std::uint64_t seed = 0x5eedULL;  // fixed seed keeps runs reproducible
};

struct LocalizableInfo {
  double value = 0.0;  // I_loz = 2 - min_bases S(dephased rho)
  double min_entropy = 0.0;
  MeasurementBasis basis_a, basis_b;
  int evaluations = 0;
  bool converged = true;
};

/// Mutual information S(a) + S(b) - S(ab).
double total_correlation(const DensityMatrix& rho);

/// Negativity: sum |lambda| - 1 over partial-transpose eigenvalues, with
/// round-off negatives (above -1e-10) clamped so separable states report 0.
double negativity(const DensityMatrix& rho);

/// Classical correlation taken as the difference T_c - Q_c.
double classical_correlation(const DensityMatrix& rho);

/// I_Lo = I(rho_a) + I(rho_b) with I(sigma) = log2(dim) - S(sigma).
double local_information(const DensityMatrix& rho);

/// rho after a complete dephasing in the product basis (basis_a (x) basis_b).
DensityMatrix dephase(const DensityMatrix& rho, const MeasurementBasis& basis_a,
                      const MeasurementBasis& basis_b);

/// Multi-start Nelder-Mead over both Bloch-angle pairs; seeded from a coarse
/// theta grid, the marginal eigenbases, and a few random points.
LocalizableInfo localizable_information(const DensityMatrix& rho, const OptimizerConfig& opt);

/// Q_def = I(rho_ab) - I_loz = min_bases S(dephased) - S(rho).
double quantum_deficit(const DensityMatrix& rho, const OptimizerConfig& opt);

/// C_def = I_loz - I_Lo.
double classical_deficit(const DensityMatrix& rho, const OptimizerConfig& opt);

struct CorrelationRecord {
  double tau = 0.0;
  double T_c = 0.0, Q_c = 0.0, C_c = 0.0;
  double I_Lo = 0.0, I_loz = 0.0, Q_def = 0.0, C_def = 0.0;
  double S_ab = 0.0, S_a = 0.0, S_b = 0.0;
  double trace_error = 0.0, min_eigenvalue = 0.0;
  int optimizer_evals = 0;
  bool optimizer_converged = true;
  bool ok = true;
  std::string note;  // first failure, when ok is false
};

/// All quantities for one time point; one optimization feeds I_loz, Q_def
/// and C_def so the record is internally consistent. Component failures are
/// recorded in the diagnostics instead of aborting a sweep.
CorrelationRecord evaluate_all(const DensityMatrix& rho, double tau, const OptimizerConfig& opt);

/// evaluate_all across a grid (OpenMP-parallel, outputs in grid order).
/// Disabled measure groups are reported as NaN.
std::vector<CorrelationRecord> evaluate_series(const std::vector<DensityMatrix>& rhos,
                                               std::span<const double> taus,
                                               const OptimizerConfig& opt,
                                               bool with_correlations = true,
                                               bool with_deficits = true);

}  // namespace chargeq

#endif
