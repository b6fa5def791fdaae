#ifndef CHARGEQ_ORACLE_HPP
#define CHARGEQ_ORACLE_HPP

#include <span>

#include "chargeq/dynamics.hpp"
#include "chargeq/qstate.hpp"

// Brute-force reference evolution on the full truncated 2 (x) 2 (x) Fock
// space. Deliberately shares no propagation code with the manifold engine
// (only qstate utilities): the Hamiltonian is assembled directly from ladder
// and Pauli operators and exponentiated through one dense Hermitian
// eigendecomposition. Serial and slow by design; it exists to validate the
// production engine.

namespace chargeq::oracle {

struct DenseHamiltonian {
  Eigen::MatrixXcd h;  // dimension 4*(n_max+1)
  int n_max = 0;
  double delta = 0.0;
};

/// H = sum_j (delta/2) sigma_z^(j) + (psi^dag sigma_-^(j) + h.c.) on the
/// truncated space, in coupling units and the frame rotating at the
/// resonator frequency. Excitation-conserving by construction.
DenseHamiltonian build_full_hamiltonian(double delta, int n_max);

/// One-time eigendecomposition of H, reusable across a tau grid.
class DenseEvolution {
 public:
  DenseEvolution(const DenseHamiltonian& h, const PureState& psi0);
  PureState state_at(double tau) const;

 private:
  Eigen::VectorXd lambda_;
  Eigen::MatrixXcd v_;
  Eigen::VectorXcd c0_;
  int field_dim_;
};

PureState evolve_dense(const DenseHamiltonian& h, const PureState& psi0, double tau);

struct DeviationReport {
  double max_deviation = 0.0;  // max elementwise |rho_manifold - rho_oracle|
  double argmax_tau = 0.0;
  int dynamics_field_dim = 0;
  int oracle_field_dim = 0;
  bool pass = false;                 // deviation < 1e-8
  bool convention_mismatch = false;  // deviation > 1e-4: index-ordering class of bug
};

/// Runs both engines over the grid at matched parameters (oracle keeps two
/// extra field levels) and reports the worst elementwise disagreement of
/// rho_ab(tau).
DeviationReport deviation_report(const ModelParams& params, std::span<const double> tau_grid);

}  // namespace chargeq::oracle

#endif
