#ifndef CHARGEQ_DYNAMICS_HPP
#define CHARGEQ_DYNAMICS_HPP

#include <array>
#include <span>
#include <vector>

#include "chargeq/qstate.hpp"

// Exact propagation of two qubits coupled to a single resonator mode in the
// rotating-wave approximation, working in units of the coupling (time
// variable tau = lambda*t, detuning supplied as delta/lambda). The
// Hamiltonian is block diagonal over excitation manifolds
// {|ee,n>, |eg,n+1>, |ge,n+1>, |gg,n+2>}; each block is a real symmetric
// matrix diag(delta,0,0,-delta) + couplings gamma = sqrt(n+1) to |ee> and
// beta = sqrt(n+2) to |gg>, diagonalized once and propagated by phases.

namespace chargeq {

struct CutoffError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldSpec {
  enum class Kind { coherent, fock };
  Kind kind = Kind::coherent;
  double nbar = 0.0;  // coherent mean photon number
  int n = 0;          // fock level
  double truncation_epsilon = 1e-12;

  static FieldSpec coherent(double nbar, double epsilon = 1e-12) {
    return {Kind::coherent, nbar, 0, epsilon};
  }
  static FieldSpec fock(int n, double epsilon = 1e-12) {
    return {Kind::fock, 0.0, n, epsilon};
  }
};

struct ModelParams {
  double delta = 0.0;  // detuning in units of the coupling
  FieldSpec field;
  Complex a1{1.0, 0.0}, b1{0.0, 0.0};  // qubit a amplitudes on |e>, |g>
  Complex a2{1.0, 0.0}, b2{0.0, 0.0};  // qubit b
  void validate() const;
};

struct CoherentWeights {
  int n_max;
  Eigen::VectorXd w;  // w_n = exp(-nbar/2) nbar^(n/2)/sqrt(n!), n = 0..n_max
};

/// Truncated coherent-state amplitudes with real phase convention
/// (alpha = sqrt(nbar)), computed in log space. The cut is placed where the
/// dropped amplitude norm falls below epsilon, i.e. tail probability below
/// epsilon^2, so the retained probability exceeds 1 - epsilon by a wide
/// margin. Throws if that needs more than 4096 levels.
CoherentWeights coherent_weights(double nbar, double epsilon);

/// Normalized initial field amplitudes for either field kind.
Eigen::VectorXd field_weights(const FieldSpec& field);

struct ManifoldBlock {
  int n;  // photon index of the |ee> slot; -1 and -2 give truncated blocks
  double gamma, beta;
  std::vector<int> slots;    // present members of {0:ee,1:eg,2:ge,3:gg}
  std::vector<int> photons;  // photon index per present slot
  Eigen::MatrixXd h;         // real symmetric block Hamiltonian
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // orthogonal columns

  int dim() const { return static_cast<int>(slots.size()); }
};

/// Block for manifold n. Slots whose photon index is negative (n = -1, -2)
/// or at/above field_dim (top of an explicit cutoff) are dropped.
ManifoldBlock build_block(int n, double delta);
ManifoldBlock build_block(int n, double delta, int field_dim);

/// U(tau) = V exp(-i Lambda tau) V^T on the block; unitary and complex
/// symmetric since the block is real symmetric.
Eigen::MatrixXcd block_propagator(const ManifoldBlock& block, double tau);

/// Trigonometric closed form of the manifold frequencies, kept as an
/// independent cross-check against the eigendecomposition route: the three
/// nonzero block eigenvalues are the roots of a depressed cubic, solved here
/// via kappa, theta_i, mu_i (plus the alpha_i weights used by closed-form
/// propagator entries). The diagnostic fields record whether {mu_i} lands on
/// the block spectrum.
struct ClosedFormFrequencies {
  double kappa = 0.0;
  std::array<double, 3> theta{}, mu{}, alpha{};
  double arccos_argument = 0.0;
  bool argument_in_range = true;      // |arccos argument| <= 1 up to round-off
  bool matches_block_spectrum = false;  // every mu_i within 1e-8 of a block eigenvalue
  double max_mismatch = 0.0;          // worst distance from mu_i to the block spectrum
};

ClosedFormFrequencies closed_form_frequencies(int n, double delta);

/// Production engine: builds the manifold blocks once (weights, spectra,
/// initial components in each eigenbasis) and evaluates the state at any tau
/// by phase application. Time points are independent; callers parallelize
/// over them freely.
class ManifoldPropagator {
 public:
  explicit ManifoldPropagator(const ModelParams& params);
  // explicit field cutoff; throws CutoffError if the initial state has more
  // than epsilon amplitude on the top two retained levels or beyond
  ManifoldPropagator(const ModelParams& params, int field_dim);

  PureState state_at(double tau) const;
  int field_dim() const { return field_dim_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  void build(const ModelParams& params);

  struct BlockData {
    std::vector<int> slots, photons;
    Eigen::MatrixXd v;       // eigenvectors
    Eigen::VectorXd lambda;  // eigenvalues
    Eigen::VectorXcd c0;     // initial components in the eigenbasis
  };
  std::vector<BlockData> blocks_;
  Eigen::VectorXd weights_;  // normalized
  int field_dim_ = 0;
};

PureState propagate(const ModelParams& params, double tau);

/// rho_ab(tau) for every grid point (OpenMP-parallel over the grid, outputs
/// in grid order).
std::vector<DensityMatrix> reduced_density_series(const ModelParams& params,
                                                  std::span<const double> tau_grid);

}  // namespace chargeq

#endif
