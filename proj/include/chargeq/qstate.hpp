#ifndef CHARGEQ_QSTATE_HPP
#define CHARGEQ_QSTATE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

// Density-matrix algebra for the two-qubit subsystem and joint qubit-field
// pure states. Two-qubit basis order is fixed globally as |ee>,|eg>,|ge>,|gg>
// (qubit a first, e before g); joint states are laid out qubit-a (x) qubit-b
// (x) field, index = pair*field_dim + photon.

namespace chargeq {

using Complex = std::complex<double>;

// validation tolerances shared across modules
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenvalueTol = 1e-10;
inline constexpr double kNormTol = 1e-10;

enum class Subsystem { a, b };

struct Spectrum {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXcd eigenvectors; // orthonormal columns, col(k) pairs with eigenvalues(k)
};

/// Eigendecomposition of a Hermitian matrix. Rejects inputs whose
/// Hermiticity deviation exceeds 1e-12; the reconstruction V diag(w) V^dag
/// is checked against the input to 1e-10.
Spectrum hermitian_eigensystem(const Eigen::MatrixXcd& m);

/// Normalized joint state of qubit-a (x) qubit-b (x) field.
class PureState {
 public:
  PureState(Eigen::VectorXcd amplitudes, int field_dim);

  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  int field_dim() const { return field_dim_; }
  int dim() const { return static_cast<int>(amps_.size()); }

  // amplitude of |pair> (x) |photon>, pair in {0:ee,1:eg,2:ge,3:gg}
  Complex amp(int pair, int photon) const { return amps_(pair * field_dim_ + photon); }

 private:
  Eigen::VectorXcd amps_;
  int field_dim_;
};

/// (a1|e>+b1|g>) (x) (a2|e>+b2|g>) (x) sum_n w_n|n>. The field weights are
/// normalized here so the result satisfies the PureState norm invariant for
/// any truncation.
PureState product_state(Complex a1, Complex b1, Complex a2, Complex b2,
                        const Eigen::VectorXd& field_weights, int field_dim);

/// Validated density matrix (dim 2 or 4): Hermitian to 1e-12, unit trace to
/// 1e-10, eigenvalues above -1e-10. Carries its validity diagnostics.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(Eigen::MatrixXcd m);

  const Eigen::MatrixXcd& entries() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  double trace_error() const { return trace_error_; }
  double hermiticity_error() const { return herm_error_; }
  double min_eigenvalue() const { return min_eig_; }

 private:
  DensityMatrix(Eigen::MatrixXcd m, double trace_err, double herm_err, double min_eig)
      : m_(std::move(m)), trace_error_(trace_err), herm_error_(herm_err), min_eig_(min_eig) {}

  Eigen::MatrixXcd m_;
  double trace_error_, herm_error_, min_eig_;
};

/// rho_ab = tr_f |psi><psi|. n_max is the declared photon cutoff; a mismatch
/// with the amplitude layout is rejected.
DensityMatrix partial_trace_field(const PureState& global, int n_max);
DensityMatrix partial_trace_field(const PureState& global);

/// 2x2 marginal of a two-qubit state.
DensityMatrix marginal(const DensityMatrix& rho, Subsystem which);

/// Partial transpose of one qubit. Output is Hermitian with unit trace but
/// may have negative eigenvalues, so it is returned as a plain matrix. The
/// matrix overload exists because the map applies to any 4x4 operator (it is
/// an involution there).
Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& m, Subsystem sub);
Eigen::MatrixXcd partial_transpose(const DensityMatrix& rho, Subsystem sub);

/// S(rho) = -tr rho log rho, in bits by default. Eigenvalues in [-1e-10, 0)
/// are treated as round-off and clamped; anything lower throws (a state that
/// negative is a propagation bug, not noise).
double von_neumann_entropy(const DensityMatrix& rho, double log_base = 2.0);

/// <N_exc> = sum of qubit excitations plus photon number; conserved by the
/// rotating-wave dynamics.
double total_excitation(const PureState& psi);

}  // namespace chargeq

#endif
