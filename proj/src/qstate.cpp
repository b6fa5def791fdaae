#include "chargeq/qstate.hpp"

#include <cmath>

namespace chargeq {

Spectrum hermitian_eigensystem(const Eigen::MatrixXcd& m) {
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol)
    throw std::invalid_argument("hermitian_eigensystem: input is not Hermitian (deviation " +
                                std::to_string(herm) + ")");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigensystem: eigensolver failed");

  Spectrum s;
  s.eigenvalues = solver.eigenvalues().reverse();
  s.eigenvectors = solver.eigenvectors().rowwise().reverse();

  Eigen::MatrixXcd rebuilt =
      s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
  if ((rebuilt - m).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw std::runtime_error("hermitian_eigensystem: reconstruction check failed");
  return s;
}

PureState::PureState(Eigen::VectorXcd amplitudes, int field_dim)
    : amps_(std::move(amplitudes)), field_dim_(field_dim) {
  if (field_dim_ <= 0 || amps_.size() != 4 * static_cast<long>(field_dim_))
    throw std::invalid_argument("PureState: amplitude length does not match 4*field_dim layout");
  const double n2 = amps_.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTol)
    throw std::invalid_argument("PureState: squared norm deviates from 1 by " +
                                std::to_string(n2 - 1.0));
}

PureState product_state(Complex a1, Complex b1, Complex a2, Complex b2,
                        const Eigen::VectorXd& field_weights, int field_dim) {
  if (field_weights.size() == 0 || field_weights.size() > field_dim)
    throw std::invalid_argument("product_state: field weights exceed field_dim");
  Eigen::VectorXd w = field_weights / field_weights.norm();

  const Complex pair_amp[4] = {a1 * a2, a1 * b2, b1 * a2, b1 * b2};
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4 * field_dim);
  for (int q = 0; q < 4; ++q)
    for (int n = 0; n < w.size(); ++n) amps(q * field_dim + n) = pair_amp[q] * w(n);
  return PureState(std::move(amps), field_dim);
}

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd m) {
  const int d = static_cast<int>(m.rows());
  if ((d != 2 && d != 4) || m.cols() != d)
    throw std::invalid_argument("DensityMatrix: expected a 2x2 or 4x4 matrix");

  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol)
    throw std::invalid_argument("DensityMatrix: Hermiticity deviation " + std::to_string(herm));

  const double trace_err = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_err > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " +
                                std::to_string(trace_err));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -kEigenvalueTol)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));

  return DensityMatrix(std::move(m), trace_err, herm, min_eig);
}

DensityMatrix partial_trace_field(const PureState& global, int n_max) {
  if (4 * (n_max + 1) != global.dim())
    throw std::invalid_argument(
        "partial_trace_field: declared cutoff does not match amplitude layout");
  return partial_trace_field(global);
}

DensityMatrix partial_trace_field(const PureState& global) {
  const int fd = global.field_dim();
  // rho[q,q'] = sum_n psi(q,n) conj(psi(q',n))
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      global.amplitudes().data(), 4, fd);
  Eigen::Matrix4cd rho = m * m.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();  // symmetrize round-off from the product
  return DensityMatrix::from_matrix(rho);
}

DensityMatrix marginal(const DensityMatrix& rho, Subsystem which) {
  if (rho.dim() != 4) throw std::invalid_argument("marginal: expected a 4x4 density matrix");
  const auto& r = rho.entries();
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  // pair index = 2*qa + qb
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        if (which == Subsystem::a)
          out(i, j) += r(2 * i + k, 2 * j + k);
        else
          out(i, j) += r(2 * k + i, 2 * k + j);
      }
  return DensityMatrix::from_matrix(out);
}

Eigen::MatrixXcd partial_transpose(const DensityMatrix& rho, Subsystem sub) {
  if (rho.dim() != 4)
    throw std::invalid_argument("partial_transpose: expected a 4x4 density matrix");
  return partial_transpose(rho.entries(), sub);
}

Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& m, Subsystem sub) {
  if (m.rows() != 4 || m.cols() != 4)
    throw std::invalid_argument("partial_transpose: expected a 4x4 matrix");
  const auto& r = m;
  Eigen::Matrix4cd out;
  for (int ia = 0; ia < 2; ++ia)
    for (int ib = 0; ib < 2; ++ib)
      for (int ja = 0; ja < 2; ++ja)
        for (int jb = 0; jb < 2; ++jb) {
          if (sub == Subsystem::b)
            out(2 * ia + ib, 2 * ja + jb) = r(2 * ia + jb, 2 * ja + ib);
          else
            out(2 * ia + ib, 2 * ja + jb) = r(2 * ja + ib, 2 * ia + jb);
        }
  return out;
}

double von_neumann_entropy(const DensityMatrix& rho, double log_base) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries(), Eigen::EigenvaluesOnly);
  const double inv_log = 1.0 / std::log(log_base);
  double s = 0.0;
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    double p = solver.eigenvalues()(i);
    if (p < -kEigenvalueTol)
      throw std::runtime_error("von_neumann_entropy: eigenvalue " + std::to_string(p) +
                               " below round-off band, state is corrupted");
    if (p <= 0.0) continue;  // 0 log 0 = 0, [-1e-10,0) clamped
    s -= p * std::log(p) * inv_log;
  }
  return std::max(s, 0.0);
}

double total_excitation(const PureState& psi) {
  const int fd = psi.field_dim();
  static constexpr int kQubitExc[4] = {2, 1, 1, 0};  // ee, eg, ge, gg
  double total = 0.0;
  for (int q = 0; q < 4; ++q)
    for (int n = 0; n < fd; ++n) total += std::norm(psi.amp(q, n)) * (kQubitExc[q] + n);
  return total;
}

}  // namespace chargeq
