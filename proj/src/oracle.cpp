#include "chargeq/oracle.hpp"

#include <cmath>
#include <optional>

namespace chargeq::oracle {

DenseHamiltonian build_full_hamiltonian(double delta, int n_max) {
  if (n_max < 0) throw std::invalid_argument("build_full_hamiltonian: n_max must be >= 0");
  if (n_max > 4096) throw std::invalid_argument("build_full_hamiltonian: n_max above memory guard");

  const int fd = n_max + 1;
  const int dim = 4 * fd;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const auto idx = [fd](int pair, int n) { return pair * fd + n; };

  // sigma_z sum over both qubits: pair {ee,eg,ge,gg} -> {+2, 0, 0, -2}
  const double zsum[4] = {2.0, 0.0, 0.0, -2.0};
  for (int q = 0; q < 4; ++q)
    for (int n = 0; n < fd; ++n) h(idx(q, n), idx(q, n)) = 0.5 * delta * zsum[q];

  // psi^dag sigma_-^(j) + h.c.; pair transitions under sigma_- with
  // pair = 2*qa + qb, 0 = e: qubit a lowers 0->2, 1->3; qubit b lowers
  // 0->1, 2->3. Photon gains one with sqrt(n+1).
  const int lowering[4][2] = {{0, 2}, {1, 3}, {0, 1}, {2, 3}};
  for (const auto& t : lowering)
    for (int n = 0; n + 1 < fd; ++n) {
      const double amp = std::sqrt(n + 1.0);
      h(idx(t[1], n + 1), idx(t[0], n)) += amp;
      h(idx(t[0], n), idx(t[1], n + 1)) += amp;
    }

  return {std::move(h), n_max, delta};
}

DenseEvolution::DenseEvolution(const DenseHamiltonian& h, const PureState& psi0)
    : field_dim_(h.n_max + 1) {
  if (psi0.dim() != h.h.rows())
    throw std::invalid_argument("DenseEvolution: state dimension does not match Hamiltonian");
  Spectrum s = hermitian_eigensystem(h.h);
  lambda_ = std::move(s.eigenvalues);
  v_ = std::move(s.eigenvectors);
  c0_ = v_.adjoint() * psi0.amplitudes();
}

PureState DenseEvolution::state_at(double tau) const {
  const Eigen::VectorXcd phased =
      ((Complex(0.0, -tau) * lambda_.cast<Complex>().array()).exp() * c0_.array()).matrix();
  return PureState(v_ * phased, field_dim_);
}

PureState evolve_dense(const DenseHamiltonian& h, const PureState& psi0, double tau) {
  return DenseEvolution(h, psi0).state_at(tau);
}

DeviationReport deviation_report(const ModelParams& params, std::span<const double> tau_grid) {
  params.validate();

  const ManifoldPropagator manifold(params);
  DeviationReport report;
  report.dynamics_field_dim = manifold.field_dim();
  report.oracle_field_dim = manifold.field_dim() + 2;

  const DenseHamiltonian h = build_full_hamiltonian(params.delta, report.oracle_field_dim - 1);
  const PureState psi0 = product_state(params.a1, params.b1, params.a2, params.b2,
                                       manifold.weights(), report.oracle_field_dim);
  const DenseEvolution dense(h, psi0);

  const int count = static_cast<int>(tau_grid.size());
  std::vector<double> deviation(tau_grid.size(), 0.0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      const auto rho_m = partial_trace_field(manifold.state_at(tau_grid[i]));
      const auto rho_o = partial_trace_field(dense.state_at(tau_grid[i]));
      deviation[static_cast<size_t>(i)] =
          (rho_m.entries() - rho_o.entries()).cwiseAbs().maxCoeff();
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (int i = 0; i < count; ++i)
    if (deviation[static_cast<size_t>(i)] > report.max_deviation) {
      report.max_deviation = deviation[static_cast<size_t>(i)];
      report.argmax_tau = tau_grid[static_cast<size_t>(i)];
    }
  report.pass = report.max_deviation < 1e-8;
  report.convention_mismatch = report.max_deviation > 1e-4;
  return report;
}

}  // namespace chargeq::oracle
