#include "chargeq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace chargeq {

namespace {

constexpr int kHardCap = 4096;

double poisson_log_pmf(int n, double nbar) {
  return -nbar + n * std::log(nbar) - std::lgamma(n + 1.0);
}

// slot -> photon offset within a manifold: ee carries n, eg/ge carry n+1,
// gg carries n+2
constexpr int kPhotonOffset[4] = {0, 1, 1, 2};

Complex pair_amplitude(const ModelParams& p, int slot) {
  switch (slot) {
    case 0: return p.a1 * p.a2;
    case 1: return p.a1 * p.b2;
    case 2: return p.b1 * p.a2;
    default: return p.b1 * p.b2;
  }
}

}  // namespace

void ModelParams::validate() const {
  const double n1 = std::norm(a1) + std::norm(b1);
  const double n2 = std::norm(a2) + std::norm(b2);
  if (std::abs(n1 - 1.0) > kNormTol || std::abs(n2 - 1.0) > kNormTol)
    throw std::invalid_argument("ModelParams: qubit amplitudes are not normalized");
  if (field.kind == FieldSpec::Kind::coherent && field.nbar < 0.0)
    throw std::invalid_argument("ModelParams: coherent nbar must be >= 0");
  if (field.kind == FieldSpec::Kind::fock && field.n < 0)
    throw std::invalid_argument("ModelParams: fock level must be >= 0");
  if (field.truncation_epsilon <= 0.0 || field.truncation_epsilon >= 1.0)
    throw std::invalid_argument("ModelParams: truncation epsilon must lie in (0,1)");
}

CoherentWeights coherent_weights(double nbar, double epsilon) {
  if (nbar < 0.0) throw std::invalid_argument("coherent_weights: nbar must be >= 0");
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw std::invalid_argument("coherent_weights: epsilon must lie in (0,1)");
  if (nbar == 0.0) return {0, Eigen::VectorXd::Ones(1)};

  // Beyond the mode the pmf decays at least geometrically with ratio
  // nbar/(n+2), so tail(n) <= pmf(n+1)/(1 - nbar/(n+2)). Cut where this
  // bound drops below epsilon^2 (dropped amplitude norm below epsilon).
  const double target = epsilon * epsilon;
  int n_max = std::max(0, static_cast<int>(nbar));
  for (;; ++n_max) {
    if (n_max > kHardCap)
      throw CutoffError("coherent_weights: epsilon not reachable below 4096 levels");
    if (n_max + 2 <= nbar) continue;
    const double bound =
        std::exp(poisson_log_pmf(n_max + 1, nbar)) / (1.0 - nbar / (n_max + 2));
    if (bound < target) break;
  }

  Eigen::VectorXd w(n_max + 1);
  for (int n = 0; n <= n_max; ++n) w(n) = std::exp(0.5 * poisson_log_pmf(n, nbar));
  return {n_max, std::move(w)};
}

Eigen::VectorXd field_weights(const FieldSpec& field) {
  if (field.kind == FieldSpec::Kind::fock) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(field.n + 1);
    w(field.n) = 1.0;
    return w;
  }
  Eigen::VectorXd w = coherent_weights(field.nbar, field.truncation_epsilon).w;
  w /= w.norm();
  return w;
}

ManifoldBlock build_block(int n, double delta) { return build_block(n, delta, -1); }

ManifoldBlock build_block(int n, double delta, int field_dim) {
  if (n < -2) throw std::invalid_argument("build_block: manifold index below -2");

  ManifoldBlock b;
  b.n = n;
  b.gamma = n + 1 >= 0 ? std::sqrt(n + 1.0) : 0.0;
  b.beta = std::sqrt(n + 2.0);

  const double diag[4] = {delta, 0.0, 0.0, -delta};
  for (int slot = 0; slot < 4; ++slot) {
    const int photon = n + kPhotonOffset[slot];
    if (photon < 0) continue;
    if (field_dim >= 0 && photon >= field_dim) continue;
    b.slots.push_back(slot);
    b.photons.push_back(photon);
  }

  const int d = b.dim();
  b.h = Eigen::MatrixXd::Zero(d, d);
  int pos[4] = {-1, -1, -1, -1};
  for (int k = 0; k < d; ++k) pos[b.slots[k]] = k;
  for (int k = 0; k < d; ++k) b.h(k, k) = diag[b.slots[k]];
  const auto couple = [&](int s1, int s2, double v) {
    if (pos[s1] >= 0 && pos[s2] >= 0) b.h(pos[s1], pos[s2]) = b.h(pos[s2], pos[s1]) = v;
  };
  couple(0, 1, b.gamma);
  couple(0, 2, b.gamma);
  couple(1, 3, b.beta);
  couple(2, 3, b.beta);

  if (d > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b.h);
    b.eigenvalues = solver.eigenvalues().reverse();
    b.eigenvectors = solver.eigenvectors().rowwise().reverse();
  }
  return b;
}

Eigen::MatrixXcd block_propagator(const ManifoldBlock& block, double tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("block_propagator: tau must be finite");
  const Eigen::VectorXcd phases =
      (Complex(0.0, -tau) * block.eigenvalues.cast<Complex>().array()).exp().matrix();
  return block.eigenvectors.cast<Complex>() * phases.asDiagonal() *
         block.eigenvectors.transpose().cast<Complex>();
}

ClosedFormFrequencies closed_form_frequencies(int n, double delta) {
  if (n < 0) throw std::invalid_argument("closed_form_frequencies: n must be >= 0");

  ClosedFormFrequencies f;
  const double beta2 = n + 2.0, gamma2 = n + 1.0;
  f.kappa = std::sqrt(3.0 * (delta * delta + 2.0 * (beta2 + gamma2)));
  f.arccos_argument = -27.0 * delta / (f.kappa * f.kappa * f.kappa);

  // |argument| <= 1 holds analytically (three real roots); round-off past
  // the edge is tolerated, anything more is reported through the flag
  // rather than thrown.
  f.argument_in_range = std::abs(f.arccos_argument) <= 1.0 + 1e-9;
  const double arg = std::clamp(f.arccos_argument, -1.0, 1.0);

  f.theta[0] = std::acos(arg) / 3.0;
  f.theta[1] = 2.0 * std::numbers::pi / 3.0 + f.theta[0];
  f.theta[2] = 2.0 * std::numbers::pi / 3.0 + f.theta[1];
  for (int i = 0; i < 3; ++i) f.mu[i] = (2.0 / 3.0) * f.kappa * std::cos(f.theta[i]);

  const double mu12 = f.mu[0] - f.mu[1];
  const double mu13 = f.mu[0] - f.mu[2];
  const double mu23 = f.mu[1] - f.mu[2];
  f.alpha[0] = 1.0 / (mu12 * mu13);
  f.alpha[1] = 1.0 / (mu12 * mu23);
  f.alpha[2] = 1.0 / (mu13 * mu23);

  const ManifoldBlock block = build_block(n, delta);
  f.max_mismatch = 0.0;
  for (double mu : f.mu) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < block.eigenvalues.size(); ++k)
      best = std::min(best, std::abs(mu - block.eigenvalues(k)));
    f.max_mismatch = std::max(f.max_mismatch, best);
  }
  f.matches_block_spectrum = f.argument_in_range && f.max_mismatch < 1e-8;
  return f;
}

ManifoldPropagator::ManifoldPropagator(const ModelParams& params) {
  params.validate();
  weights_ = field_weights(params.field);
  field_dim_ = static_cast<int>(weights_.size()) + 2;
  build(params);
}

ManifoldPropagator::ManifoldPropagator(const ModelParams& params, int field_dim) {
  params.validate();
  if (field_dim < 1) throw std::invalid_argument("ManifoldPropagator: field_dim must be >= 1");
  weights_ = field_weights(params.field);
  field_dim_ = field_dim;

  // Initial amplitude on the top two retained levels (or dropped entirely)
  // cannot exceed the truncation budget; block truncation would otherwise
  // bite into the dynamics.
  double outside = 0.0;
  for (int n = 0; n < weights_.size(); ++n)
    if (n >= field_dim_ - 2) outside += weights_(n) * weights_(n);
  if (std::sqrt(outside) > params.field.truncation_epsilon)
    throw CutoffError(
        "ManifoldPropagator: initial field support touches the top of the cutoff; "
        "increase n_max (field_dim) by at least 2");
  if (weights_.size() > field_dim_) weights_ = weights_.head(field_dim_).eval();
  build(params);
}

void ManifoldPropagator::build(const ModelParams& params) {
  weights_ /= weights_.norm();
  const int n_w = static_cast<int>(weights_.size()) - 1;
  const auto weight_at = [&](int k) { return (k >= 0 && k <= n_w) ? weights_(k) : 0.0; };

  for (int m = -2; m < field_dim_; ++m) {
    ManifoldBlock block = build_block(m, params.delta, field_dim_);
    if (block.dim() == 0) continue;

    Eigen::VectorXcd v0(block.dim());
    double mass = 0.0;
    for (int k = 0; k < block.dim(); ++k) {
      v0(k) = pair_amplitude(params, block.slots[k]) * weight_at(block.photons[k]);
      mass += std::norm(v0(k));
    }
    if (mass == 0.0) continue;

    BlockData data;
    data.slots = std::move(block.slots);
    data.photons = std::move(block.photons);
    data.v = std::move(block.eigenvectors);
    data.lambda = std::move(block.eigenvalues);
    data.c0 = data.v.transpose().cast<Complex>() * v0;
    blocks_.push_back(std::move(data));
  }
}

PureState ManifoldPropagator::state_at(double tau) const {
  if (!std::isfinite(tau)) throw std::invalid_argument("state_at: tau must be finite");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4 * field_dim_);
  for (const auto& b : blocks_) {
    const Eigen::VectorXcd phased =
        ((Complex(0.0, -tau) * b.lambda.cast<Complex>().array()).exp() * b.c0.array()).matrix();
    const Eigen::VectorXcd vt = b.v.cast<Complex>() * phased;
    // every (slot, photon) pair belongs to exactly one manifold
    for (int k = 0; k < vt.size(); ++k) amps(b.slots[k] * field_dim_ + b.photons[k]) = vt(k);
  }
  return PureState(std::move(amps), field_dim_);
}

PureState propagate(const ModelParams& params, double tau) {
  return ManifoldPropagator(params).state_at(tau);
}

std::vector<DensityMatrix> reduced_density_series(const ModelParams& params,
                                                  std::span<const double> tau_grid) {
  for (size_t i = 0; i + 1 < tau_grid.size(); ++i)
    if (!(tau_grid[i] < tau_grid[i + 1]))
      throw std::invalid_argument("reduced_density_series: tau grid must be ascending");

  const ManifoldPropagator engine(params);
  const int count = static_cast<int>(tau_grid.size());
  std::vector<std::optional<DensityMatrix>> slots(tau_grid.size());
  std::exception_ptr failure;  // exceptions may not escape the parallel region
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    try {
      slots[static_cast<size_t>(i)] = partial_trace_field(engine.state_at(tau_grid[i]));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<DensityMatrix> out;
  out.reserve(tau_grid.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace chargeq
