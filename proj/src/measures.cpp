#include "chargeq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

namespace chargeq {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Shannon entropy (bits) of the dephased populations; tiny negatives from
// round-off are treated as zero.
double shannon4(const Eigen::Vector4d& p) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double q = p(i);
    if (q > 0.0) s -= q * std::log2(q);
  }
  return std::max(s, 0.0);
}

Eigen::Matrix2cd basis_unitary(double theta, double phi) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const Complex e_plus = std::polar(1.0, phi), e_minus = std::polar(1.0, -phi);
  Eigen::Matrix2cd u;
  u << Complex(c, 0.0), -e_minus * s, e_plus * s, Complex(c, 0.0);
  return u;
}

// Populations of rho in the product basis U(ta,pa) (x) U(tb,pb).
Eigen::Vector4d dephased_populations(const Eigen::Matrix4cd& rho, double ta, double pa,
                                     double tb, double pb) {
  const Eigen::Matrix2cd ua = basis_unitary(ta, pa);
  const Eigen::Matrix2cd ub = basis_unitary(tb, pb);
  Eigen::Vector4d p;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Complex acc(0.0, 0.0);
      for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap)
          for (int b = 0; b < 2; ++b)
            for (int bp = 0; bp < 2; ++bp)
              acc += std::conj(ua(a, i)) * std::conj(ub(b, j)) * rho(2 * a + b, 2 * ap + bp) *
                     ua(ap, i) * ub(bp, j);
      p(2 * i + j) = acc.real();
    }
  return p;
}

double dephased_entropy(const Eigen::Matrix4cd& rho, const double* angles) {
  return shannon4(dephased_populations(rho, angles[0], angles[1], angles[2], angles[3]));
}

// Bloch angles of a single-qubit state vector (up to the irrelevant global
// phase): v = cos(t/2)|e> + e^{i p} sin(t/2)|g>.
MeasurementBasis bloch_angles(const Eigen::Vector2cd& v) {
  MeasurementBasis b;
  b.theta = 2.0 * std::atan2(std::abs(v(1)), std::abs(v(0)));
  b.phi = std::arg(v(1)) - std::arg(v(0));
  if (b.phi < 0.0) b.phi += 2.0 * std::numbers::pi;
  return b;
}

MeasurementBasis normalized_basis(double theta, double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  theta = std::fmod(theta, two_pi);
  if (theta < 0.0) theta += two_pi;
  if (theta > std::numbers::pi) {  // reflect: same projector pair
    theta = two_pi - theta;
    phi += std::numbers::pi;
  }
  phi = std::fmod(phi, two_pi);
  if (phi < 0.0) phi += two_pi;
  return {theta, phi};
}

struct NelderMeadResult {
  std::array<double, 4> x{};
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Standard Nelder-Mead on 4 unconstrained angle coordinates. Evaluation
// counting is shared with the caller through `evals`/`budget`.
template <typename F>
NelderMeadResult nelder_mead(F&& f, const std::array<double, 4>& x0, double step, double tol,
                             int budget, int& evals) {
  constexpr int kDim = 4;
  struct Vertex {
    std::array<double, 4> x;
    double value;
  };
  std::array<Vertex, kDim + 1> simplex;

  const auto eval = [&](const std::array<double, 4>& x) {
    ++evals;
    return f(x.data());
  };

  simplex[0] = {x0, eval(x0)};
  for (int i = 0; i < kDim; ++i) {
    auto x = x0;
    x[static_cast<size_t>(i)] += step;
    simplex[static_cast<size_t>(i) + 1] = {x, eval(x)};
  }

  NelderMeadResult result;
  for (int iter = 0; iter < 500; ++iter) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    if (simplex[kDim].value - simplex[0].value < tol) {
      result.converged = true;
      break;
    }
    if (evals >= budget) break;

    std::array<double, 4> centroid{};
    for (int i = 0; i < kDim; ++i)
      for (int d = 0; d < kDim; ++d)
        centroid[static_cast<size_t>(d)] += simplex[static_cast<size_t>(i)].x[static_cast<size_t>(d)] / kDim;

    const auto blend = [&](double coeff) {
      std::array<double, 4> x;
      for (int d = 0; d < kDim; ++d)
        x[static_cast<size_t>(d)] = centroid[static_cast<size_t>(d)] +
                                    coeff * (simplex[kDim].x[static_cast<size_t>(d)] -
                                             centroid[static_cast<size_t>(d)]);
      return x;
    };

    const auto reflected = blend(-1.0);
    const double fr = eval(reflected);
    if (fr < simplex[0].value) {
      const auto expanded = blend(-2.0);
      const double fe = eval(expanded);
      simplex[kDim] = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
    } else if (fr < simplex[kDim - 1].value) {
      simplex[kDim] = {reflected, fr};
    } else {
      const auto contracted = blend(0.5);
      const double fc = eval(contracted);
      if (fc < simplex[kDim].value) {
        simplex[kDim] = {contracted, fc};
      } else {  // shrink toward the best vertex
        for (int i = 1; i <= kDim; ++i) {
          auto& v = simplex[static_cast<size_t>(i)];
          for (int d = 0; d < kDim; ++d)
            v.x[static_cast<size_t>(d)] =
                0.5 * (v.x[static_cast<size_t>(d)] + simplex[0].x[static_cast<size_t>(d)]);
          v.value = eval(v.x);
        }
      }
    }
  }

  std::sort(simplex.begin(), simplex.end(),
            [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
  result.x = simplex[0].x;
  result.value = simplex[0].value;
  return result;
}

}  // namespace

Eigen::Matrix2cd MeasurementBasis::unitary() const { return basis_unitary(theta, phi); }

double total_correlation(const DensityMatrix& rho) {
  return von_neumann_entropy(marginal(rho, Subsystem::a)) +
         von_neumann_entropy(marginal(rho, Subsystem::b)) - von_neumann_entropy(rho);
}

double negativity(const DensityMatrix& rho) {
  const Eigen::MatrixXcd pt = partial_transpose(rho, Subsystem::b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(pt, Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double lambda = solver.eigenvalues()(i);
    if (lambda < 0.0 && lambda > -kEigenvalueTol) lambda = 0.0;
    sum += std::abs(lambda);
  }
  return std::max(sum - 1.0, 0.0);
}

double classical_correlation(const DensityMatrix& rho) {
  return total_correlation(rho) - negativity(rho);
}

double local_information(const DensityMatrix& rho) {
  return 2.0 - von_neumann_entropy(marginal(rho, Subsystem::a)) -
         von_neumann_entropy(marginal(rho, Subsystem::b));
}

DensityMatrix dephase(const DensityMatrix& rho, const MeasurementBasis& basis_a,
                      const MeasurementBasis& basis_b) {
  if (rho.dim() != 4) throw std::invalid_argument("dephase: expected a 4x4 density matrix");
  const Eigen::Matrix2cd ua = basis_a.unitary(), ub = basis_b.unitary();
  Eigen::Matrix4cd m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(2 * a + b, 2 * i + j) = ua(a, i) * ub(b, j);
  const Eigen::Vector4cd populations = (m.adjoint() * rho.entries() * m).diagonal();
  Eigen::Matrix4cd out = m * populations.real().cast<Complex>().asDiagonal() * m.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix::from_matrix(out);
}

LocalizableInfo localizable_information(const DensityMatrix& rho, const OptimizerConfig& opt) {
  if (rho.dim() != 4)
    throw std::invalid_argument("localizable_information: expected a 4x4 density matrix");
  const Eigen::Matrix4cd r = rho.entries();

  int evals = 0;
  const auto objective = [&r](const double* angles) { return dephased_entropy(r, angles); };

  // 8x8 coarse grid over (theta_a, theta_b) at phi = 0 seeds the starts
  struct Seed {
    std::array<double, 4> x;
    double value;
  };
  std::vector<Seed> seeds;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      std::array<double, 4> x{(i + 0.5) * std::numbers::pi / 8.0, 0.0,
                              (j + 0.5) * std::numbers::pi / 8.0, 0.0};
      ++evals;
      seeds.push_back({x, objective(x.data())});
    }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.value < b.value; });

  std::vector<std::array<double, 4>> starts;
  for (int i = 0; i < std::min<int>(opt.grid_starts, static_cast<int>(seeds.size())); ++i)
    starts.push_back(seeds[static_cast<size_t>(i)].x);

  // the phi = 0 slice alone misses basins once the state carries complex
  // phases, so a 7-axis product set (octahedron poles + cube diagonals on
  // each Bloch sphere) seeds the rest of the angle space; best 8 pairs join
  // the start list
  {
    const double diag_theta = std::acos(1.0 / std::sqrt(3.0));
    const std::array<std::pair<double, double>, 7> axes{{
        {0.0, 0.0},
        {0.5 * std::numbers::pi, 0.0},
        {0.5 * std::numbers::pi, 0.5 * std::numbers::pi},
        {diag_theta, 0.25 * std::numbers::pi},
        {diag_theta, 0.75 * std::numbers::pi},
        {diag_theta, 1.25 * std::numbers::pi},
        {diag_theta, 1.75 * std::numbers::pi},
    }};
    std::vector<Seed> axis_seeds;
    for (const auto& [ta, pa] : axes)
      for (const auto& [tb, pb] : axes) {
        std::array<double, 4> x{ta, pa, tb, pb};
        ++evals;
        axis_seeds.push_back({x, objective(x.data())});
      }
    std::sort(axis_seeds.begin(), axis_seeds.end(),
              [](const Seed& a, const Seed& b) { return a.value < b.value; });
    for (size_t i = 0; i < std::min<size_t>(8, axis_seeds.size()); ++i)
      starts.push_back(axis_seeds[i].x);
  }

  // marginal eigenbases: feasible point that already achieves I_Lo, which
  // pins the lower bound I_loz >= I_Lo
  {
    const auto ea = hermitian_eigensystem(marginal(rho, Subsystem::a).entries());
    const auto eb = hermitian_eigensystem(marginal(rho, Subsystem::b).entries());
    const MeasurementBasis ba = bloch_angles(ea.eigenvectors.col(0));
    const MeasurementBasis bb = bloch_angles(eb.eigenvectors.col(0));
    starts.push_back({ba.theta, ba.phi, bb.theta, bb.phi});
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < opt.random_starts; ++i)
    starts.push_back({u01(rng) * std::numbers::pi, u01(rng) * 2.0 * std::numbers::pi,
                      u01(rng) * std::numbers::pi, u01(rng) * 2.0 * std::numbers::pi});

  LocalizableInfo best;
  best.min_entropy = seeds.front().value;
  best.basis_a = normalized_basis(seeds.front().x[0], seeds.front().x[1]);
  best.basis_b = normalized_basis(seeds.front().x[2], seeds.front().x[3]);

  bool all_converged = true;
  for (const auto& start : starts) {
    // the start itself is a candidate, so every seeded basis (in particular
    // the marginal eigenbases) bounds the result even under a tight cap
    ++evals;
    const double at_start = objective(start.data());
    if (at_start < best.min_entropy) {
      best.min_entropy = at_start;
      best.basis_a = normalized_basis(start[0], start[1]);
      best.basis_b = normalized_basis(start[2], start[3]);
    }
    if (evals >= opt.max_evaluations) {
      all_converged = false;
      break;
    }
    const auto run = nelder_mead(objective, start, 0.35, opt.entropy_tolerance,
                                 opt.max_evaluations, evals);
    all_converged = all_converged && run.converged;
    if (run.value < best.min_entropy) {
      best.min_entropy = run.value;
      best.basis_a = normalized_basis(run.x[0], run.x[1]);
      best.basis_b = normalized_basis(run.x[2], run.x[3]);
    }
  }

  // polish pass with a tight simplex around the winner
  if (evals < opt.max_evaluations) {
    const std::array<double, 4> winner{best.basis_a.theta, best.basis_a.phi, best.basis_b.theta,
                                       best.basis_b.phi};
    const auto run = nelder_mead(objective, winner, 0.05, 0.1 * opt.entropy_tolerance,
                                 opt.max_evaluations, evals);
    if (run.value < best.min_entropy) {
      best.min_entropy = run.value;
      best.basis_a = normalized_basis(run.x[0], run.x[1]);
      best.basis_b = normalized_basis(run.x[2], run.x[3]);
    }
  }

  best.value = 2.0 - best.min_entropy;
  best.evaluations = evals;
  best.converged = all_converged;
  return best;
}

double quantum_deficit(const DensityMatrix& rho, const OptimizerConfig& opt) {
  return localizable_information(rho, opt).min_entropy - von_neumann_entropy(rho);
}

double classical_deficit(const DensityMatrix& rho, const OptimizerConfig& opt) {
  return localizable_information(rho, opt).value - local_information(rho);
}

CorrelationRecord evaluate_all(const DensityMatrix& rho, double tau, const OptimizerConfig& opt) {
  CorrelationRecord rec;
  rec.tau = tau;
  rec.trace_error = rho.trace_error();
  rec.min_eigenvalue = rho.min_eigenvalue();

  const auto guard = [&rec](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      if (rec.ok) rec.note = std::string(what) + ": " + e.what();
      rec.ok = false;
    }
  };

  rec.S_ab = rec.S_a = rec.S_b = kNan;
  rec.T_c = rec.Q_c = rec.C_c = rec.I_Lo = rec.I_loz = rec.Q_def = rec.C_def = kNan;

  guard("entropies", [&] {
    rec.S_ab = von_neumann_entropy(rho);
    rec.S_a = von_neumann_entropy(marginal(rho, Subsystem::a));
    rec.S_b = von_neumann_entropy(marginal(rho, Subsystem::b));
    rec.T_c = rec.S_a + rec.S_b - rec.S_ab;
    rec.I_Lo = 2.0 - rec.S_a - rec.S_b;
  });
  guard("negativity", [&] {
    rec.Q_c = negativity(rho);
    rec.C_c = rec.T_c - rec.Q_c;
  });
  guard("deficits", [&] {
    const LocalizableInfo loc = localizable_information(rho, opt);
    rec.I_loz = loc.value;
    rec.Q_def = loc.min_entropy - rec.S_ab;
    rec.C_def = loc.value - rec.I_Lo;
    rec.optimizer_evals = loc.evaluations;
    rec.optimizer_converged = loc.converged;
  });
  return rec;
}

std::vector<CorrelationRecord> evaluate_series(const std::vector<DensityMatrix>& rhos,
                                               std::span<const double> taus,
                                               const OptimizerConfig& opt,
                                               bool with_correlations, bool with_deficits) {
  if (rhos.size() != taus.size())
    throw std::invalid_argument("evaluate_series: grid and state counts differ");

  std::vector<CorrelationRecord> out(rhos.size());
  const int count = static_cast<int>(rhos.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    const auto k = static_cast<size_t>(i);
    if (with_deficits) {
      out[k] = evaluate_all(rhos[k], taus[k], opt);
    } else {
      // skip the optimizer; entropic and negativity parts only
      CorrelationRecord rec = [&] {
        CorrelationRecord r;
        r.tau = taus[k];
        r.trace_error = rhos[k].trace_error();
        r.min_eigenvalue = rhos[k].min_eigenvalue();
        r.S_ab = von_neumann_entropy(rhos[k]);
        r.S_a = von_neumann_entropy(marginal(rhos[k], Subsystem::a));
        r.S_b = von_neumann_entropy(marginal(rhos[k], Subsystem::b));
        r.T_c = r.S_a + r.S_b - r.S_ab;
        r.Q_c = negativity(rhos[k]);
        r.C_c = r.T_c - r.Q_c;
        r.I_Lo = 2.0 - r.S_a - r.S_b;
        r.I_loz = r.Q_def = r.C_def = kNan;
        return r;
      }();
      out[k] = rec;
    }
    if (!with_correlations) {
      out[k].T_c = out[k].Q_c = out[k].C_c = kNan;
    }
  }
  return out;
}

}  // namespace chargeq
