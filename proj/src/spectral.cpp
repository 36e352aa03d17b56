#include "ilat/spectral.hpp"

#include "ilat/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace ilat {

namespace {

// Below this norm a new Krylov direction is treated as an invariant-subspace
// breakdown.
constexpr double kBreakdown = 1e-12;

Vec random_vector(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx{gauss(rng), gauss(rng)};
  return v;
}

// Two passes of classical Gram-Schmidt against the first `cols` columns.
Vec orthogonalize(const Mat& basis, Eigen::Index cols, Vec w, Vec* coefficients = nullptr) {
  if (cols == 0) return w;
  Vec h = basis.leftCols(cols).adjoint() * w;
  w -= basis.leftCols(cols) * h;
  const Vec h2 = basis.leftCols(cols).adjoint() * w;
  w -= basis.leftCols(cols) * h2;
  if (coefficients) *coefficients = h + h2;
  return w;
}

}  // namespace

EigenResult lanczos_lowest(const BasisPtr& basis, const MatVec& apply, const LanczosOptions& options) {
  const auto n = static_cast<Eigen::Index>(basis->dim());
  const Eigen::Index k = options.count;
  if (k < 1 || k > n) {
    throw SizeError("requested " + std::to_string(k) + " eigenpairs from a space of dimension " +
                    std::to_string(n));
  }
  Eigen::Index m = options.krylov_dim > 0 ? options.krylov_dim : std::max<Eigen::Index>(2 * k + 20, 40);
  m = std::clamp<Eigen::Index>(m, std::min<Eigen::Index>(k + 1, n), n);
  const Eigen::Index keep = std::min<Eigen::Index>(m - 1, std::max<Eigen::Index>(k, (m + k) / 2));

  std::mt19937_64 rng(options.seed);
  Mat v = Mat::Zero(n, m + 1);
  Mat t = Mat::Zero(m, m);  // upper triangle holds the projected operator
  v.col(0) = random_vector(static_cast<std::size_t>(n), rng).normalized();

  Eigen::Index start = 0;
  double best = std::numeric_limits<double>::infinity();
  Vec w(n);
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    double beta = 0.0;
    for (Eigen::Index j = start; j < m; ++j) {
      apply(v.col(j), w);
      Vec h;
      w = orthogonalize(v, j + 1, w, &h);
      t.col(j).head(j + 1) = h;
      t(j, j) = h[j].real();
      beta = w.norm();
      if (beta < kBreakdown) {
        beta = 0.0;
        if (j + 1 < m) {
          // Invariant subspace found early; continue with a fresh direction.
          Vec fresh = orthogonalize(v, j + 1, random_vector(static_cast<std::size_t>(n), rng));
          v.col(j + 1) = fresh.normalized();
        } else {
          v.col(m).setZero();
        }
        continue;
      }
      v.col(j + 1) = w / beta;
    }

    const Mat projected = t.selfadjointView<Eigen::Upper>();
    Eigen::SelfAdjointEigenSolver<Mat> solver(projected);
    const Eigen::VectorXd& theta = solver.eigenvalues();
    const Mat& y = solver.eigenvectors();

    double worst = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) worst = std::max(worst, std::abs(beta * y(m - 1, i)));

    if (worst < options.tol || m == n) {
      EigenResult result;
      bool accepted = true;
      for (Eigen::Index i = 0; i < k; ++i) {
        Vec x = (v.leftCols(m) * y.col(i)).normalized();
        apply(x, w);
        const double energy = x.dot(w).real();
        const double residual = (w - energy * x).norm();
        if (residual >= options.tol) accepted = false;
        best = std::min(best, residual);
        result.energies.push_back(energy);
        result.residuals.push_back(residual);
        result.states.emplace_back(basis, std::move(x));
      }
      if (accepted || m == n) return result;
    }
    best = std::min(best, worst);

    // Thick restart: keep the lowest Ritz vectors and the residual direction.
    const Mat kept = v.leftCols(m) * y.leftCols(keep);
    const Vec residual_dir = v.col(m);
    v.leftCols(keep) = kept;
    v.col(keep) = residual_dir;
    t.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) t(i, i) = theta[i];
    start = keep;
    if (beta == 0.0) {
      Vec fresh = orthogonalize(v, keep, random_vector(static_cast<std::size_t>(n), rng));
      v.col(keep) = fresh.normalized();
    }
  }
  throw ConvergenceError("Lanczos did not converge within " + std::to_string(options.max_restarts) +
                             " restarts (best residual " + std::to_string(best) + ")",
                         best);
}

EigenResult lanczos_lowest(const SparseOperator& h, const LanczosOptions& options) {
  return lanczos_lowest(h.basis_ptr(), [&](const Vec& in, Vec& out) { out = h.matrix() * in; }, options);
}

EigenResult excited_by_deflation(const SparseOperator& h, std::span<const StateVector> known,
                                 double shift, const LanczosOptions& options) {
  if (known.empty()) return lanczos_lowest(h, options);
  for (const auto& s : known) {
    if (!(s.basis() == h.basis())) throw ShapeMismatchError("deflation state lives in another basis");
  }
  auto apply = [&](const Vec& in, Vec& out) {
    out = h.matrix() * in;
    for (const auto& s : known) out += shift * s.amplitudes() * s.amplitudes().dot(in);
  };
  EigenResult raw = lanczos_lowest(h.basis_ptr(), apply, options);

  EigenResult result;
  for (std::size_t i = 0; i < raw.states.size(); ++i) {
    Vec x = raw.states[i].amplitudes();
    for (const auto& s : known) {
      const double leak = std::norm(s.amplitudes().dot(x));
      if (leak > 1e-4) {
        throw DeflationLeakError("deflated state overlaps a known state by " + std::to_string(leak) +
                                     "; increase the shift",
                                 leak);
      }
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& s : known) x -= s.amplitudes() * s.amplitudes().dot(x);
    }
    StateVector state(h.basis_ptr(), std::move(x));
    const Vec hx = h.apply(state.amplitudes());
    const double energy = state.amplitudes().dot(hx).real();
    result.energies.push_back(energy);
    result.residuals.push_back((hx - energy * state.amplitudes()).norm());
    result.states.push_back(std::move(state));
  }
  return result;
}

double default_deflation_shift(const ModelParams& params) {
  return 10.0 * params.electric_scale() * params.sites;
}

EigenResult lowest_levels_by_deflation(const SparseOperator& h, int levels, double shift,
                                       const LanczosOptions& options) {
  if (levels < 1 || static_cast<std::size_t>(levels) > h.dim()) {
    throw SizeError("cannot extract " + std::to_string(levels) + " levels from dimension " +
                    std::to_string(h.dim()));
  }
  LanczosOptions single = options;
  single.count = 1;
  EigenResult spectrum;
  for (int level = 0; level < levels; ++level) {
    EigenResult next = excited_by_deflation(h, spectrum.states, shift, single);
    spectrum.energies.push_back(next.energies.front());
    spectrum.residuals.push_back(next.residuals.front());
    spectrum.states.push_back(std::move(next.states.front()));
  }
  return spectrum;
}

StrongCouplingStates strong_coupling_states(const BasisPtr& basis) {
  const int n = basis->sites();
  if (n < 3) throw SizeError("strong-coupling meson states need at least 3 sites");
  StateVector vacuum = neel_state(basis);
  const Ket omega = vacuum.ket();
  Vec vector_amps = Vec::Zero(omega.amplitudes.size());
  Vec scalar_amps = Vec::Zero(omega.amplitudes.size());
  for (int link = 1; link < n; ++link) {
    const PauliOp forward[] = {{link + 1, Pauli::plus}, {link, Pauli::minus}};
    const PauliOp backward[] = {{link, Pauli::plus}, {link + 1, Pauli::minus}};
    const Vec f = apply_pauli_string(omega, forward).amplitudes;
    const Vec b = apply_pauli_string(omega, backward).amplitudes;
    vector_amps += f - b;
    scalar_amps += f + b;
  }
  return {std::move(vacuum), StateVector(basis, std::move(vector_amps)),
          StateVector(basis, std::move(scalar_amps))};
}

std::string_view to_string(StateTag tag) {
  switch (tag) {
    case StateTag::vacuum:
      return "vacuum";
    case StateTag::vector_like:
      return "vector";
    case StateTag::scalar_like:
      return "scalar";
    case StateTag::momentum_excitation:
      return "momentum";
    case StateTag::unclassified:
      break;
  }
  return "unclassified";
}

StateLabel classify(const StateVector& state, double vacuum_energy, const SparseOperator& h,
                    const SparseOperator& momentum, const ClassifyOptions& options) {
  if (!(state.basis() == h.basis()) || !(state.basis() == momentum.basis())) {
    throw ShapeMismatchError("classification inputs live in different bases");
  }
  StateLabel label;
  label.gap = h.expectation(state) - vacuum_energy;
  label.p2 = momentum.expectation_of_square(state);
  label.p_mean = momentum.expectation(state);
  std::optional<double> reference_p2 = options.p2_minimal;
  try {
    const auto reference = strong_coupling_states(state.basis_ptr());
    label.overlap_vector = overlap_probability(reference.vector, state);
    label.overlap_scalar = overlap_probability(reference.scalar, state);
    if (!reference_p2) reference_p2 = momentum.expectation_of_square(reference.vector);
  } catch (const InvalidSectorError&) {
    // Neel configuration outside this sector: overlaps stay zero.
  }

  if (label.gap < options.gap_epsilon) {
    label.tag = StateTag::vacuum;
  } else if (!reference_p2) {
    label.tag = StateTag::unclassified;
  } else if (label.p2 > *reference_p2 + options.p2_slack) {
    label.tag = StateTag::momentum_excitation;
  } else if (std::max(label.overlap_vector, label.overlap_scalar) < options.overlap_floor) {
    label.tag = StateTag::unclassified;
  } else {
    label.tag = label.overlap_vector >= label.overlap_scalar ? StateTag::vector_like : StateTag::scalar_like;
  }
  return label;
}

std::vector<StateLabel> classify_spectrum(const EigenResult& spectrum, const SparseOperator& h,
                                          const SparseOperator& momentum, ClassifyOptions options) {
  std::vector<StateLabel> labels;
  if (spectrum.states.empty()) return labels;
  const double vacuum_energy = spectrum.energies.front();
  double p2_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spectrum.states.size(); ++i) {
    if (spectrum.energies[i] - vacuum_energy < options.gap_epsilon) continue;
    p2_min = std::min(p2_min, momentum.expectation_of_square(spectrum.states[i]));
  }
  if (std::isfinite(p2_min)) options.p2_minimal = p2_min;
  for (const auto& state : spectrum.states) {
    labels.push_back(classify(state, vacuum_energy, h, momentum, options));
  }
  return labels;
}

}  // namespace ilat
