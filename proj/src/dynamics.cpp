#include "ilat/dynamics.hpp"

#include "ilat/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace ilat {

namespace {

constexpr double kTimeSlack = 1e-9;

struct PropagatedVector {
  Vec amplitudes;
  double error_estimate;
};

// Coefficients of exp(-i T tau) e_1 for the leading `used` x `used` block of
// the Lanczos tridiagonal matrix.
Eigen::VectorXcd tridiagonal_exponential(const std::vector<double>& alpha, const std::vector<double>& beta,
                                         Eigen::Index used, double tau) {
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(used, used);
  for (Eigen::Index i = 0; i < used; ++i) tri(i, i) = alpha[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < used; ++i) {
    tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tri);
  const Eigen::MatrixXd& q = solver.eigenvectors();
  Eigen::VectorXcd phases(used);
  for (Eigen::Index i = 0; i < used; ++i) {
    phases[i] = std::exp(cplx{0.0, -solver.eigenvalues()[i] * tau}) * q(0, i);
  }
  return q.cast<cplx>() * phases;
}

// exp(-i H tau) v for a unit vector v, using a Lanczos basis with full
// re-orthogonalization. The basis stops growing once the error estimate
// beta_m |c_m| drops below tol.
PropagatedVector lanczos_exponential(const SparseOperator& h, const Vec& v, double tau, int krylov_dim,
                                     double tol) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  const Eigen::Index m = std::min<Eigen::Index>(krylov_dim, n);
  Mat basis(n, m);
  std::vector<double> alpha;
  std::vector<double> beta;
  basis.col(0) = v;
  Eigen::VectorXcd coeffs;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index used = j + 1;
    Vec w = h.matrix() * basis.col(j);
    alpha.push_back(basis.col(j).dot(w).real());
    for (int pass = 0; pass < 2; ++pass) w -= basis.leftCols(used) * (basis.leftCols(used).adjoint() * w);
    const double b = w.norm();
    coeffs = tridiagonal_exponential(alpha, beta, used, tau);
    // Breakdown or a full space makes the projection exact.
    const bool exact = b < 1e-14 || used == n;
    const double error = exact ? 0.0 : b * std::abs(coeffs[used - 1]);
    if (exact || error <= tol || used == m) return {basis.leftCols(used) * coeffs, error};
    beta.push_back(b);
    basis.col(j + 1) = w / b;
  }
  return {v, 0.0};  // only reached for an empty basis
}

void advance(const SparseOperator& h, Vec& psi, double tau, const KrylovOptions& options, int depth) {
  PropagatedVector step = lanczos_exponential(h, psi, tau, options.krylov_dim, options.tol);
  if (step.error_estimate <= options.tol) {
    psi = std::move(step.amplitudes);
    psi.normalize();
    return;
  }
  if (depth >= options.max_halvings) {
    throw StepError("Krylov step of length " + std::to_string(tau) + " has error estimate " +
                        std::to_string(step.error_estimate) + " above tolerance",
                    step.error_estimate);
  }
  advance(h, psi, tau / 2, options, depth + 1);
  advance(h, psi, tau / 2, options, depth + 1);
}

}  // namespace

StateVector krylov_step(const SparseOperator& h, const StateVector& state, double dt,
                        const KrylovOptions& options) {
  if (!(state.basis() == h.basis())) throw ShapeMismatchError("state and Hamiltonian bases differ");
  if (options.krylov_dim < 2) throw ConfigError("Krylov dimension must be at least 2");
  Vec psi = state.amplitudes();
  if (dt != 0.0) advance(h, psi, dt, options, 0);
  return StateVector(state.basis_ptr(), std::move(psi));
}

void QuenchSchedule::validate() const {
  params.validate();
  if (!(dt > 0.0)) throw ConfigError("time step dt must be positive");
  if (!(sample_every > 0.0)) throw ConfigError("sample cadence must be positive");
  if (segments.empty()) throw ConfigError("schedule has no segments");
  double expected = 0.0;
  for (const auto& seg : segments) {
    if (std::abs(seg.t_start - expected) > kTimeSlack || seg.t_end < seg.t_start) {
      throw ConfigError("schedule segments must be contiguous and start at t = 0");
    }
    if (seg.background) seg.background->validate(params.sites);
    expected = seg.t_end;
  }
}

QuenchSchedule make_schedule(const ModelParams& params, const std::optional<ChargeBackground>& background,
                             double t_end, double dt, double sample_every) {
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  QuenchSchedule schedule{params, {}, dt, sample_every};
  std::vector<double> cuts{0.0};
  if (background) {
    background->validate(params.sites);
    for (double t : background->change_times(t_end, params.sites)) cuts.push_back(t);
  }
  cuts.push_back(t_end);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    HamiltonianSegment seg{cuts[i], cuts[i + 1], background};
    if (background && !background->window_at(cuts[i], params.sites)) seg.background.reset();
    schedule.segments.push_back(std::move(seg));
  }
  schedule.validate();
  return schedule;
}

Trajectory evolve(const QuenchSchedule& schedule, const StateVector& initial,
                  std::span<const Observer> observers, const KrylovOptions& options, std::stop_token stop) {
  schedule.validate();
  if (initial.sites() != schedule.params.sites) {
    throw ShapeMismatchError("initial state and schedule disagree on the site count");
  }
  const double t_end = schedule.t_end();
  Trajectory trajectory;
  StateVector psi = initial;

  std::size_t segment = 0;
  std::optional<SparseOperator> h;
  auto segment_at = [&](double t) {
    while (segment + 1 < schedule.segments.size() && t >= schedule.segments[segment].t_end - kTimeSlack) {
      ++segment;
      h.reset();
    }
    return segment;
  };
  auto notify = [&](double t) {
    trajectory.times.push_back(t);
    const auto& bg = schedule.segments[segment_at(t)].background;
    for (const auto& observer : observers) observer(t, psi, bg);
  };

  double t = 0.0;
  notify(t);
  try {
    for (long sample = 1;; ++sample) {
      const double target = static_cast<double>(sample) * schedule.sample_every;
      if (target > t_end + kTimeSlack) break;
      while (t < target - kTimeSlack) {
        const auto& seg = schedule.segments[segment_at(t)];
        if (!h) h = build_hamiltonian(psi.basis_ptr(), schedule.params, seg.background, seg.t_start);
        const double stop_at = std::min(target, seg.t_end);
        const auto steps = static_cast<long>(std::ceil((stop_at - t) / schedule.dt - kTimeSlack));
        const double tau = (stop_at - t) / static_cast<double>(std::max(steps, 1L));
        for (long s = 0; s < std::max(steps, 1L); ++s) {
          if (stop.stop_requested()) {
            trajectory.complete = false;
            trajectory.failure = "interrupted at t=" + std::to_string(t);
            trajectory.final_state = psi;
            return trajectory;
          }
          psi = krylov_step(*h, psi, tau, options);
        }
        t = stop_at;
      }
      t = target;
      notify(t);
    }
  } catch (const StepError& e) {
    trajectory.complete = false;
    trajectory.failure = e.what();
  }
  trajectory.final_state = psi;
  return trajectory;
}

}  // namespace ilat
