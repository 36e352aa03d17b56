#pragma once

#include "ilat/hilbert.hpp"
#include "ilat/schwinger.hpp"
#include "ilat/sparse_operator.hpp"

#include <functional>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

namespace ilat {

struct KrylovOptions {
  int krylov_dim = 20;
  // Bound on the a-posteriori error estimate of one (sub)step.
  double tol = 1e-10;
  // A step is split into at most 2^max_halvings substeps before giving up.
  int max_halvings = 20;
};

// exp(-i H dt)|psi> from a Lanczos basis of at most krylov_dim vectors. If
// the error estimate exceeds tol the step is split into halves recursively.
StateVector krylov_step(const SparseOperator& h, const StateVector& state, double dt,
                        const KrylovOptions& options = {});

// One piece of a piecewise-constant Hamiltonian; H is built from the model,
// the background and t_start.
struct HamiltonianSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  std::optional<ChargeBackground> background;
};

struct QuenchSchedule {
  ModelParams params;
  std::vector<HamiltonianSegment> segments;
  double dt = 0.02;
  double sample_every = 0.5;

  double t_end() const { return segments.empty() ? 0.0 : segments.back().t_end; }
  void validate() const;
};

// Splits [0, t_end] at every change of the charge window (hops and removal).
QuenchSchedule make_schedule(const ModelParams& params, const std::optional<ChargeBackground>& background,
                             double t_end, double dt = 0.02, double sample_every = 0.5);

// Called at every sample time with the current state and the background
// active at that time.
using Observer = std::function<void(double t, const StateVector& state,
                                    const std::optional<ChargeBackground>& background)>;

struct Trajectory {
  std::vector<double> times;
  std::optional<StateVector> final_state;
  bool complete = true;
  std::string failure;
};

// Samples at t = 0, sample_every, 2 sample_every, ... <= t_end. Integration
// steps never cross a sample time or a segment boundary. A StepError or a
// stop request ends the run early with complete = false.
Trajectory evolve(const QuenchSchedule& schedule, const StateVector& initial,
                  std::span<const Observer> observers, const KrylovOptions& options = {},
                  std::stop_token stop = {});

}  // namespace ilat
