#pragma once

#include "ilat/hilbert.hpp"
#include "ilat/schwinger.hpp"
#include "ilat/sparse_operator.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ilat {

struct LanczosOptions {
  int count = 1;
  // Converged when ||H x - E x|| < tol for each requested pair.
  double tol = 1e-9;
  int max_restarts = 500;
  // Krylov space size before a thick restart; 0 picks max(2 count + 20, 40).
  int krylov_dim = 0;
  std::uint64_t seed = 0;
};

struct EigenResult {
  std::vector<double> energies;  // ascending
  std::vector<StateVector> states;
  std::vector<double> residuals;
};

using MatVec = std::function<void(const Vec& in, Vec& out)>;

// Lowest eigenpairs of a Hermitian operator given as a matrix-vector product.
// Thick-restart Lanczos with full re-orthogonalization, started from a
// Gaussian vector drawn from `seed`.
EigenResult lanczos_lowest(const BasisPtr& basis, const MatVec& apply, const LanczosOptions& options);

EigenResult lanczos_lowest(const SparseOperator& h, const LanczosOptions& options);

// Lowest eigenpairs of H + shift * sum_k |psi_k><psi_k|, re-orthogonalized
// against the known states. Energies and residuals refer to H itself.
// Throws DeflationLeakError if a returned state overlaps a known one by more
// than 1e-4 before re-orthogonalization.
EigenResult excited_by_deflation(const SparseOperator& h, std::span<const StateVector> known,
                                 double shift, const LanczosOptions& options);

// 10 * (ga^2 / 2) * N.
double default_deflation_shift(const ModelParams& params);

// The `levels` lowest states found one at a time, each run deflating all
// states found before it.
EigenResult lowest_levels_by_deflation(const SparseOperator& h, int levels, double shift,
                                       const LanczosOptions& options);

struct StrongCouplingStates {
  StateVector vacuum;
  StateVector vector;
  StateVector scalar;
};

// |Omega> is the Neel state; |1_{V,S}> = (N-1)^{-1/2} sum_n (s^+_{n+1} s^-_n -+ h.c.)|Omega>.
StrongCouplingStates strong_coupling_states(const BasisPtr& basis);

enum class StateTag { vacuum, vector_like, scalar_like, momentum_excitation, unclassified };

std::string_view to_string(StateTag tag);

struct StateLabel {
  double gap = 0.0;
  double p2 = 0.0;       // <P^2>
  double p_mean = 0.0;   // <P>
  double overlap_vector = 0.0;
  double overlap_scalar = 0.0;
  StateTag tag = StateTag::unclassified;
};

struct ClassifyOptions {
  double gap_epsilon = 1e-6;
  // A gapped state counts as minimal-momentum when <P^2> does not exceed
  // p2_minimal + p2_slack. Unset: <P^2> of |1_V> on the same basis, the
  // zero-momentum reference, which is 2/(N-1) rather than 0 on an open chain.
  // classify_spectrum sets it to the smallest <P^2> among gapped levels.
  std::optional<double> p2_minimal;
  double p2_slack = 0.5;
  // Minimal-momentum states whose overlaps with |1_V> and |1_S> both fall
  // below this value (multi-meson states, for instance) stay unclassified.
  double overlap_floor = 0.01;
};

// Per-state label: vacuum when the gap is below gap_epsilon; vector- or
// scalar-like (larger strong-coupling overlap wins) when <P^2> is minimal;
// momentum excitation otherwise. Neel configurations outside the sector give
// zero overlaps.
StateLabel classify(const StateVector& state, double vacuum_energy, const SparseOperator& h,
                    const SparseOperator& momentum, const ClassifyOptions& options = {});

// Labels a computed spectrum. The lowest level is the vacuum reference and
// p2_minimal is taken as the smallest <P^2> among gapped levels.
std::vector<StateLabel> classify_spectrum(const EigenResult& spectrum, const SparseOperator& h,
                                          const SparseOperator& momentum, ClassifyOptions options = {});

}  // namespace ilat
