#pragma once

// Information lattice of a pure state on an open chain.
//
// For every contiguous window C^l_n (l+1 sites centred on n) the von Neumann
// information I(rho) = log2(dim rho) - S(rho) is split into local
// contributions
//
//   i(n, l) = I(rho^l_n) - I(rho^{l-1}_{n-1/2}) - I(rho^{l-1}_{n+1/2}) + I(rho^{l-2}_n),
//
// with I = 0 for empty windows, so that I(rho^l_n) equals the sum of i over
// all labels whose window lies inside C^l_n. All quantities are in bits.

#include "ilat/hilbert.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ilat {

// Indexed by scale l.
using ScaleProfile = std::vector<double>;

class InfoLattice {
 public:
  InfoLattice(int n_sites, int max_scale);

  int sites() const { return n_sites_; }
  int max_scale() const { return max_scale_; }

  double at(const Label& label) const;
  void set(const Label& label, double value);

  // Labels at scale l, ordered by increasing n.
  std::vector<Label> labels_at(int ell) const;
  void for_each(const std::function<void(const Label&, double)>& visit) const;

  double total() const;
  double min_value() const;

 private:
  std::size_t slot(const Label& label) const;

  int n_sites_;
  int max_scale_;
  // values_[l][first_site - 1]
  std::vector<std::vector<double>> values_;
};

// Eigenvalues in [-1e-8, 0) are treated as 0; anything more negative raises
// InvalidDensityError.
inline constexpr double kNegativeEigenvalueTolerance = 1e-8;

// log2(2^qubits) + sum lambda log2 lambda over the given spectrum.
double information_from_spectrum(const Eigen::VectorXd& eigenvalues, int qubits);
double von_neumann_entropy_bits(const Eigen::VectorXd& eigenvalues);

double von_neumann_information(const DensityMatrix& rho);

// I(rho) of the window [first_site, last_site]; 0 for an empty window.
double window_information(const StateVector& state, int first_site, int last_site);

double local_information(const StateVector& state, const Label& label);

// Each window information entering the lattice is computed exactly once.
// `threads` > 1 fills independent windows concurrently.
InfoLattice full_info_lattice(const StateVector& state, int max_scale, int threads = 1);

ScaleProfile info_per_scale(const InfoLattice& lattice);

// Sum over labels whose centre satisfies n_lo <= n <= n_hi (half-integer
// centres included).
ScaleProfile windowed_info_per_scale(const InfoLattice& lattice, double n_lo, double n_hi);

// Pointwise a - b. The result may be negative.
InfoLattice info_difference(const InfoLattice& a, const InfoLattice& b);

// Argmax over l >= exclude_below, ties resolved toward smaller l. Returns
// nothing when the profile has no positive entry in that range.
std::optional<int> peak_scale(const ScaleProfile& profile, int exclude_below);

// S(n) of the block {1..n} for n = 1..N-1, from the singular values of the
// bipartition coefficient matrix.
std::vector<double> bipartite_entropy_profile(const StateVector& state);

}  // namespace ilat
