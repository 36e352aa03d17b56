#pragma once

// Lattice Schwinger model on a qubit chain with the gauge field eliminated by
// Gauss's law (open boundaries, zero field at the left edge). Energies are in
// units of 1/a and times in units of a, so the coupling and mass enter only as
// the dimensionless products ga and ma.

#include "ilat/hilbert.hpp"
#include "ilat/sparse_operator.hpp"

#include <optional>
#include <vector>

namespace ilat {

struct ModelParams {
  int sites = 0;
  double ga = 1.0;
  double ma = 0.0;

  void validate() const;
  // Prefactor (ga)^2 / 2 of the electric energy.
  double electric_scale() const { return 0.5 * ga * ga; }
};

// Inclusive range of links n (the link n sits between sites n and n+1).
struct LinkWindow {
  int first;
  int last;
  bool contains(int link) const { return link >= first && link <= last; }
  bool operator==(const LinkWindow&) const = default;
};

// Two external charges +-Q that initially bound the links
// [center_left, center_right] and move outward by one link each time
// floor(u t) increments. The field on links inside the window is shifted by
// -Q. When t_remove is set the charges disappear at that time.
struct ChargeBackground {
  double charge = 0.0;
  double speed = 1.0;
  int center_left = 1;
  int center_right = 1;
  std::optional<double> t_remove;
  // Charges that reach the first or last link stop there instead of raising
  // WindowError.
  bool halt_at_edges = false;

  void validate(int n_sites) const;
  int hops_at(double t) const;
  // nullopt once the charges are removed.
  std::optional<LinkWindow> window_at(double t, int n_sites) const;
  // Times in (0, t_end) at which window_at changes.
  std::vector<double> change_times(double t_end, int n_sites) const;
  // Earliest time at which the window differs from its t = 0 value.
  double first_motion_time() const;
};

// H = (ga^2/2) sum_{n=1}^{N-1} [L(n) - Q theta_n(t)]^2
//     + (ma/2) sum_n (-1)^n sigma^z_n
//     + (1/2) sum_n (sigma^+_n sigma^-_{n+1} + h.c.)
// with L(n) = 1/2 sum_{k<=n} (sigma^z_k + (-1)^k).
SparseOperator build_hamiltonian(const BasisPtr& basis, const ModelParams& params,
                                 const std::optional<ChargeBackground>& background = std::nullopt,
                                 double t = 0.0);

// Eigenvalue of L(link) on a configuration, without background.
double link_field(const SectorBasis& basis, Config c, int link);

// <L(n)> for n = 1..N-1, including the -Q shift on links inside the charge
// window at time t.
std::vector<double> electric_field_profile(const StateVector& state,
                                           const std::optional<ChargeBackground>& background = std::nullopt,
                                           double t = 0.0);

// P = -i sum_n (sigma^-_n sigma^z_{n+1} sigma^+_{n+2} - h.c.). Requires N >= 3.
SparseOperator pseudo_momentum_operator(const BasisPtr& basis);

// Semi-classical string-breaking field L_c = m^2 / g^2.
double critical_field(const ModelParams& params);
// Continuum vector-meson mass g / sqrt(pi).
double continuum_vector_mass(double g);
// Scalar meson reference: twice the vector mass.
double continuum_scalar_mass(double g);

}  // namespace ilat
